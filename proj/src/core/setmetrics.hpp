#pragma once

#include "common.hpp"
#include "systems.hpp"

#include <functional>
#include <string>
#include <vector>

namespace roa {

// Finite sample of a closed set. `includes_infinity` marks A u {inf} for sets
// living in the one-point compactification.
struct PointCloud {
  std::vector<Vec> points;
  bool includes_infinity = false;

  std::size_t size() const { return points.size() + (includes_infinity ? 1 : 0); }
  std::size_t dim() const { return points.empty() ? 0 : static_cast<std::size_t>(points.front().size()); }
};

enum class Metric { kHausdorff, kChabauty };
const char* to_string(Metric m);
Metric parse_metric(const std::string& name);

// Euclidean Hausdorff distance, exact over the samples.
double hausdorff(const PointCloud& x, const PointCloud& y);

// Inverse stereographic projection onto the unit sphere in R^{n+1}.
Vec chabauty_embed(const Vec& x);
Vec chabauty_infinity(std::size_t n);

double great_circle(const Vec& u, const Vec& v);

// Hausdorff distance of the embedded clouds, both augmented with infinity,
// under the great-circle metric.
double chabauty_distance(const PointCloud& x, const PointCloud& y);

double set_distance(const PointCloud& x, const PointCloud& y, Metric metric);

struct MetricRow {
  ParamPoint p;
  double offset = 0.0;  // |p - p0|
  double distance = 0.0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  bool ok = true;
  std::string error;
};

struct MetricReport {
  Metric metric = Metric::kHausdorff;
  ParamPoint p0;
  std::size_t n_ref = 0;
  std::vector<MetricRow> rows;  // sorted by offset, ties kept in grid order
};

using CloudSampler = std::function<PointCloud(const ParamPoint&)>;

// d(sampler(p), sampler(p0)) for every p in the grid. A failing sample flags
// its row; a failing reference sample is an error.
MetricReport continuity_sweep(const CloudSampler& sampler, const ParamPoint& p0,
                              const std::vector<ParamPoint>& grid, Metric metric,
                              std::size_t workers = 1);

void write_metric_csv(std::ostream& out, const MetricReport& report);

}  // namespace roa
