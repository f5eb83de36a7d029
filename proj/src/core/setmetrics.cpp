#include "setmetrics.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace roa {

const char* to_string(Metric m) {
  return m == Metric::kHausdorff ? "hausdorff" : "chabauty";
}

Metric parse_metric(const std::string& name) {
  if (name == "hausdorff") return Metric::kHausdorff;
  if (name == "chabauty") return Metric::kChabauty;
  throw Error(ErrorCode::kDomain, "unknown metric '" + name + "'");
}

namespace {

void check_cloud(const PointCloud& c) {
  if (c.size() == 0) throw Error(ErrorCode::kDomain, "empty point cloud");
  for (const Vec& v : c.points) {
    if (v.size() != c.points.front().size()) {
      throw Error(ErrorCode::kDomain, "point cloud mixes dimensions");
    }
    if (!v.allFinite()) throw Error(ErrorCode::kDomain, "non-finite point in cloud");
  }
}

template <typename D>
double directed(const std::vector<Vec>& a, const std::vector<Vec>& b, D dist) {
  double worst = 0.0;
  for (const Vec& u : a) {
    double best = INFINITY;
    for (const Vec& v : b) {
      best = std::min(best, dist(u, v));
      if (best <= worst) break;  // cannot raise the sup
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff(const PointCloud& x, const PointCloud& y) {
  check_cloud(x);
  check_cloud(y);
  if (x.includes_infinity || y.includes_infinity) {
    throw Error(ErrorCode::kDomain, "infinity is only meaningful under the Chabauty metric");
  }
  if (x.dim() != y.dim()) throw Error(ErrorCode::kDomain, "clouds differ in dimension");
  auto d = [](const Vec& u, const Vec& v) { return (u - v).norm(); };
  return std::max(directed(x.points, y.points, d), directed(y.points, x.points, d));
}

Vec chabauty_embed(const Vec& x) {
  const double r2 = x.squaredNorm();
  Vec u(x.size() + 1);
  if (!std::isfinite(r2)) return chabauty_infinity(static_cast<std::size_t>(x.size()));
  u.head(x.size()) = 2.0 * x / (r2 + 1.0);
  u[x.size()] = (r2 - 1.0) / (r2 + 1.0);
  return u;
}

Vec chabauty_infinity(std::size_t n) {
  Vec u = Vec::Zero(static_cast<Eigen::Index>(n + 1));
  u[static_cast<Eigen::Index>(n)] = 1.0;
  return u;
}

double great_circle(const Vec& u, const Vec& v) {
  // chord form; acos of the inner product loses accuracy near 0 and pi
  return 2.0 * std::asin(std::min(1.0, 0.5 * (u - v).norm()));
}

double chabauty_distance(const PointCloud& x, const PointCloud& y) {
  check_cloud(x);
  check_cloud(y);
  std::size_t n = x.points.empty() ? y.dim() : x.dim();
  if (!x.points.empty() && !y.points.empty() && x.dim() != y.dim()) {
    throw Error(ErrorCode::kDomain, "clouds differ in dimension");
  }
  if (n == 0) return 0.0;  // both are {inf}
  auto embed = [&](const PointCloud& c) {
    std::vector<Vec> out;
    out.reserve(c.points.size() + 1);
    for (const Vec& p : c.points) out.push_back(chabauty_embed(p));
    out.push_back(chabauty_infinity(n));
    return out;
  };
  const auto ex = embed(x);
  const auto ey = embed(y);
  return std::max(directed(ex, ey, great_circle), directed(ey, ex, great_circle));
}

double set_distance(const PointCloud& x, const PointCloud& y, Metric metric) {
  return metric == Metric::kHausdorff ? hausdorff(x, y) : chabauty_distance(x, y);
}

MetricReport continuity_sweep(const CloudSampler& sampler, const ParamPoint& p0,
                              const std::vector<ParamPoint>& grid, Metric metric,
                              std::size_t workers) {
  MetricReport report;
  report.metric = metric;
  report.p0 = p0;
  const PointCloud ref = sampler(p0);
  check_cloud(ref);
  report.n_ref = ref.size();

  const std::function<MetricRow(std::size_t)> row_at = [&](std::size_t i) {
    MetricRow row;
    row.p = grid[i];
    if (row.p.size() != p0.size()) throw Error(ErrorCode::kDomain, "grid point has wrong arity");
    double s = 0.0;
    for (std::size_t k = 0; k < p0.size(); ++k) s += (row.p[k] - p0[k]) * (row.p[k] - p0[k]);
    row.offset = std::sqrt(s);
    row.n_y = ref.size();
    try {
      const PointCloud c = sampler(row.p);
      row.n_x = c.size();
      row.distance = set_distance(c, ref, metric);
    } catch (const std::exception& e) {
      row.ok = false;
      row.distance = NAN;
      row.error = e.what();
    }
    return row;
  };
  report.rows = parallel_map<MetricRow>(grid.size(), workers, row_at);
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const MetricRow& a, const MetricRow& b) { return a.offset < b.offset; });
  return report;
}

void write_metric_csv(std::ostream& out, const MetricReport& report) {
  const auto old = out.precision(9);
  for (const auto& name : report.p0.names()) out << name << ',';
  out << "dist,nX,nY,metric,error\n";
  for (const MetricRow& r : report.rows) {
    for (std::size_t k = 0; k < r.p.size(); ++k) out << r.p[k] << ',';
    if (r.ok) out << r.distance; else out << "nan";
    out << ',' << r.n_x << ',' << r.n_y << ',' << to_string(report.metric) << ',';
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << err << '\n';
  }
  out.precision(old);
}

}  // namespace roa
