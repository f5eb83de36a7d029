#pragma once

#include "roa/roa.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace roacli {

using json = nlohmann::ordered_json;

enum ExitCode { kExitOk = 0, kExitDomain = 1, kExitUsage = 2 };

struct Failure : std::runtime_error {
  Failure(int code, const std::string& what) : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

[[noreturn]] void usage_error(const std::string& msg);
[[noreturn]] void domain_error(const std::string& msg);
void check(roa_status status);

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
template <typename T, void (*Destroy)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Destroy>>;

using System = Handle<roa_system, roa_system_destroy>;
using Params = Handle<roa_params, roa_params_destroy>;
using EquilibriumH = Handle<roa_equilibrium, roa_equilibrium_destroy>;
using Branch = Handle<roa_branch, roa_branch_destroy>;
using Boundary = Handle<roa_boundary, roa_boundary_destroy>;
using TauH = Handle<roa_tau_result, roa_tau_destroy>;
using ScenarioH = Handle<roa_scenario, roa_scenario_destroy>;
using BisectH = Handle<roa_bisect_result, roa_bisect_destroy>;
using ThresholdH = Handle<roa_threshold_result, roa_threshold_destroy>;
using RecoveryH = Handle<roa_recovery, roa_recovery_destroy>;
using Cloud = Handle<roa_cloud, roa_cloud_destroy>;
using Report = Handle<roa_metric_report, roa_metric_report_destroy>;

System open_system(const std::string& id);
Params make_params(const roa_system* sys, const std::vector<std::string>& assignments);
Params copy_params(const roa_params* p);
void assign(roa_params* p, const std::vector<std::string>& assignments);
json params_json(const roa_params* p);
std::vector<double> params_values(const roa_params* p);

// "a,b,c"
std::vector<double> parse_vector(const std::string& text);
double parse_double(const std::string& text);

// "lo:hi:n", inclusive endpoints
std::vector<double> parse_grid(const std::string& text);

// "name=lo:hi"
struct Range {
  std::string name;
  double lo;
  double hi;
};
Range parse_range(const std::string& text);

std::string fmt17(double v);
std::string fmt9(double v);

// JSON text with every float printed at 17 significant digits and
// non-finite values as null.
std::string dump_json(const json& j);
json vec_json(const std::vector<double>& v);
json num(double v);

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

// Option registry: every registered option is echoed into the manifest and
// can be turned back into an argument list for replay.
class Config {
 public:
  template <typename T>
  CLI::Option* opt(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    items_.emplace_back(name, [&var] { return json(var); });
    return app->add_option("--" + name, var, help)->capture_default_str();
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& help);
  json dump() const;

 private:
  std::vector<std::pair<std::string, std::function<json()>>> items_;
};

std::vector<std::string> replay_args(const std::string& subcommand, const json& config);

struct Artifacts {
  std::filesystem::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& content);
  std::string path(const std::string& name);  // registers and returns the full path
};

}  // namespace roacli
