#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run roa(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + ROA_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("version and usage errors") {
  const Run v = roa("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("0.1.0") != std::string::npos);
  CHECK(roa("").code == 2);
  CHECK(roa("bisect --no-such-flag 1").code == 2);
  CHECK(roa("equilibria --system pendulum --param c9=1 --out " + scratch("e").string()).code == 2);
  CHECK(roa("equilibria --system lorenz --out " + scratch("e").string()).code == 2);
  CHECK(roa("equilibria --system pendulum --param c3=abc --out " + scratch("e").string()).code ==
        2);
}

TEST_CASE("domain failures exit with 1") {
  const fs::path d = scratch("bad_bracket");
  const Run r = roa("bisect --system pendulum --p-a c3=1.3 --p-b c3=1.4 --out " + d.string());
  CHECK(r.code == 1);
}

TEST_CASE("equilibria summary") {
  const fs::path d = scratch("eq");
  const Run r = roa("equilibria --system pendulum --param c3=1.5 --out " + d.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const json file = json::parse(slurp(d / "equilibria.json"));
  CHECK(file.contains("equilibria"));
  bool stable = false;
  bool saddle = false;
  for (const auto& e : file["equilibria"]) {
    const std::string cls = e["classification"];
    const double x = e["x"][0];
    if (cls == "StableHyperbolic" && std::abs(x - 0.848062078981481) < 1e-9) stable = true;
    if (cls == "Saddle(1)" && std::abs(x - 2.293530574608312) < 1e-9) saddle = true;
  }
  CHECK(stable);
  CHECK(saddle);
  CHECK(j.is_object());
}

TEST_CASE("runs are deterministic and manifests replay") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const fs::path c = scratch("det_c");
  const std::string args =
      "tau-sweep --system pendulum --param c3=1.3 --path c3=1.5:1.56 --grid 4 "
      "--ball saddle@c3=1.3:r=1 --workers 2 --out ";
  REQUIRE(roa(args + a.string()).code == 0);
  REQUIRE(roa(args + b.string()).code == 0);
  CHECK(slurp(a / "tau_sweep.csv") == slurp(b / "tau_sweep.csv"));
  CHECK(slurp(a / "tau_sweep.json") == slurp(b / "tau_sweep.json"));

  const json m = json::parse(slurp(a / "manifest.json"));
  CHECK(m["subcommand"] == "tau-sweep");
  CHECK(m["config"]["grid"] == 4);
  CHECK(m["artifacts"].size() == 2);
  CHECK(m.contains("timings"));
  REQUIRE(roa("--from-manifest " + (a / "manifest.json").string() + " --out " + c.string()).code ==
          0);
  CHECK(slurp(a / "tau_sweep.csv") == slurp(c / "tau_sweep.csv"));
  CHECK(slurp(a / "tau_sweep.json") == slurp(c / "tau_sweep.json"));

  // tau rises towards the boundary parameter
  std::ifstream in(a / "tau_sweep.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("s,c1,c2,c3,c4,tau,", 0) == 0);
  const json sweep = json::parse(slurp(a / "tau_sweep.json"));
  double prev = 0.0;
  for (const auto& row : sweep["rows"]) {
    const double t = row["tau"]["tau"];
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("output directory from the environment") {
  const fs::path d = scratch("env");
  const Run r = roa("classify --system pendulum --point 0.5,0.3", "ROA_OUT=" + d.string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(d / "classify.json"));
  CHECK(fs::exists(d / "manifest.json"));
  CHECK(json::parse(r.out)["results"][0]["verdict"] == "Recovered");
}

TEST_CASE("bisect reports the boundary and its controlling saddle") {
  const fs::path d = scratch("bisect");
  const Run r = roa("bisect --system pendulum --p-a c3=1.3 --p-b c3=1.9 --tol 1e-9 --out " +
                    d.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(d / "bisect.json"));
  const double p = j["p_star"]["c3"];
  CHECK(std::abs(p - 1.5686679) < 1e-6);
  CHECK(j["controlling_element"]["index"] == 0);
}

TEST_CASE("discontinuity example") {
  const fs::path d = scratch("disc");
  const Run r = roa("example-discontinuity --grid 0.001:0.02:5 --metric chabauty --out " +
                    d.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(d / "discontinuity.json"));
  CHECK(double(j["min_distance"]) == doctest::Approx(0.532504098).epsilon(1e-6));
  CHECK(fs::exists(d / "discontinuity.csv"));
  CHECK(fs::exists(d / "endpoints.csv"));
}
