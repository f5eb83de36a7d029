#include "util.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace roacli {

void usage_error(const std::string& msg) { throw Failure(kExitUsage, msg); }
void domain_error(const std::string& msg) { throw Failure(kExitDomain, msg); }

void check(roa_status status) {
  if (status == ROA_OK) return;
  const std::string msg = std::string(roa_status_name(status)) + ": " + roa_last_error();
  // bad names and malformed arguments are the caller's fault
  if (status == ROA_E_SCHEMA || status == ROA_E_INVALID_ARGUMENT) usage_error(msg);
  domain_error(msg);
}

System open_system(const std::string& id) {
  roa_system* s = nullptr;
  check(roa_system_create(id.c_str(), &s));
  return System(s);
}

Params make_params(const roa_system* sys, const std::vector<std::string>& assignments) {
  roa_params* p = nullptr;
  check(roa_params_create(sys, &p));
  Params out(p);
  assign(out.get(), assignments);
  check(roa_params_validate(sys, out.get()));
  return out;
}

Params copy_params(const roa_params* p) {
  roa_params* q = nullptr;
  check(roa_params_copy(p, &q));
  return Params(q);
}

void assign(roa_params* p, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const roa_status s = roa_params_assign(p, a.c_str());
    if (s == ROA_E_DOMAIN) usage_error(std::string("bad assignment: ") + roa_last_error());
    check(s);
  }
}

json params_json(const roa_params* p) {
  json j = json::object();
  for (std::size_t i = 0; i < roa_params_count(p); ++i) {
    j[roa_params_name(p, i)] = roa_params_value(p, i);
  }
  return j;
}

std::vector<double> params_values(const roa_params* p) {
  std::vector<double> v(roa_params_count(p));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = roa_params_value(p, i);
  return v;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    usage_error("not a number: '" + text + "'");
  }
  if (used != text.size()) usage_error("not a number: '" + text + "'");
  return v;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) usage_error("empty vector");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    usage_error("grid must be lo:hi:n, got '" + text + "'");
  }
  const double lo = parse_double(text.substr(0, a));
  const double hi = parse_double(text.substr(a + 1, b - a - 1));
  const double nd = parse_double(text.substr(b + 1));
  if (nd < 1 || nd != std::floor(nd)) usage_error("grid count must be a positive integer");
  const int n = static_cast<int>(nd);
  std::vector<double> out;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  out.back() = hi;
  return out;
}

Range parse_range(const std::string& text) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos || eq == 0) {
    usage_error("range must be name=lo:hi, got '" + text + "'");
  }
  return {text.substr(0, eq), parse_double(text.substr(eq + 1, colon - eq - 1)),
          parse_double(text.substr(colon + 1))};
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

namespace {

void emit(std::ostream& out, const json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << json(it.key()).dump() << ": ";
        emit(out, it.value(), depth + 1);
      }
      out << '\n' << close << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // short numeric arrays on one line
      bool flat = j.size() <= 8;
      for (const auto& e : j) flat = flat && (e.is_number() || e.is_null());
      if (flat) {
        out << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          emit(out, j[i], depth + 1);
        }
        out << ']';
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        emit(out, j[i], depth + 1);
      }
      out << '\n' << close << ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) out << fmt17(v); else out << "null";
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::ostringstream out;
  emit(out, j, 0);
  out << '\n';
  return out.str();
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(workers, n));
  if (count == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < count; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

CLI::Option* Config::flag(CLI::App* app, const std::string& name, bool& var,
                          const std::string& help) {
  items_.emplace_back(name, [&var] { return json(var); });
  return app->add_flag("--" + name, var, help);
}

json Config::dump() const {
  json j = json::object();
  for (const auto& [name, get] : items_) j[name] = get();
  return j;
}

std::vector<std::string> replay_args(const std::string& subcommand, const json& config) {
  std::vector<std::string> args{subcommand};
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return fmt17(v.get<double>());
    if (v.is_number()) return v.dump();
    usage_error("unsupported manifest value " + v.dump());
  };
  for (auto it = config.begin(); it != config.end(); ++it) {
    const json& v = it.value();
    const std::string flag = "--" + it.key();
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
    } else if (v.is_array()) {
      for (const auto& e : v) {
        args.push_back(flag);
        args.push_back(scalar(e));
      }
    } else if (!(v.is_string() && v.get<std::string>().empty())) {
      args.push_back(flag);
      args.push_back(scalar(v));
    }
  }
  return args;
}

void Artifacts::write(const std::string& name, const std::string& content) {
  std::ofstream f(path(name), std::ios::binary);
  if (!f) domain_error("cannot write " + (dir / name).string());
  f << content;
}

std::string Artifacts::path(const std::string& name) {
  std::filesystem::create_directories(dir);
  files.push_back(name);
  return (dir / name).string();
}

}  // namespace roacli
