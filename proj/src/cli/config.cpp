#include "grnsp/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "grnsp/errors.hpp"

namespace grnsp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(join(path, it.key()), "unknown key");
}

double get_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = get_real(v, path);
  if (!(x > 0)) fail(path, "must be > 0");
  return x;
}

double nonnegative(const json& v, const std::string& path) {
  const double x = get_real(v, path);
  if (!(x >= 0)) fail(path, "must be >= 0");
  return x;
}

long long get_int(const json& v, const std::string& path, long long lo, long long hi) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Eigen::Vector2d get_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected an array of two numbers");
  return {get_real(v[0], path + "[0]"), get_real(v[1], path + "[1]")};
}

ModelParams parse_params(const json& j, const std::string& path) {
  reject_unknown(j, path, {"gamma", "delta", "xi_a", "xi_b", "sigma", "eps", "mu"});
  ModelParams p;
  if (j.contains("gamma")) p.gamma = positive(j["gamma"], path + ".gamma");
  if (j.contains("delta")) p.delta = positive(j["delta"], path + ".delta");
  if (j.contains("xi_a")) p.xi_a = positive(j["xi_a"], path + ".xi_a");
  if (j.contains("xi_b")) p.xi_b = positive(j["xi_b"], path + ".xi_b");
  if (j.contains("sigma")) p.sigma = positive(j["sigma"], path + ".sigma");
  const bool has_eps = j.contains("eps"), has_mu = j.contains("mu");
  if (has_eps) p.eps = positive(j["eps"], path + ".eps");
  if (has_mu) {
    const double mu = positive(j["mu"], path + ".mu");
    if (has_eps) {
      if (std::abs(p.eps - mu * p.sigma) > 1e-12 * p.eps)
        fail(path, "eps, mu and sigma are inconsistent (eps must equal mu * sigma)");
    } else {
      p.eps = mu * p.sigma;
    }
  }
  return p;
}

AxisSpec parse_axis(const json& j, const std::string& path, AxisSpec a) {
  reject_unknown(j, path, {"min", "max", "count", "log"});
  if (j.contains("min")) a.min = positive(j["min"], path + ".min");
  if (j.contains("max")) a.max = positive(j["max"], path + ".max");
  if (j.contains("count")) a.count = static_cast<int>(get_int(j["count"], path + ".count", 1, 100000));
  if (j.contains("log")) {
    if (!j["log"].is_boolean()) fail(path + ".log", "expected true or false");
    a.log = j["log"].get<bool>();
  }
  if (!(a.min <= a.max)) fail(path, "min must not exceed max");
  if (a.count == 1 && a.min != a.max) fail(path + ".count", "a single point needs min == max");
  return a;
}

json axis_json(const AxisSpec& a) {
  return {{"min", a.min}, {"max", a.max}, {"count", a.count}, {"log", a.log}};
}

json pair_json(const Eigen::Vector2d& v) { return json::array({v[0], v[1]}); }

}  // namespace

ParamPath PathSpec::build() const {
  if (kind == "circle") return ParamPath::circle(center, radius, samples);
  return ParamPath::polyline(points);
}

std::vector<double> AxisSpec::values() const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : double(i) / (count - 1);
    out[i] = log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                 : min + f * (max - min);
  }
  if (count > 1) out.back() = max;
  if (count > 0) out.front() = min;
  return out;
}

Eigen::VectorXd ExperimentConfig::initial_state() const {
  const int dim = state_dimension(system);
  if (initial) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = (*initial)[i];
    return x;
  }
  switch (system) {
    case SystemKind::Full:
      return Eigen::Vector4d(0, 0, 0.5, 0.5);
    case SystemKind::ReducedK2:
      return Eigen::Vector2d::Constant(std::log(0.5) / params.sigma);
    default:
      return Eigen::Vector2d(0.5, 0.5);
  }
}

ExperimentConfig parse_config(const json& j, const Overrides& o) {
  reject_unknown(j, "", {"experiment", "params", "system", "initial", "t_end", "sample_dt", "tol",
                         "deviation", "path", "grid", "mu0", "hopf_curve", "pwl", "chart_samples",
                         "seed", "threads", "out_dir", "format"});
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = get_string(j["experiment"], "experiment");
  if (j.contains("params")) c.params = parse_params(j["params"], "params");
  try {
    c.params.validate();
  } catch (const DomainError& e) {
    fail("params", e.what());
  }
  if (j.contains("system")) {
    const std::string s = get_string(j["system"], "system");
    try {
      c.system = system_from_name(s);
    } catch (const DomainError&) {
      fail("system", "unknown system '" + s + "' (full, qssr, reduced-k2, pwl-smoothed)");
    }
  }
  if (j.contains("initial")) {
    const json& v = j["initial"];
    const int dim = state_dimension(c.system);
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      fail("initial", "expected " + std::to_string(dim) + " numbers for system " +
                          std::string(to_string(c.system)));
    std::vector<double> x;
    for (int i = 0; i < dim; ++i) x.push_back(get_real(v[i], "initial[" + std::to_string(i) + "]"));
    c.initial = x;
  }
  if (j.contains("t_end")) c.t_end = positive(j["t_end"], "t_end");
  if (j.contains("sample_dt")) c.sample_dt = nonnegative(j["sample_dt"], "sample_dt");
  if (j.contains("tol")) c.tol = positive(j["tol"], "tol");
  if (j.contains("deviation")) {
    if (!j["deviation"].is_boolean()) fail("deviation", "expected true or false");
    c.deviation = j["deviation"].get<bool>();
  }
  if (j.contains("path")) {
    const json& pj = j["path"];
    reject_unknown(pj, "path", {"kind", "center", "radius", "samples", "points"});
    if (pj.contains("kind")) c.path.kind = get_string(pj["kind"], "path.kind");
    if (c.path.kind != "circle" && c.path.kind != "polyline")
      fail("path.kind", "expected circle or polyline");
    if (pj.contains("center")) c.path.center = get_pair(pj["center"], "path.center");
    if (pj.contains("radius")) c.path.radius = positive(pj["radius"], "path.radius");
    if (pj.contains("samples"))
      c.path.samples = static_cast<int>(get_int(pj["samples"], "path.samples", 3, 1000000));
    if (pj.contains("points")) {
      const json& pts = pj["points"];
      if (!pts.is_array()) fail("path.points", "expected an array of [xi_a, xi_b] pairs");
      for (std::size_t i = 0; i < pts.size(); ++i)
        c.path.points.push_back(get_pair(pts[i], "path.points[" + std::to_string(i) + "]"));
    }
    if (c.path.kind == "polyline" && c.path.points.size() < 2)
      fail("path.points", "a polyline needs at least two points");
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown(g, "grid", {"sigma", "eps"});
    if (g.contains("sigma")) c.grid.sigma = parse_axis(g["sigma"], "grid.sigma", c.grid.sigma);
    if (g.contains("eps")) c.grid.eps = parse_axis(g["eps"], "grid.eps", c.grid.eps);
  }
  if (j.contains("mu0")) c.mu0 = positive(j["mu0"], "mu0");
  if (j.contains("hopf_curve")) {
    const json& h = j["hopf_curve"];
    reject_unknown(h, "hopf_curve", {"initial_step", "max_step", "min_step", "xi_a_max", "xi_b_max",
                                     "max_points"});
    HopfCurveOptions& o = c.hopf_curve;
    if (h.contains("initial_step")) o.initial_step = positive(h["initial_step"], "hopf_curve.initial_step");
    if (h.contains("max_step")) o.max_step = positive(h["max_step"], "hopf_curve.max_step");
    if (h.contains("min_step")) o.min_step = positive(h["min_step"], "hopf_curve.min_step");
    if (h.contains("xi_a_max")) o.xi_a_max = positive(h["xi_a_max"], "hopf_curve.xi_a_max");
    if (h.contains("xi_b_max")) o.xi_b_max = positive(h["xi_b_max"], "hopf_curve.xi_b_max");
    if (h.contains("max_points"))
      o.max_points = static_cast<int>(get_int(h["max_points"], "hopf_curve.max_points", 2, 10000000));
    if (!(o.min_step <= o.initial_step && o.initial_step <= o.max_step))
      fail("hopf_curve", "need min_step <= initial_step <= max_step");
  }
  if (j.contains("pwl")) {
    const json& w = j["pwl"];
    reject_unknown(w, "pwl", {"initial", "t_max", "max_events", "sample_dt", "section_points"});
    if (w.contains("initial")) {
      c.pwl.initial = get_pair(w["initial"], "pwl.initial");
      if (!(c.pwl.initial.minCoeff() >= 0)) fail("pwl.initial", "must be >= 0");
    }
    if (w.contains("t_max")) c.pwl.t_max = positive(w["t_max"], "pwl.t_max");
    if (w.contains("max_events"))
      c.pwl.max_events = static_cast<int>(get_int(w["max_events"], "pwl.max_events", 1, 100000000));
    if (w.contains("sample_dt")) c.pwl.sample_dt = positive(w["sample_dt"], "pwl.sample_dt");
    if (w.contains("section_points")) {
      const json& s = w["section_points"];
      if (!s.is_array()) fail("pwl.section_points", "expected an array of numbers > 1");
      c.pwl.section_points.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string at = "pwl.section_points[" + std::to_string(i) + "]";
        const double v = get_real(s[i], at);
        if (!(v > 1)) fail(at, "must be > 1");
        c.pwl.section_points.push_back(v);
      }
    }
  }
  if (j.contains("chart_samples"))
    c.chart_samples = static_cast<int>(get_int(j["chart_samples"], "chart_samples", 1, 1000000));
  if (j.contains("seed"))
    c.seed = static_cast<std::uint64_t>(get_int(j["seed"], "seed", 0, (1LL << 62)));
  if (j.contains("threads")) c.threads = static_cast<int>(get_int(j["threads"], "threads", 1, 1024));
  if (j.contains("out_dir")) c.out_dir = get_string(j["out_dir"], "out_dir");
  if (j.contains("format")) c.format = get_string(j["format"], "format");
  apply_overrides(c, o);
  return c;
}

void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.format) c.format = *o.format;
  if (o.tol) c.tol = *o.tol;
  if (o.threads) c.threads = *o.threads;
  if (c.format != "csv" && c.format != "json") fail("format", "expected csv or json");
  if (!(c.tol >= 1e-12 && c.tol <= 1e-6)) fail("tol", "must lie in [1e-12, 1e-6]");
  if (c.threads < 1) fail("threads", "must be >= 1");
  if (c.out_dir.empty()) fail("out_dir", "must not be empty");
}

ExperimentConfig load_config(const std::string& path, const Overrides& o) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + path + ": " + e.what());
  }
  return parse_config(j, o);
}

json canonical_json(const ExperimentConfig& c) {
  const ModelParams& p = c.params;
  const Eigen::VectorXd x0 = c.initial_state();
  json j = {
      {"experiment", c.experiment},
      {"params", {{"gamma", p.gamma}, {"delta", p.delta}, {"xi_a", p.xi_a}, {"xi_b", p.xi_b},
                  {"sigma", p.sigma}, {"eps", p.eps}}},
      {"system", std::string(to_string(c.system))},
      {"initial", std::vector<double>(x0.data(), x0.data() + x0.size())},
      {"t_end", c.t_end},
      {"sample_dt", c.sample_dt},
      {"tol", c.tol},
      {"deviation", c.deviation},
      {"path", {{"kind", c.path.kind}, {"center", pair_json(c.path.center)}, {"radius", c.path.radius},
                {"samples", c.path.samples}}},
      {"grid", {{"sigma", axis_json(c.grid.sigma)}, {"eps", axis_json(c.grid.eps)}}},
      {"mu0", c.mu0},
      {"hopf_curve", {{"initial_step", c.hopf_curve.initial_step}, {"max_step", c.hopf_curve.max_step},
                      {"min_step", c.hopf_curve.min_step}, {"xi_a_max", c.hopf_curve.xi_a_max},
                      {"xi_b_max", c.hopf_curve.xi_b_max}, {"max_points", c.hopf_curve.max_points}}},
      {"pwl", {{"initial", pair_json(c.pwl.initial)}, {"t_max", c.pwl.t_max},
               {"max_events", c.pwl.max_events}, {"sample_dt", c.pwl.sample_dt},
               {"section_points", c.pwl.section_points}}},
      {"chart_samples", c.chart_samples},
      {"seed", c.seed},
      {"format", c.format},
  };
  json pts = json::array();
  for (const auto& q : c.path.points) pts.push_back(pair_json(q));
  j["path"]["points"] = pts;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json(c).dump())));
  return buf;
}

}  // namespace grnsp::cli
