#include "catft/config.hpp"

#include <cmath>
#include <limits>

namespace catft {

const Json JsonReader::kEmpty = Json::object();

JsonReader::JsonReader(const Json& j, std::string path) : j_(j.is_null() ? kEmpty : j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
}

bool JsonReader::has(const std::string& key) const { return j_.contains(key); }

const Json* JsonReader::get(const std::string& key) {
  used_.insert(key);
  const auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

double JsonReader::number(const std::string& key, double def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_number()) throw ConfigError(path(key) + ": expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ConfigError(path(key) + ": must be finite");
  return x;
}

long long JsonReader::integer64(const std::string& key, long long def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
  return v->get<long long>();
}

int JsonReader::integer(const std::string& key, int def) {
  const long long x = integer64(key, def);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(path(key) + ": integer out of range");
  return static_cast<int>(x);
}

std::uint64_t JsonReader::u64(const std::string& key, std::uint64_t def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
    throw ConfigError(path(key) + ": expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

bool JsonReader::boolean(const std::string& key, bool def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_boolean()) throw ConfigError(path(key) + ": expected true or false");
  return v->get<bool>();
}

std::string JsonReader::string(const std::string& key, const std::string& def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_string()) throw ConfigError(path(key) + ": expected a string");
  return v->get<std::string>();
}

std::vector<double> JsonReader::numbers(const std::string& key, const std::vector<double>& def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_array()) throw ConfigError(path(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

std::vector<int> JsonReader::integers(const std::string& key, const std::vector<int>& def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_array()) throw ConfigError(path(key) + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number_integer())
      throw ConfigError(path(key) + "[" + std::to_string(i) + "]: expected an integer");
    out.push_back((*v)[i].get<int>());
  }
  return out;
}

Range JsonReader::range(const std::string& key, Range def) {
  const Json* v = get(key);
  if (!v) return def;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
    throw ConfigError(path(key) + ": expected [lo, hi]");
  const Range r{(*v)[0].get<double>(), (*v)[1].get<double>()};
  if (!(r.lo <= r.hi)) throw ConfigError(path(key) + ": needs lo <= hi");
  return r;
}

JsonReader JsonReader::object(const std::string& key) {
  const Json* v = get(key);
  return JsonReader(v ? *v : kEmpty, path(key));
}

const Json& JsonReader::array(const std::string& key) {
  const Json* v = get(key);
  if (!v || !v->is_array()) throw ConfigError(path(key) + ": expected an array");
  return *v;
}

void JsonReader::finish() const {
  for (const auto& [k, v] : j_.items())
    if (!used_.count(k)) throw ConfigError(path(k) + ": unknown field");
}

namespace {

template <class F>
auto domain_checked(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Json range_json(const Range& r) { return Json::array({r.lo, r.hi}); }

CodeSpec parse_code_fields(JsonReader& r) {
  CodeSpec s;
  s.N = r.integer("N", s.N);
  s.alpha = r.number("alpha", s.alpha);
  s.squeeze_r = r.number("squeeze_r", s.squeeze_r);
  s.squeeze_varphi = r.number("squeeze_varphi", s.squeeze_varphi);
  s.dim = r.integer("dim", s.dim);
  return s;
}

void code_fields_json(Json& j, const CodeSpec& s) {
  j["N"] = s.N;
  j["alpha"] = s.alpha;
  j["squeeze_r"] = s.squeeze_r;
  j["squeeze_varphi"] = s.squeeze_varphi;
  j["dim"] = s.dim;
}

SearchSpace parse_search(JsonReader r) {
  SearchSpace s;
  s.alpha_in = r.range("alpha_in", s.alpha_in);
  s.alpha_anc = r.range("alpha_anc", s.alpha_anc);
  if (r.has("phi0_in")) s.phi0_in = r.range("phi0_in", {});
  if (r.has("phi0_anc")) s.phi0_anc = r.range("phi0_anc", {});
  s.squeeze_r = r.range("squeeze_r", s.squeeze_r);
  s.wait_mult = r.range("wait_mult", s.wait_mult);
  s.optimize_alpha = r.boolean("optimize_alpha", s.optimize_alpha);
  s.optimize_phi0 = r.boolean("optimize_phi0", s.optimize_phi0);
  s.squeeze = r.boolean("squeeze", s.squeeze);
  s.optimize_wait = r.boolean("optimize_wait", s.optimize_wait);
  r.finish();
  return s;
}

Json search_json(const SearchSpace& s, int N) {
  return Json{{"alpha_in", range_json(s.alpha_in)},
              {"alpha_anc", range_json(s.alpha_anc)},
              {"phi0_in", range_json(s.phi0_in_range(N))},
              {"phi0_anc", range_json(s.phi0_anc_range(N))},
              {"squeeze_r", range_json(s.squeeze_r)},
              {"wait_mult", range_json(s.wait_mult)},
              {"optimize_alpha", s.optimize_alpha},
              {"optimize_phi0", s.optimize_phi0},
              {"squeeze", s.squeeze},
              {"optimize_wait", s.optimize_wait}};
}

OptimBudget parse_budget(JsonReader r) {
  OptimBudget b;
  b.evaluations = r.integer("evaluations", b.evaluations);
  b.shots_per_eval = r.integer64("shots_per_eval", b.shots_per_eval);
  b.final_shots = r.integer64("final_shots", b.final_shots);
  b.grid_points = r.integer("grid_points", b.grid_points);
  r.finish();
  return b;
}

Json budget_json(const OptimBudget& b) {
  return Json{{"evaluations", b.evaluations},
              {"shots_per_eval", b.shots_per_eval},
              {"final_shots", b.final_shots},
              {"grid_points", b.grid_points}};
}

}  // namespace

TruncationPolicy parse_truncation(JsonReader r) {
  TruncationPolicy p;
  p.tail_mass_tol = r.number("tail_mass_tol", p.tail_mass_tol);
  p.min_dim = r.integer("min_dim", p.min_dim);
  p.growth_factor = r.number("growth_factor", p.growth_factor);
  r.finish();
  domain_checked([&] {
    p.validate();
    return 0;
  });
  return p;
}

Json to_json(const TruncationPolicy& p) {
  return Json{{"tail_mass_tol", p.tail_mass_tol}, {"min_dim", p.min_dim}, {"growth_factor", p.growth_factor}};
}

ExRecConfig parse_exrec_fields(JsonReader& r) {
  ExRecConfig c;
  c.gadget.scheme = domain_checked([&] { return parse_scheme(r.string("scheme", "hybrid")); });
  c.gadget.N = r.integer("N", c.gadget.N);
  c.gadget.M = r.integer("M", 0);
  c.gadget.input.alpha = r.number("alpha_in", c.gadget.input.alpha);
  c.gadget.ancilla.alpha = r.number("alpha_anc", c.gadget.ancilla.alpha);
  c.gadget.phi0_in = r.number("phi0_in", c.gadget.phi0_in);
  c.gadget.phi0_anc = r.number("phi0_anc", c.gadget.phi0_anc);
  const double sr = r.number("squeeze_r", 0.0);
  const double sv = r.number("squeeze_varphi", kPi / 2);
  c.gadget.input.squeeze_r = c.gadget.ancilla.squeeze_r = sr;
  c.gadget.input.squeeze_varphi = c.gadget.ancilla.squeeze_varphi = sv;
  c.gadget.dim_in = r.integer("dim_in", 0);
  c.gadget.dim_anc = r.integer("dim_anc", 0);
  c.op_noise.gamma_loss = r.number("gamma_loss_op", 0.0);
  c.op_noise.gamma_ph = r.number("gamma_ph_op", 0.0);
  c.wait_mult = r.number("wait_mult", c.wait_mult);
  c.shots = r.integer64("shots", c.shots);
  c.seed = r.u64("seed", c.seed);
  c.batches = r.integer("batches", c.batches);
  c.include_input_noise = r.boolean("include_input_noise", c.include_input_noise);
  c.truncation = parse_truncation(r.object("truncation"));
  c.gadget.M = c.gadget.ancilla_order();
  domain_checked([&] {
    c.validate();
    return 0;
  });
  return c;
}

Json exrec_fields_json(const ExRecConfig& c) {
  return Json{{"scheme", to_string(c.gadget.scheme)},
              {"N", c.gadget.N},
              {"M", c.gadget.ancilla_order()},
              {"alpha_in", c.gadget.input.alpha},
              {"alpha_anc", c.gadget.ancilla.alpha},
              {"phi0_in", c.gadget.phi0_in},
              {"phi0_anc", c.gadget.phi0_anc},
              {"squeeze_r", c.gadget.input.squeeze_r},
              {"squeeze_varphi", c.gadget.input.squeeze_varphi},
              {"dim_in", c.gadget.dim_in},
              {"dim_anc", c.gadget.dim_anc},
              {"gamma_loss_op", c.op_noise.gamma_loss},
              {"gamma_ph_op", c.op_noise.gamma_ph},
              {"wait_mult", c.wait_mult},
              {"shots", c.shots},
              {"seed", c.seed},
              {"batches", c.batches},
              {"include_input_noise", c.include_input_noise},
              {"truncation", to_json(c.truncation)}};
}

CodewordConfig parse_codeword_config(const Json& j) {
  JsonReader r(j, "config");
  CodewordConfig c;
  c.spec = parse_code_fields(r);
  c.truncation = parse_truncation(r.object("truncation"));
  c.seed = r.u64("seed", c.seed);
  r.finish();
  domain_checked([&] {
    c.spec.validate();
    return 0;
  });
  return c;
}

Json to_json(const CodewordConfig& c) {
  Json j;
  code_fields_json(j, c.spec);
  j["truncation"] = to_json(c.truncation);
  j["seed"] = c.seed;
  return j;
}

KLCheckConfig parse_kl_config(const Json& j) {
  JsonReader r(j, "config");
  KLCheckConfig c;
  c.base = parse_code_fields(r);
  c.alphas = r.numbers("alphas", c.alphas);
  c.theta_points = r.integer("theta_points", c.theta_points);
  c.k_values = r.integers("k_values", c.k_values);
  c.truncation = parse_truncation(r.object("truncation"));
  c.seed = r.u64("seed", c.seed);
  r.finish();
  if (c.alphas.empty()) throw ConfigError("config.alphas: must be nonempty");
  if (c.theta_points < 1) throw ConfigError("config.theta_points: must be >= 1");
  domain_checked([&] {
    c.base.validate();
    return 0;
  });
  return c;
}

Json to_json(const KLCheckConfig& c) {
  Json j;
  code_fields_json(j, c.base);
  j["alphas"] = c.alphas;
  j["theta_points"] = c.theta_points;
  j["k_values"] = c.k_values.empty() ? KLGrid::defaults(c.base.N, c.theta_points).k_values : c.k_values;
  j["truncation"] = to_json(c.truncation);
  j["seed"] = c.seed;
  return j;
}

MeasErrorConfig parse_meas_error_config(const Json& j) {
  JsonReader r(j, "config");
  MeasErrorConfig c;
  c.N_list = r.integers("N_list", c.N_list);
  c.alphas = r.numbers("alphas", c.alphas);
  c.r_list = r.numbers("r_list", c.r_list);
  c.phi0 = r.number("phi0", c.phi0);
  c.squeeze_varphi = r.number("squeeze_varphi", c.squeeze_varphi);
  c.truncation = parse_truncation(r.object("truncation"));
  c.seed = r.u64("seed", c.seed);
  r.finish();
  if (c.N_list.empty() || c.alphas.empty() || c.r_list.empty())
    throw ConfigError("config: N_list, alphas and r_list must be nonempty");
  for (int n : c.N_list)
    if (n < 1) throw ConfigError("config.N_list: entries must be >= 1");
  for (double a : c.alphas)
    if (!(a > 0.0)) throw ConfigError("config.alphas: entries must be > 0");
  for (double x : c.r_list)
    if (!(x >= 0.0)) throw ConfigError("config.r_list: entries must be >= 0");
  return c;
}

Json to_json(const MeasErrorConfig& c) {
  return Json{{"N_list", c.N_list},     {"alphas", c.alphas}, {"r_list", c.r_list},
              {"phi0", c.phi0},         {"squeeze_varphi", c.squeeze_varphi},
              {"truncation", to_json(c.truncation)}, {"seed", c.seed}};
}

FtCheckConfig parse_ft_config(const Json& j) {
  JsonReader r(j, "config");
  FtCheckConfig c;
  c.scheme = domain_checked([&] { return parse_scheme(r.string("scheme", "hybrid")); });
  c.N = r.integer("N", c.N);
  c.M = r.integer("M", 0);
  {
    JsonReader in = r.object("input");
    c.input.k = in.integer("k", 0);
    c.input.theta = in.number("theta", 0.0);
    in.finish();
  }
  if (r.has("pattern")) {
    const Json& arr = r.array("pattern");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      JsonReader e(arr[i], r.path("pattern") + "[" + std::to_string(i) + "]");
      if (!e.has("location")) throw ConfigError(e.path("location") + ": required");
      const int loc = e.integer("location", 0);
      if (loc == 0) throw ConfigError(e.path("location") + ": location 0 is the input; use config.input");
      SymbolicFault f{e.integer("k", 0), e.number("theta", 0.0)};
      e.finish();
      if (c.pattern.count(loc)) throw ConfigError(e.path("location") + ": duplicate location");
      c.pattern[loc] = f;
    }
  }
  c.exhaustive = r.boolean("exhaustive", c.exhaustive);
  c.k_values = r.integers("k_values", c.k_values);
  c.theta_values = r.numbers("theta_values", c.theta_values);
  c.audit = r.boolean("audit", c.audit);
  c.audit_M_values = r.integers("audit_M_values", c.audit_M_values);
  c.audit_max_weight = r.integer("audit_max_weight", c.audit_max_weight);
  c.seed = r.u64("seed", c.seed);
  r.finish();
  domain_checked([&] {
    FaultPattern full = c.pattern;
    full[0] = c.input;
    validate_pattern(c.scheme, c.N, c.resolved_M(), full);
    return 0;
  });
  if (c.k_values.empty() || c.theta_values.empty()) throw ConfigError("config: k_values and theta_values must be nonempty");
  return c;
}

Json to_json(const FtCheckConfig& c) {
  Json pattern = Json::array();
  for (const auto& [loc, f] : c.pattern) pattern.push_back(Json{{"location", loc}, {"k", f.k}, {"theta", f.theta}});
  return Json{{"scheme", to_string(c.scheme)},
              {"N", c.N},
              {"M", c.resolved_M()},
              {"input", Json{{"k", c.input.k}, {"theta", c.input.theta}}},
              {"pattern", pattern},
              {"exhaustive", c.exhaustive},
              {"k_values", c.k_values},
              {"theta_values", c.theta_values},
              {"audit", c.audit},
              {"audit_M_values", c.audit_M_values},
              {"audit_max_weight", c.audit_max_weight},
              {"seed", c.seed}};
}

ExRecRunConfig parse_exrec_config(const Json& j) {
  JsonReader r(j, "config");
  ExRecRunConfig c;
  c.exrec = parse_exrec_fields(r);
  c.bootstrap_resamples = r.integer("bootstrap_resamples", c.bootstrap_resamples);
  r.finish();
  if (c.bootstrap_resamples < 0) throw ConfigError("config.bootstrap_resamples: must be >= 0");
  return c;
}

Json to_json(const ExRecRunConfig& c) {
  Json j = exrec_fields_json(c.exrec);
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  return j;
}

SweepConfig parse_sweep_config(const Json& j) {
  JsonReader r(j, "config");
  SweepConfig c;
  c.base = parse_exrec_fields(r);
  c.gamma_loss_list = r.numbers("gamma_loss_list", c.gamma_loss_list);
  c.gamma_ph_list = r.numbers("gamma_ph_list", c.gamma_ph_list);
  c.search = parse_search(r.object("search"));
  c.budget = parse_budget(r.object("budget"));
  r.finish();
  if (c.gamma_loss_list.empty() || c.gamma_ph_list.empty())
    throw ConfigError("config: gamma_loss_list and gamma_ph_list must be nonempty");
  for (double g : c.gamma_loss_list)
    if (!(g >= 0.0)) throw ConfigError("config.gamma_loss_list: entries must be >= 0");
  for (double g : c.gamma_ph_list)
    if (!(g >= 0.0)) throw ConfigError("config.gamma_ph_list: entries must be >= 0");
  domain_checked([&] {
    c.search.validate();
    c.budget.validate();
    return 0;
  });
  return c;
}

Json to_json(const SweepConfig& c) {
  Json j = exrec_fields_json(c.base);
  j.erase("gamma_loss_op");
  j.erase("gamma_ph_op");
  j["gamma_loss_list"] = c.gamma_loss_list;
  j["gamma_ph_list"] = c.gamma_ph_list;
  j["search"] = search_json(c.search, c.base.gadget.N);
  j["budget"] = budget_json(c.budget);
  return j;
}

BreakevenConfig parse_breakeven_config(const Json& j) {
  JsonReader r(j, "config");
  BreakevenConfig c;
  c.base = parse_exrec_fields(r);
  c.gamma_ph_list = r.numbers("gamma_ph_list", c.gamma_ph_list);
  c.bracket = r.range("bracket", c.bracket);
  c.search = parse_search(r.object("search"));
  c.budget = parse_budget(r.object("budget"));
  r.finish();
  if (c.gamma_ph_list.empty()) throw ConfigError("config.gamma_ph_list: must be nonempty");
  if (!(c.bracket.lo > 0.0) || !(c.bracket.hi > c.bracket.lo))
    throw ConfigError("config.bracket: needs 0 < lo < hi");
  domain_checked([&] {
    c.search.validate();
    c.budget.validate();
    return 0;
  });
  return c;
}

Json to_json(const BreakevenConfig& c) {
  Json j = exrec_fields_json(c.base);
  j.erase("gamma_loss_op");
  j.erase("gamma_ph_op");
  j["gamma_ph_list"] = c.gamma_ph_list;
  j["bracket"] = range_json(c.bracket);
  j["search"] = search_json(c.search, c.base.gadget.N);
  j["budget"] = budget_json(c.budget);
  return j;
}

}  // namespace catft
