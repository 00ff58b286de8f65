#include "catft/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "catft/phase_meas.hpp"

namespace catft {

namespace {

void progress(const RunOptions& o, const std::string& msg) {
  if (o.progress) *o.progress << msg << std::endl;
}

Json amplitudes_json(const FockVector& v) {
  Json a = Json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(Json::array({v.amplitudes()[i].real(), v.amplitudes()[i].imag()}));
  return a;
}

Json pattern_json(const FaultPattern& p) {
  Json a = Json::array();
  for (const auto& [loc, f] : p) a.push_back(Json{{"location", loc}, {"k", f.k}, {"theta", f.theta}});
  return a;
}

Json mode_json(const ModeError& m) { return Json{{"k", m.k}, {"theta", m.theta}}; }

Json verdict_json(const EcftVerdict& v) {
  return Json{{"hypothesis", v.hypothesis},
              {"conclusion", v.conclusion},
              {"satisfied", v.satisfied},
              {"reasons", v.reasons},
              {"k_hat", v.k_hat},
              {"propagated",
               Json{{"I", mode_json(v.prop.I)},
                    {"A", mode_json(v.prop.A)},
                    {"O", mode_json(v.prop.O)},
                    {"r", v.prop.r},
                    {"theta_f", v.prop.theta_f},
                    {"theta_s", v.prop.theta_s},
                    {"theta_r", v.prop.theta_r}}}};
}

Json optional_int(const std::optional<int>& x) { return x ? Json(*x) : Json(nullptr); }

void write_json(std::ostream& out, const std::string& name, std::uint64_t seed, const Json& config, Json result) {
  Json doc{{"command", name}, {"seed", seed}, {"config", config}, {"result", std::move(result)}};
  out << doc.dump(2) << "\n";
}

void write_csv_preamble(std::ostream& out, const std::string& name, std::uint64_t seed, const Json& config) {
  out << "# command: " << name << "\n# seed: " << seed << "\n# config: " << config.dump() << "\n";
}

void cmd_codeword(const Json& raw, const RunOptions&, std::ostream& out) {
  const CodewordConfig c = parse_codeword_config(raw);
  const Codewords cw = make_codewords(c.spec, c.truncation);
  Json r{{"dim", cw.dim},
         {"norm0", cw.norm0},
         {"norm1", cw.norm1},
         {"squeezing_db", c.spec.squeezing_db()},
         {"ket0", amplitudes_json(cw.ket0)},
         {"ket1", amplitudes_json(cw.ket1)},
         {"plus", amplitudes_json(cw.plus)},
         {"minus", amplitudes_json(cw.minus)}};
  write_json(out, "codeword", c.seed, to_json(c), std::move(r));
}

void cmd_kl(const Json& raw, const RunOptions& o, std::ostream& out) {
  const KLCheckConfig c = parse_kl_config(raw);
  KLGrid grid = KLGrid::defaults(c.base.N, c.theta_points);
  if (!c.k_values.empty()) grid.k_values = c.k_values;
  progress(o, "kl-check: " + std::to_string(c.alphas.size()) + " alpha values");
  const KLReport rep = kl_violation(c.base, c.alphas, grid, c.truncation);
  Json r{{"alphas", rep.alphas},
         {"violations", rep.violations},
         {"offdiag", rep.offdiag},
         {"fitted_decay_rate", rep.fitted_decay_rate},
         {"fit_intercept", rep.fit_intercept},
         {"fit_r2", rep.fit_r2}};
  write_json(out, "kl-check", c.seed, to_json(c), std::move(r));
}

void cmd_meas_error(const Json& raw, const RunOptions& o, std::ostream& out) {
  const MeasErrorConfig c = parse_meas_error_config(raw);
  write_csv_preamble(out, "meas-error", c.seed, to_json(c));
  out << "N,alpha,r,p_err\n";
  for (int N : c.N_list)
    for (double r : c.r_list)
      for (double a : c.alphas) {
        progress(o, "meas-error: N=" + std::to_string(N) + " alpha=" + format_real(a) + " r=" + format_real(r));
        const double p = xbar_error_prob(N, a, r, 0, c.phi0, c.truncation, c.squeeze_varphi);
        out << N << "," << format_real(a) << "," << format_real(r) << "," << format_real(p) << "\n";
      }
}

void cmd_ft(const Json& raw, const RunOptions& o, std::ostream& out) {
  const FtCheckConfig c = parse_ft_config(raw);
  const int M = c.resolved_M();
  Json r{{"verdict", verdict_json(ecft_check(c.scheme, c.N, M, c.input, c.pattern))}};
  if (c.exhaustive) {
    progress(o, "ft-check: exhaustive enumeration");
    const ExhaustiveReport e = exhaustive_check(c.scheme, c.N, M, c.k_values, c.theta_values);
    r["exhaustive"] = Json{{"patterns", e.patterns},
                           {"hypothesis_held", e.hypothesis_held},
                           {"violations", e.violations},
                           {"first_violation", e.first_violation ? pattern_json(*e.first_violation) : Json(nullptr)}};
  }
  if (c.audit) {
    progress(o, "ft-check: ancilla-order audit");
    Json rows = Json::array();
    for (const AuditRow& a : ancilla_order_audit(c.scheme, c.N, c.audit_M_values, c.audit_max_weight))
      rows.push_back(Json{{"M", a.M},
                          {"breaking_weight", optional_int(a.breaking_weight)},
                          {"ancilla_only_breaking_weight", optional_int(a.ancilla_only_breaking_weight)},
                          {"example", pattern_json(a.example)},
                          {"reasons", a.reasons}});
    r["audit"] = rows;
  }
  write_json(out, "ft-check", c.seed, to_json(c), std::move(r));
}

void cmd_exrec(const Json& raw, const RunOptions& o, std::ostream& out) {
  const ExRecRunConfig c = parse_exrec_config(raw);
  progress(o, "exrec: " + std::to_string(c.exrec.shots) + " shots");
  const double bm = wait_benchmark(c.exrec);
  const FidelityReport f = fidelity_report(run_exrec(c.exrec, o.threads), bm, c.bootstrap_resamples, c.exrec.seed);
  Json r{{"F_ent", f.f_ent},
         {"inF", f.inf},
         {"inF_stderr", f.standard_error},
         {"inF_bm", f.inf_bm},
         {"R", f.ratio ? Json(*f.ratio) : Json(nullptr)},
         {"R_stderr", f.ratio ? Json(f.ratio_stderr) : Json(nullptr)},
         {"shots", f.shots}};
  write_json(out, "exrec", c.exrec.seed, to_json(c), std::move(r));
}

void cmd_sweep(const Json& raw, const RunOptions& o, std::ostream& out) {
  const SweepConfig c = parse_sweep_config(raw);
  std::vector<std::string> rows, hist;
  const std::size_t total = c.gamma_loss_list.size() * c.gamma_ph_list.size();
  std::size_t done = 0;
  for (double gl : c.gamma_loss_list)
    for (double gp : c.gamma_ph_list) {
      progress(o, "sweep: point " + std::to_string(++done) + "/" + std::to_string(total) + " gamma_loss=" +
                      format_real(gl) + " gamma_ph=" + format_real(gp));
      const SweepPoint p = optimize_point({gl, gp}, c.base, c.search, c.budget, o.threads);
      rows.push_back(format_csv_row(
          csv_row(p.best_params, gl, gp, p.best_R, p.R_stderr, p.inF, p.inF_bm, p.shots)));
      for (const Evaluation& e : p.history)
        hist.push_back(format_csv_row(csv_row(e.params, gl, gp, e.R, e.R_stderr, e.inF, wait_benchmark(e.params),
                                              e.params.shots)));
    }
  const Json echo = to_json(c);
  write_csv_preamble(out, "sweep", c.base.seed, echo);
  out << csv_header() << "\n";
  for (const auto& r : rows) out << r << "\n";
  if (o.history) {
    write_csv_preamble(*o.history, "sweep-history", c.base.seed, echo);
    *o.history << csv_header() << "\n";
    for (const auto& r : hist) *o.history << r << "\n";
  }
}

void cmd_breakeven(const Json& raw, const RunOptions& o, std::ostream& out) {
  const BreakevenConfig c = parse_breakeven_config(raw);
  std::vector<BoundaryPoint> pts;
  for (std::size_t i = 0; i < c.gamma_ph_list.size(); ++i) {
    progress(o, "breakeven: gamma_ph " + std::to_string(i + 1) + "/" + std::to_string(c.gamma_ph_list.size()) +
                    " = " + format_real(c.gamma_ph_list[i]));
    pts.push_back(
        breakeven_search(c.gamma_ph_list[i], c.base, c.search, c.budget, c.bracket.lo, c.bracket.hi, o.threads));
  }
  write_csv_preamble(out, "breakeven", c.base.seed, to_json(c));
  // gamma_loss is the boundary estimate; nan marks no sign change in the bracket
  for (const BoundaryPoint& b : pts)
    out << "# boundary gamma_ph=" << format_real(b.gamma_ph) << " in_range=" << (b.in_range ? "true" : "false")
        << " bracket=[" << format_real(b.bracket_lo) << "," << format_real(b.bracket_hi) << "]\n";
  out << csv_header() << "\n";
  for (const BoundaryPoint& b : pts) {
    const SweepPoint& p = b.point;
    out << format_csv_row(csv_row(p.best_params, b.gamma_loss_star, b.gamma_ph, p.best_R, p.R_stderr, p.inF,
                                  p.inF_bm, p.shots))
        << "\n";
  }
}

using Handler = std::function<void(const Json&, const RunOptions&, std::ostream&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{{"codeword", cmd_codeword}, {"kl-check", cmd_kl},
                                                {"meas-error", cmd_meas_error}, {"ft-check", cmd_ft},
                                                {"exrec", cmd_exrec},         {"sweep", cmd_sweep},
                                                {"breakeven", cmd_breakeven}};
  return h;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> n{"codeword", "kl-check", "meas-error", "ft-check",
                                          "exrec",    "sweep",    "breakeven"};
  return n;
}

void run_subcommand(const std::string& name, const Json& config, const RunOptions& opts, std::ostream& out) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw ConfigError("unknown subcommand '" + name + "'");
  Json cfg = config.is_null() ? Json::object() : config;
  if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
  if (opts.seed) cfg["seed"] = *opts.seed;
  it->second(cfg, opts, out);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const TruncationError*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e))
    return 2;
  if (dynamic_cast<const DegenerateError*>(&e)) return 3;
  return 1;
}

const std::string& csv_header() {
  static const std::string h =
      "scheme,N,M,gamma_loss,gamma_ph,wait_mult,alpha_in,alpha_anc,phi0_in,phi0_anc,squeeze_r,R,R_stderr,inF,"
      "inF_bm,shots,seed";
  return h;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

CsvRow csv_row(const ExRecConfig& p, double gamma_loss, double gamma_ph, double R, double R_stderr, double inF,
               double inF_bm, long shots) {
  CsvRow r;
  r.scheme = p.gadget.scheme;
  r.N = p.gadget.N;
  r.M = p.gadget.ancilla_order();
  r.gamma_loss = gamma_loss;
  r.gamma_ph = gamma_ph;
  r.wait_mult = p.wait_mult;
  r.alpha_in = p.gadget.input.alpha;
  r.alpha_anc = p.gadget.ancilla.alpha;
  r.phi0_in = p.gadget.phi0_in;
  r.phi0_anc = p.gadget.phi0_anc;
  r.squeeze_r = p.gadget.input.squeeze_r;
  r.R = R;
  r.R_stderr = R_stderr;
  r.inF = inF;
  r.inF_bm = inF_bm;
  r.shots = shots;
  r.seed = p.seed;
  return r;
}

std::string format_csv_row(const CsvRow& r) {
  std::string s = to_string(r.scheme) + "," + std::to_string(r.N) + "," + std::to_string(r.M);
  for (double x : {r.gamma_loss, r.gamma_ph, r.wait_mult, r.alpha_in, r.alpha_anc, r.phi0_in, r.phi0_anc,
                   r.squeeze_r, r.R, r.R_stderr, r.inF, r.inF_bm})
    s += "," + format_real(x);
  s += "," + std::to_string(r.shots) + "," + std::to_string(r.seed);
  return s;
}

}  // namespace catft
