#include "qcap/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qcap/capacity.hpp"
#include "qcap/selftest.hpp"
#include "qcap/semicontinuity.hpp"

namespace qcap::cli {

namespace {

using io::json;

constexpr double kIdentityThreshold = 1e-8;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {
      "entropy",          "chi",         "disturbance", "verify-identity", "chi-capacity",
      "ea-capacity",      "gap",         "coherent-info", "sweep-truncation", "sweep-appendix",
      "gibbs",            "gaussian-classify", "selftest"};
  return names;
}

struct Units {
  bool bits = false;
  double operator()(double nats) const { return bits ? nats / std::log(2.0) : nats; }
};

class Context {
 public:
  explicit Context(const RunConfig& c) : cfg_(c), units_{c.unit == "bits"} {
    if (c.unit != "nats" && c.unit != "bits") throw ValidationError("--unit must be nats or bits");
    if (c.format != "json" && c.format != "csv") throw ValidationError("--format must be json or csv");
    load_config();
    for (const std::string& kv : c.tol) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--tol expects key=val, got \"" + kv + "\"");
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(kv.substr(eq + 1), &used);
        if (used != kv.size() - eq - 1) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ValidationError("--tol value is not a number in \"" + kv + "\"");
      }
      tol_.set(kv.substr(0, eq), v);
    }
    opts_.tol = tol_;
    opts_.seed = c.seed;
    opts_.parallel = c.parallel;
    if (c.restarts) {
      if (*c.restarts < 1) throw ValidationError("--restarts must be at least 1");
      opts_.restarts = *c.restarts;
    }
  }

  const Tolerances& tol() const { return tol_; }
  const OptimizerOptions& opts() const { return opts_; }
  const Units& units() const { return units_; }
  json& inputs() { return inputs_; }
  const json& config_echo() const { return config_echo_; }

  KrausChannel channel(const std::optional<std::string>& arg, const char* flag, const char* key) {
    const std::string& a = require(arg, flag);
    KrausChannel phi = io::channel_from_argument(a, cfg_.seed, tol_);
    inputs_[key] = {{"source", a}, {"value", io::to_json(phi)}};
    return phi;
  }
  KrausChannel channel() { return channel(cfg_.channel, "--channel", "channel"); }

  Ensemble ensemble() {
    const std::string& a = require(cfg_.ensemble, "--ensemble");
    Ensemble mu = io::parse_ensemble(io::Source::from_file(a), tol_);
    inputs_["ensemble"] = {{"source", a}, {"value", io::to_json(mu)}};
    return mu;
  }

  Hamiltonian hamiltonian() {
    const std::string& a = require(cfg_.hamiltonian, "--hamiltonian");
    Hamiltonian h = io::parse_hamiltonian(io::Source::from_file(a), tol_);
    inputs_["hamiltonian"] = {{"source", a}, {"value", io::to_json(h.matrix())}};
    return h;
  }

  double energy() {
    if (!cfg_.energy) throw ValidationError("--energy is required for " + cfg_.command);
    if (!std::isfinite(*cfg_.energy)) throw ValidationError("--energy must be finite");
    inputs_["energy"] = *cfg_.energy;
    return *cfg_.energy;
  }

  ConstraintSpec constraint() {
    Hamiltonian h = hamiltonian();
    return ConstraintSpec(std::move(h), energy());
  }

  DensityMatrix state() {
    const std::string& a = require(cfg_.state, "--state");
    DensityMatrix rho = io::parse_state(io::Source::from_file(a), tol_);
    inputs_["state"] = {{"source", a}, {"value", io::to_json(rho.matrix())}};
    return rho;
  }

  std::optional<KrausChannel> degrading() {
    if (!cfg_.degrading) return std::nullopt;
    return channel(cfg_.degrading, "--degrading", "degrading");
  }

  const std::string& require(const std::optional<std::string>& v, const char* flag) const {
    if (!v) throw ValidationError(std::string(flag) + " is required for " + cfg_.command);
    return *v;
  }

 private:
  void load_config() {
    std::string path;
    if (cfg_.config) {
      path = *cfg_.config;
    } else if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
      path = env;
    }
    if (path.empty()) return;
    const io::Source src = io::Source::from_file(path);
    io::check_schema(src);
    const io::Node root(src);
    config_echo_ = {{"source", path}};
    if (auto numerics = root.find("numerics")) {
      if (auto tols = numerics->find("tolerances")) {
        if (!tols->value().is_object()) tols->fail("expected an object");
        for (const auto& item : tols->value().items()) {
          const io::Node n = tols->at(item.key());
          try {
            tol_.set(item.key(), n.number());
          } catch (const io::SchemaError&) {
            throw;
          } catch (const ValidationError& e) {
            n.fail(e.what());
          }
        }
      }
    }
    if (auto opt = root.find("optimizer")) {
      if (auto r = opt->find("restarts")) opts_.restarts = r->integer();
      if (auto m = opt->find("max_iterations")) opts_.max_iterations = m->integer();
      if (auto p = opt->find("probe_restarts")) opts_.probe_restarts = p->integer();
    }
  }

  const RunConfig& cfg_;
  Units units_;
  Tolerances tol_;
  OptimizerOptions opts_;
  json inputs_ = json::object();
  json config_echo_;
};

json certificate_json(const OptimalityCertificate& c, const Units& u) {
  json out = {{"lagrangian_gap", u(c.lagrangian_gap)},
              {"slackness_residual", u(c.slackness_residual)},
              {"member_residual", u(c.member_residual)},
              {"probe_restarts", c.n_probe_restarts},
              {"passed", c.passed}};
  if (c.violating_state) out["violating_state"] = io::to_json(*c.violating_state);
  return out;
}

json capacity_json(const CapacityResult& r, const Units& u) {
  json out = {{"value", u(r.value)},
              {"multiplier", r.multiplier},
              {"iterations", r.iterations},
              {"best_restart", r.best_restart},
              {"converged", r.converged},
              {"certificate", certificate_json(r.certificate, u)}};
  if (r.ensemble) out["ensemble"] = io::to_json(*r.ensemble);
  if (r.state) out["state"] = io::to_json(r.state->matrix());
  return out;
}

json cq_json(const CqCheck& c) { return {{"is_cq", c.is_cq}, {"residual", c.residual}}; }

std::vector<int> ints(const std::vector<int>& v, const char* flag, const std::string& cmd) {
  if (v.empty()) throw ValidationError(std::string(flag) + " is required for " + cmd);
  return v;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string render_csv(const Table& t) {
  std::ostringstream s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s << (i ? "," : "") << t.columns[i];
  s << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i].dump();
    s << '\n';
  }
  return s.str();
}

/// Scalar entries of `result` as key,value lines (nested keys joined with '.').
void flatten(const json& j, const std::string& prefix, Table& t) {
  if (j.is_object()) {
    for (const auto& item : j.items())
      flatten(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), t);
  } else if (j.is_primitive()) {
    t.rows.push_back({json(prefix), j});
  }
}

struct CommandResult {
  CommandResult(json r, int code = kExitOk, std::optional<Table> t = std::nullopt)
      : result(std::move(r)), exit_code(code), table(std::move(t)) {}

  json result;
  int exit_code;
  std::optional<Table> table;
};

CommandResult cmd_entropy(Context& ctx) {
  const DensityMatrix rho = ctx.state();
  return {{{"entropy", ctx.units()(von_neumann_entropy(rho, ctx.tol()))}}};
}

CommandResult cmd_chi(Context& ctx, const RunConfig& c) {
  const Ensemble mu = ctx.ensemble();
  const Units& u = ctx.units();
  json r = {{"chi", u(chi_quantity(mu, ctx.tol()))}};
  if (c.channel) {
    const KrausChannel phi = ctx.channel();
    const PrivateInformation p = private_information(phi, mu, ctx.tol());
    r["chi_output"] = u(p.chi_output);
    r["chi_environment"] = u(p.chi_environment);
    r["private_information"] = u(p.value);
  }
  return {r};
}

CommandResult cmd_disturbance(Context& ctx) {
  const KrausChannel phi = ctx.channel();
  const Ensemble mu = ctx.ensemble();
  const Units& u = ctx.units();
  const double chi_in = chi_quantity(mu, ctx.tol());
  const double chi_out = chi_quantity(image(phi, mu, ctx.tol()), ctx.tol());
  const double value = entropic_disturbance(phi, mu, ctx.tol());
  const double bound =
      std::min(std::log(double(phi.dim_in())), 2.0 * std::log(double(phi.choi_rank(ctx.tol()))));
  return {{{"value", u(value)},
           {"chi_input", u(chi_in)},
           {"chi_output", u(chi_out)},
           {"upper_bound", u(bound)},
           {"environment_dim", phi.choi_rank(ctx.tol())}}};
}

CommandResult cmd_verify_identity(Context& ctx) {
  const KrausChannel phi = ctx.channel();
  const Ensemble mu = ctx.ensemble();
  const Units& u = ctx.units();
  const DisturbanceIdentity d = verify_disturbance_identity(phi, mu, ctx.tol());
  const bool ok = d.residual <= kIdentityThreshold;
  return {{{"chi_input", u(d.chi_input)},
           {"mi_average", u(d.mi_average)},
           {"chi_output", u(d.chi_output)},
           {"chi_environment", u(d.chi_environment)},
           {"mi_members", u(d.mi_members)},
           {"lhs", u(d.lhs)},
           {"rhs", u(d.rhs)},
           {"residual", u(d.residual)},
           {"threshold", u(kIdentityThreshold)},
           {"passed", ok}},
          ok ? kExitOk : kExitValidation};
}

CommandResult cmd_chi_capacity(Context& ctx) {
  const KrausChannel phi = ctx.channel();
  const ConstraintSpec c = ctx.constraint();
  const CapacityResult r = chi_capacity(phi, c, ctx.opts());
  return {capacity_json(r, ctx.units()), r.converged ? kExitOk : kExitNotConverged};
}

CommandResult cmd_ea_capacity(Context& ctx) {
  const KrausChannel phi = ctx.channel();
  const ConstraintSpec c = ctx.constraint();
  const CapacityResult r = ea_capacity(phi, c, ctx.opts());
  return {capacity_json(r, ctx.units()), r.converged ? kExitOk : kExitNotConverged};
}

CommandResult cmd_gap(Context& ctx) {
  const KrausChannel phi = ctx.channel();
  const ConstraintSpec c = ctx.constraint();
  const auto theta = ctx.degrading();
  const GapReport g = capacity_gap(phi, c, ctx.opts(), theta);
  const Units& u = ctx.units();
  const GapConditions& k = g.conditions;
  json cond = {{"transitive_min", k.transitive_min},
               {"transitive", k.transitive},
               {"cq_hamiltonian_basis", cq_json(k.cq_hamiltonian_basis)},
               {"cq_canonical_basis", cq_json(k.cq_canonical_basis)},
               {"discrete_cq", k.discrete_cq},
               {"cq_bases_tested", json::array({"hamiltonian", "canonical"})},
               {"degradable", k.degradable ? json(*k.degradable) : json(nullptr)},
               {"degradable_source", k.degradable_source},
               {"eigenpair_coherence", k.eigenpair_coherence},
               {"optimizer_min_eigenvalue", k.optimizer_min_eigenvalue},
               {"full_rank_optimizer", k.full_rank_optimizer}};
  json r = {{"chi_capacity", capacity_json(g.chi, u)},
            {"ea_capacity", capacity_json(g.ea, u)},
            {"gap", u(g.gap)},
            {"conditions", cond},
            {"triggered", g.triggered},
            {"verdict", g.triggered.empty() ? "no conclusion" : "gap>0 guaranteed"}};
  return {r, g.chi.converged && g.ea.converged ? kExitOk : kExitNotConverged};
}

CommandResult cmd_coherent_info(Context& ctx) {
  const KrausChannel phi = ctx.channel();
  const DensityMatrix rho = ctx.state();
  const auto theta = ctx.degrading();
  const Units& u = ctx.units();
  const double direct = coherent_information(phi, rho, ctx.tol());
  const CoherentInfoRoutes routes = ci_via_chi(phi, rho, theta, ctx.tol());
  json r = {{"value", u(direct)},
            {"via_chi", u(routes.value)},
            {"chi_output", u(routes.chi_output)},
            {"chi_environment", u(routes.chi_environment)},
            {"route_difference", u(std::abs(direct - routes.value))}};
  if (routes.degrading_disturbance) r["degrading_disturbance"] = u(*routes.degrading_disturbance);
  return {r};
}

CommandResult cmd_sweep_truncation(Context& ctx, const RunConfig& c) {
  if (c.dims.size() != 2) throw ValidationError("--dims expects d_B,d_E for sweep-truncation");
  const Ensemble mu = ctx.ensemble();
  const std::vector<int> ranks = ints(c.ranks, "--ranks", c.command);
  ctx.inputs()["dims"] = c.dims;
  ctx.inputs()["ranks"] = ranks;
  const SweepReport s = truncation_sweep(mu, c.dims[0], c.dims[1], ranks, std::nullopt, ctx.tol());
  const Units& u = ctx.units();
  Table t{{"n", "dim", "chi_n", "chi_limit", "residual"}, {}};
  json rows = json::array();
  for (const SweepRow& row : s.rows) {
    rows.push_back({{"n", row.n},
                    {"dim", row.dim},
                    {"chi_n", u(row.chi_n)},
                    {"chi_limit", u(row.chi_limit)},
                    {"delta", u(row.delta)},
                    {"residual", u(row.residual)}});
    t.rows.push_back({row.n, row.dim, u(row.chi_n), u(row.chi_limit), u(row.residual)});
  }
  return {{{"rows", rows},
           {"monotone", s.monotone},
           {"dominated", s.dominated},
           {"converged", s.converged},
           {"note", kWitnessNote}},
          kExitOk,
          t};
}

CommandResult cmd_sweep_appendix(Context& ctx, const RunConfig& c) {
  const KrausChannel phi = ctx.channel();
  const Ensemble mu = ctx.ensemble();
  const std::vector<int> rb = ints(c.ranks_b, "--ranks-b", c.command);
  const std::vector<int> re = ints(c.ranks_e, "--ranks-e", c.command);
  ctx.inputs()["ranks_b"] = rb;
  ctx.inputs()["ranks_e"] = re;
  const AppendixReport a = appendix_identity_sweep(phi, mu, rb, re, ctx.tol());
  const Units& u = ctx.units();
  Table t{{"n_b", "n_e", "dim", "chi_n", "chi_limit", "lhs", "rhs", "residual"}, {}};
  const double limit = chi_quantity(mu, ctx.tol());
  json rows = json::array();
  for (const AppendixRow& row : a.rows) {
    rows.push_back({{"n_b", row.n_b},
                    {"n_e", row.n_e},
                    {"chi_joint", u(row.chi_joint)},
                    {"mi_average", u(row.mi_average)},
                    {"chi_output", u(row.chi_output)},
                    {"chi_environment", u(row.chi_environment)},
                    {"mi_members", u(row.mi_members)},
                    {"lhs", u(row.lhs)},
                    {"rhs", u(row.rhs)},
                    {"residual", u(row.residual)},
                    {"mi_monotone", row.mi_monotone}});
    t.rows.push_back({row.n_b, row.n_e, row.n_b * row.n_e, u(row.chi_joint), u(limit), u(row.lhs),
                      u(row.rhs), u(row.residual)});
  }
  json r = {{"rows", rows},
            {"chi_input", u(limit)},
            {"max_residual", u(a.max_residual)},
            {"mi_monotone", a.mi_monotone},
            {"limit_matches", a.limit_matches ? json(*a.limit_matches) : json(nullptr)}};
  const bool ok = a.max_residual <= kIdentityThreshold;
  return {r, ok ? kExitOk : kExitValidation, t};
}

CommandResult cmd_gibbs(Context& ctx) {
  const Hamiltonian h = ctx.hamiltonian();
  const GibbsResult g = gibbs_state(h, ctx.energy(), ctx.tol());
  return {{{"multiplier", g.multiplier},
           {"energy", g.energy},
           {"entropy", ctx.units()(von_neumann_entropy(g.state, ctx.tol()))},
           {"state", io::to_json(g.state.matrix())}}};
}

CommandResult cmd_gaussian_classify(Context& ctx, const RunConfig& c) {
  const std::string& path = ctx.require(c.gaussian, "--gaussian");
  const io::Source src = io::Source::from_file(path);
  const GaussianChannelSpec spec = io::parse_gaussian(src, ctx.tol());
  const bool degradable = c.degradable || io::gaussian_degradable_flag(src);
  ctx.inputs()["gaussian"] = {{"source", path}, {"value", src.root()}};
  ctx.inputs()["degradable"] = degradable;
  const GaussianValidity v = validate(spec, ctx.tol());
  json r = {{"valid", v.valid}, {"min_eig_minus", v.min_eig_minus}, {"min_eig_plus", v.min_eig_plus}};
  if (!v.valid) return {r, kExitValidation};
  const GapClassification g = classify_gap(spec, degradable, ctx.tol());
  r["triggers"] = g.triggers;
  r["verdict"] = g.verdict;
  r["rank_k"] = g.rank_k;
  r["full_rank_optimizer"] = g.full_rank_optimizer;
  return {r};
}

CommandResult cmd_selftest(const RunConfig& c) {
  const std::vector<SelfCheck> checks = run_selftest(static_cast<unsigned>(c.seed));
  json list = json::array();
  bool ok = true;
  for (const SelfCheck& s : checks) {
    list.push_back({{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
    ok = ok && s.passed;
  }
  return {{{"checks", list}, {"passed", ok}}, ok ? kExitOk : kExitValidation};
}

CommandResult dispatch(Context& ctx, const RunConfig& c) {
  const std::string& k = c.command;
  if (k == "entropy") return cmd_entropy(ctx);
  if (k == "chi") return cmd_chi(ctx, c);
  if (k == "disturbance") return cmd_disturbance(ctx);
  if (k == "verify-identity") return cmd_verify_identity(ctx);
  if (k == "chi-capacity") return cmd_chi_capacity(ctx);
  if (k == "ea-capacity") return cmd_ea_capacity(ctx);
  if (k == "gap") return cmd_gap(ctx);
  if (k == "coherent-info") return cmd_coherent_info(ctx);
  if (k == "sweep-truncation") return cmd_sweep_truncation(ctx, c);
  if (k == "sweep-appendix") return cmd_sweep_appendix(ctx, c);
  if (k == "gibbs") return cmd_gibbs(ctx);
  if (k == "gaussian-classify") return cmd_gaussian_classify(ctx, c);
  if (k == "selftest") return cmd_selftest(c);
  throw ValidationError("unknown command \"" + k + "\"");
}

}  // namespace

Outcome execute(const RunConfig& config) {
  Context ctx(config);
  CommandResult res = dispatch(ctx, config);
  Outcome out;
  out.exit_code = res.exit_code;
  out.report = {{"schema", io::kSchemaVersion},
                {"command", config.command},
                {"unit", config.unit},
                {"seed", config.seed},
                {"tolerances", io::to_json(ctx.tol())},
                {"inputs", ctx.inputs()},
                {"result", res.result}};
  if (!ctx.config_echo().is_null()) out.report["config"] = ctx.config_echo();
  if (config.command == "chi-capacity" || config.command == "ea-capacity" || config.command == "gap")
    out.report["optimizer"] = {{"restarts", ctx.opts().restarts},
                               {"max_iterations", ctx.opts().max_iterations},
                               {"probe_restarts", ctx.opts().probe_restarts}};
  if (config.format == "csv") {
    if (res.table) {
      out.rendered = render_csv(*res.table);
    } else {
      Table t{{"key", "value"}, {}};
      flatten(res.result, "", t);
      out.rendered = render_csv(t);
    }
  } else {
    out.rendered = out.report.dump(2) + "\n";
  }
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Outcome o = execute(config);
    if (config.out) {
      std::ofstream f(*config.out, std::ios::binary);
      if (!f) throw ValidationError("cannot write " + *config.out);
      f << o.rendered;
    } else {
      out << o.rendered;
    }
    if (o.exit_code == kExitNotConverged) err << "warning: optimization did not converge\n";
    if (o.exit_code == kExitValidation) err << "error: verification failed\n";
    return o.exit_code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 1;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic characteristics of finite-dimensional quantum channels", "qcap"};
  app.require_subcommand(1, 1);
  RunConfig cfg;
  const std::map<std::string, std::string> help = {
      {"entropy", "von Neumann entropy of --state"},
      {"chi", "chi-quantity of --ensemble, and of its image under --channel"},
      {"disturbance", "entropic disturbance of --ensemble under --channel"},
      {"verify-identity", "both sides of the disturbance identity"},
      {"chi-capacity", "energy-constrained chi-capacity with optimality certificate"},
      {"ea-capacity", "energy-constrained entanglement-assisted capacity"},
      {"gap", "both capacities and the sufficient conditions for a strict gap"},
      {"coherent-info", "coherent information of --state, directly and through chi-quantities"},
      {"sweep-truncation", "chi under finite-rank truncations of the second factor"},
      {"sweep-appendix", "disturbance identity under truncations of output and environment"},
      {"gibbs", "maximum-entropy state under the energy bound"},
      {"gaussian-classify", "gap classification of a Gaussian channel spec"},
      {"selftest", "invariant and closed-form suite"}};
  for (const std::string& name : commands()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->callback([&cfg, name] { cfg.command = name; });
    sub->add_option("--channel", cfg.channel, "channel file or preset");
    sub->add_option("--ensemble", cfg.ensemble, "ensemble file");
    sub->add_option("--hamiltonian", cfg.hamiltonian, "Hamiltonian file");
    sub->add_option("--energy", cfg.energy, "energy bound");
    sub->add_option("--state", cfg.state, "density matrix file");
    sub->add_option("--gaussian", cfg.gaussian, "Gaussian channel spec file");
    sub->add_option("--degrading", cfg.degrading, "degrading channel file or preset");
    sub->add_flag("--degradable", cfg.degradable, "assert that the Gaussian channel is degradable");
    sub->add_option("--dims", cfg.dims, "d_B,d_E")->delimiter(',');
    sub->add_option("--ranks", cfg.ranks, "truncation ranks")->delimiter(',');
    sub->add_option("--ranks-b", cfg.ranks_b, "output truncation ranks")->delimiter(',');
    sub->add_option("--ranks-e", cfg.ranks_e, "environment truncation ranks")->delimiter(',');
    sub->add_option("--unit", cfg.unit, "nats or bits")->check(CLI::IsMember({"nats", "bits"}));
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "report path");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--restarts", cfg.restarts, "optimizer restarts");
    sub->add_option("--tol", cfg.tol, "tolerance override key=val")->take_all();
    sub->add_option("--config", cfg.config, std::string("config file (default $") + kConfigEnv + ")");
    sub->add_flag("--parallel", cfg.parallel, "run optimizer restarts on worker threads");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }
  return run(cfg, out, err);
}

}  // namespace qcap::cli
