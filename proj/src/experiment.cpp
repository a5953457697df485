#include "hiacc/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hiacc/errors.hpp"
#include "hiacc/fors.hpp"
#include "hiacc/lowerbound.hpp"
#include "hiacc/prox.hpp"
#include "hiacc/rgo.hpp"
#include "hiacc/verify.hpp"

namespace hiacc {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kKinds = {
    {ExperimentKind::TiltExactness, "tilt_exactness"},
    {ExperimentKind::ProxCheck, "prox_check"},
    {ExperimentKind::ForsUnit, "fors_unit"},
    {ExperimentKind::SamplerE2E, "sampler_e2e"},
    {ExperimentKind::DeltaScaling, "delta_scaling"},
    {ExperimentKind::LowerBound, "lower_bound"},
};

// Collects problems while reading fields; every message carries its path.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(&problems) {}

  void problem(const std::string& path, const std::string& msg) {
    problems_->push_back(path + ": " + msg);
  }

  template <class T>
  std::optional<T> get(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      problem(path + key, "has the wrong type");
      return std::nullopt;
    }
  }

  double number(const json& obj, const std::string& key, const std::string& path,
                double fallback) {
    return get<double>(obj, key, path).value_or(fallback);
  }

  std::uint64_t count(const json& obj, const std::string& key, const std::string& path,
                      std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      problem(path + key, "must be a nonnegative integer");
      return fallback;
    }
    return v.get<std::uint64_t>();
  }

 private:
  std::vector<std::string>* problems_;
};

const json& object_or_empty(const json& root, const std::string& key, Reader& rd) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  if (!root.at(key).is_object()) {
    rd.problem(key, "must be an object");
    return empty;
  }
  return root.at(key);
}

std::optional<Potential> try_potential(const PotentialSpec& spec, Reader& rd) {
  try {
    return make_potential(spec);
  } catch (const std::exception& e) {
    rd.problem("potential", e.what());
    return std::nullopt;
  }
}

// Sum of per-coordinate warm starts of N(m0, s0^2) against the reference.
std::optional<double> reference_warm_start(const Potential& p, double m0, double s0) {
  const auto& ref = p.reference();
  if (!ref) return std::nullopt;
  double total = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    total += gaussian_warm_start(m0, s0, ref->mean[i], ref->marginal_sd(i), 1);
  }
  return total;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::vector<std::string> experiment_catalog() {
  std::vector<std::string> out;
  for (const auto& kv : kKinds) out.emplace_back(kv.second);
  return out;
}

ExperimentConfig validate_config(const std::string& raw) {
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("config: not valid JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ValidationError({"config: top level must be an object"});

  std::vector<std::string> problems;
  Reader rd(problems);
  ExperimentConfig cfg;

  static const std::vector<std::string> known = {
      "experiment", "potential", "noise",  "case",   "mode",        "delta",
      "deltas",     "seeds",     "chains", "threads", "output_dir", "constants",
      "init",       "tilt",      "prox",   "fors",   "scaling",     "lower_bound"};
  for (const auto& [key, value] : root.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      rd.problem(key, "unknown field");
    }
  }

  // experiment
  if (const auto name = rd.get<std::string>(root, "experiment", "")) {
    bool found = false;
    for (const auto& [k, n] : kKinds) {
      if (*name == n) {
        cfg.experiment = k;
        found = true;
      }
    }
    if (!found) rd.problem("experiment", "unknown experiment '" + *name + "'");
  } else {
    rd.problem("experiment", "is required");
  }

  // potential
  const json& pot = object_or_empty(root, "potential", rd);
  cfg.potential = PotentialSpec{"gaussian", {}, {}};
  if (const auto key = rd.get<std::string>(pot, "key", "potential.")) {
    const auto cat = potential_catalog();
    if (std::find(cat.begin(), cat.end(), *key) == cat.end()) {
      rd.problem("potential.key", "unknown potential '" + *key + "'");
    }
    cfg.potential.key = *key;
  }
  if (pot.contains("params")) {
    if (!pot.at("params").is_object()) {
      rd.problem("potential.params", "must be an object");
    } else {
      for (const auto& [k, v] : pot.at("params").items()) {
        if (v.is_number()) {
          cfg.potential.scalars[k] = v.get<double>();
        } else if (v.is_array() && std::all_of(v.begin(), v.end(),
                                               [](const json& e) { return e.is_number(); })) {
          cfg.potential.lists[k] = v.get<std::vector<double>>();
        } else {
          rd.problem("potential.params." + k, "must be a number or a list of numbers");
        }
      }
    }
  }

  // noise
  const json& noise = object_or_empty(root, "noise", rd);
  cfg.noise_key = rd.get<std::string>(noise, "key", "noise.").value_or("exact");
  if (noise.contains("params")) {
    if (!noise.at("params").is_object()) {
      rd.problem("noise.params", "must be an object");
    } else {
      for (const auto& [k, v] : noise.at("params").items()) {
        if (v.is_number()) {
          cfg.noise_params[k] = v.get<double>();
        } else {
          rd.problem("noise.params." + k, "must be a number");
        }
      }
    }
  }
  std::optional<NoiseModel> noise_model;
  try {
    noise_model = make_noise(cfg.noise_key, cfg.noise_params);
  } catch (const std::exception& e) {
    rd.problem("noise", e.what());
  }

  // scalars
  if (const auto m = rd.get<std::string>(root, "mode", "")) {
    if (*m == "first_order") {
      cfg.mode = Mode::FirstOrder;
    } else if (*m == "zeroth_order") {
      cfg.mode = Mode::ZerothOrder;
    } else {
      rd.problem("mode", "must be first_order or zeroth_order");
    }
  }
  cfg.delta = rd.number(root, "delta", "", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    rd.problem("delta", "must lie in (0, 1), got " + std::to_string(cfg.delta));
  }
  if (const auto ds = rd.get<std::vector<double>>(root, "deltas", "")) {
    cfg.deltas = *ds;
    for (std::size_t i = 0; i < ds->size(); ++i) {
      if (!((*ds)[i] > 0.0 && (*ds)[i] < 1.0)) {
        rd.problem("deltas[" + std::to_string(i) + "]", "must lie in (0, 1)");
      }
    }
  }
  if (const auto s = rd.get<std::vector<std::uint64_t>>(root, "seeds", "")) {
    cfg.seeds = *s;
  }
  if (cfg.seeds.empty()) rd.problem("seeds", "must be a nonempty list");
  cfg.chains = rd.count(root, "chains", "", cfg.chains);
  if (cfg.chains == 0) rd.problem("chains", "must be positive");
  cfg.threads = static_cast<unsigned>(rd.count(root, "threads", "", 0));
  if (const char* env = std::getenv("HIACC_OUT_DIR"); env && *env) cfg.output_dir = env;
  cfg.output_dir = rd.get<std::string>(root, "output_dir", "").value_or(cfg.output_dir);

  // plan constants
  if (root.contains("constants")) {
    const json& c = object_or_empty(root, "constants", rd);
    try {
      cfg.constants = PlanConstants::from_json(c.dump());
    } catch (const std::exception& e) {
      rd.problem("constants", e.what());
    }
    if (!(cfg.constants.eta_const > 0.0)) rd.problem("constants.eta_const", "must be positive");
    if (!(cfg.constants.steps_const > 0.0)) rd.problem("constants.steps_const", "must be positive");
  }

  // init
  const json& init = object_or_empty(root, "init", rd);
  cfg.init_mean = rd.number(init, "mean", "init.", cfg.init_mean);
  cfg.init_sd = rd.number(init, "sd", "init.", cfg.init_sd);
  if (!(cfg.init_sd > 0.0)) rd.problem("init.sd", "must be positive");

  // tilt / prox / fors / scaling / lower_bound blocks
  const json& tilt = object_or_empty(root, "tilt", rd);
  const json& prox = object_or_empty(root, "prox", rd);
  const json& fors = object_or_empty(root, "fors", rd);
  const json& scaling = object_or_empty(root, "scaling", rd);
  const json& lb = object_or_empty(root, "lower_bound", rd);

  if (const auto x0 = rd.get<std::vector<double>>(tilt, "x0", "tilt.")) cfg.x0 = *x0;
  if (const auto x0 = rd.get<std::vector<double>>(prox, "x0", "prox.")) cfg.x0 = *x0;
  if (const auto e = rd.get<double>(tilt, "eta", "tilt.")) cfg.eta = *e;
  if (const auto e = rd.get<double>(prox, "eta", "prox.")) cfg.eta = *e;
  if (cfg.eta && !(*cfg.eta > 0.0)) rd.problem("eta", "must be positive");
  cfg.fors_B = rd.number(tilt, "B", "tilt.", cfg.fors_B);
  cfg.fors_B = rd.number(fors, "B", "fors.", cfg.fors_B);
  if (!(cfg.fors_B > 0.0)) rd.problem("B", "must be positive");
  cfg.samples = rd.count(tilt, "samples", "tilt.", cfg.samples);
  cfg.samples = rd.count(fors, "calls", "fors.", cfg.samples);
  cfg.plan_tilt = rd.get<bool>(tilt, "plan", "tilt.").value_or(false);
  cfg.prox_M = rd.number(prox, "M", "prox.", cfg.prox_M);
  cfg.prox_M = rd.number(tilt, "M", "tilt.", cfg.prox_M);
  if (!(cfg.prox_M > 0.0)) rd.problem("prox.M", "must be positive");
  cfg.prox_batch = rd.count(prox, "n_batch", "prox.", cfg.prox_batch);
  cfg.prox_batch = rd.count(tilt, "n_batch", "tilt.", cfg.prox_batch);
  if (cfg.prox_batch == 0) rd.problem("prox.n_batch", "must be positive");
  if (prox.contains("k_iters")) cfg.prox_iters = rd.count(prox, "k_iters", "prox.", 1);
  cfg.trials = rd.count(prox, "trials", "prox.", cfg.trials);
  cfg.trials = rd.count(lb, "trials", "lower_bound.", cfg.trials);
  if (cfg.trials == 0) rd.problem("trials", "must be positive");
  cfg.w_value = rd.number(fors, "w", "fors.", cfg.w_value);
  cfg.wdraw_delta = rd.number(fors, "delta", "fors.", cfg.wdraw_delta);
  if (!(std::abs(cfg.w_value) <= cfg.fors_B)) rd.problem("fors.w", "must lie in [-B, B]");
  if (!(cfg.wdraw_delta > 0.0 && cfg.wdraw_delta < 1.0)) {
    rd.problem("fors.delta", "must lie in (0, 1)");
  }
  cfg.expect = rd.get<std::string>(scaling, "expect", "scaling.").value_or("none");
  if (cfg.expect != "linear" && cfg.expect != "polylog" && cfg.expect != "none") {
    rd.problem("scaling.expect", "must be linear, polylog or none");
  }
  cfg.psi_kind = rd.get<std::string>(lb, "psi", "lower_bound.").value_or("power");
  cfg.psi_s = rd.number(lb, "s", "lower_bound.", cfg.psi_s);
  cfg.sgld_step = rd.number(lb, "sgld_step", "lower_bound.", cfg.sgld_step);
  if (cfg.psi_kind == "power" && !(cfg.psi_s >= 1.0)) {
    rd.problem("lower_bound.s", "power psi needs s >= 1");
  } else if (cfg.psi_kind == "exp_power" && !(cfg.psi_s > 0.0)) {
    rd.problem("lower_bound.s", "exp-power psi needs s > 0");
  } else if (cfg.psi_kind != "power" && cfg.psi_kind != "exp_power") {
    rd.problem("lower_bound.psi", "must be power or exp_power");
  }
  if (!(cfg.sgld_step > 0.0)) rd.problem("lower_bound.sgld_step", "must be positive");

  // semantic checks that need the potential
  const auto p = try_potential(cfg.potential, rd);
  const json& cs = object_or_empty(root, "case", rd);
  {
    std::string tag = rd.get<std::string>(cs, "tag", "case.").value_or("LSI");
    std::transform(tag.begin(), tag.end(), tag.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    const bool runs_sampler = cfg.experiment == ExperimentKind::SamplerE2E ||
                              cfg.experiment == ExperimentKind::DeltaScaling;
    std::optional<double> warm = rd.get<double>(cs, "warm_start", "case.");
    if (!warm && p) {
      try {
        warm = reference_warm_start(*p, cfg.init_mean, cfg.init_sd);
      } catch (const DomainError& e) {
        if (runs_sampler) rd.problem("case.warm_start", std::string("no default: ") + e.what());
        warm = 0.0;
      }
    }
    std::optional<double> constant = rd.get<double>(cs, "constant", "case.");
    if (!constant && p) constant = tag == "PI" ? p->pi_const() : p->lsi_const();
    try {
      if (tag == "LSI" || tag == "PI") {
        if (!constant) throw DomainError("constant is required for this potential");
        if (!warm) throw DomainError("warm_start is required for this potential");
        cfg.assumption = tag == "LSI" ? AssumptionCase::lsi(*constant, *warm)
                                      : AssumptionCase::pi(*constant, *warm);
      } else if (tag == "LC") {
        const auto w2 = rd.get<double>(cs, "w2", "case.");
        if (!w2) throw DomainError("w2 is required for the LC case");
        if (!warm) throw DomainError("warm_start is required for this potential");
        cfg.assumption = AssumptionCase::lc(*w2, *warm);
      } else {
        throw DomainError("tag must be LSI, PI or LC");
      }
    } catch (const std::exception& e) {
      rd.problem("case", e.what());
    }
  }

  if (p) {
    const int d = p->dim();
    const bool uses_x0 = cfg.experiment == ExperimentKind::TiltExactness ||
                         cfg.experiment == ExperimentKind::ProxCheck;
    if (uses_x0 && static_cast<int>(cfg.x0.size()) != d) {
      rd.problem("x0", "has length " + std::to_string(cfg.x0.size()) +
                           " but the potential has dimension " + std::to_string(d));
    }
    const bool needs_prox_eta =
        cfg.experiment == ExperimentKind::ProxCheck ||
        (cfg.experiment == ExperimentKind::TiltExactness && cfg.mode == Mode::FirstOrder &&
         !cfg.plan_tilt);
    if (needs_prox_eta) {
      if (!cfg.eta) {
        rd.problem("eta", "is required unless tilt.plan is true");
      } else if (p->m_s() > 0.0 && *cfg.eta > 0.5 / p->m_s() * (1.0 + 1e-12)) {
        rd.problem("eta", "= " + std::to_string(*cfg.eta) +
                              " violates the proximal step condition eta <= 1/(2 m_s) = " +
                              std::to_string(0.5 / p->m_s()));
      }
    }
    if (cfg.experiment == ExperimentKind::TiltExactness && cfg.mode == Mode::ZerothOrder &&
        !cfg.plan_tilt && !cfg.eta) {
      rd.problem("eta", "is required unless tilt.plan is true");
    }
    if (cfg.experiment == ExperimentKind::TiltExactness && !p->reference()) {
      rd.problem("potential", "tilt_exactness needs a Gaussian potential with an exact law");
    }
    if (cfg.experiment == ExperimentKind::LowerBound && d != 1) {
      rd.problem("potential", "lower_bound runs on the one-dimensional Gaussian family");
    }
    if (noise_model && noise_model->family == NoiseModel::Family::TwoPoint && d != 1) {
      rd.problem("noise", "two-point noise is one-dimensional");
    }
  }
  if (cfg.experiment == ExperimentKind::DeltaScaling && cfg.deltas.size() < 4) {
    rd.problem("deltas", "delta_scaling needs at least 4 values");
  }
  if (!problems.empty()) throw ValidationError(problems);

  json echo = root;
  echo["experiment"] = to_string(cfg.experiment);
  echo["mode"] = to_string(cfg.mode);
  echo["delta"] = cfg.delta;
  echo["seeds"] = cfg.seeds;
  echo["chains"] = cfg.chains;
  echo["case"] = json{{"tag", to_string(cfg.assumption.tag)},
                      {"constant", cfg.assumption.constant},
                      {"warm_start", cfg.assumption.warm_start}};
  if (cfg.assumption.w2_bound) echo["case"]["w2"] = *cfg.assumption.w2_bound;
  echo["constants"] = json::parse(cfg.constants.to_json());
  cfg.echo = echo.dump();
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<std::uint64_t> chains) {
  json echo = json::parse(cfg.echo);
  if (seed) {
    cfg.seeds = {*seed};
    echo["seeds"] = cfg.seeds;
  }
  if (chains && *chains > 0) {
    cfg.chains = *chains;
    echo["chains"] = cfg.chains;
  }
  cfg.echo = echo.dump();
}

bool ExperimentReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string ExperimentReport::csv() const {
  std::ostringstream os;
  os << "seed,delta,metric,value\n";
  os << std::setprecision(17);
  for (const auto& r : rows) os << r.seed << ',' << r.delta << ',' << r.metric << ',' << r.value << '\n';
  return os.str();
}

namespace {

json ledger_json(const QueryLedger& l) {
  return json{{"grad_queries", l.grad_queries}, {"value_queries", l.value_queries},
              {"fors_attempts", l.fors_attempts}, {"w_draws", l.w_draws},
              {"prox_iters", l.prox_iters},       {"rgo_calls", l.rgo_calls},
              {"prox_failures", l.prox_failures}};
}

// Shared state while a suite runs.
struct Ctx {
  const ExperimentConfig& cfg;
  Potential potential;
  NoiseModel noise;
  ExperimentReport report;
  json results = json::array();

  void row(std::uint64_t seed, double delta, const std::string& metric, double value) {
    report.rows.push_back({seed, delta, metric, value});
  }
  void verdict(const std::string& name, bool pass, const std::string& detail) {
    report.verdicts.push_back({name, pass, detail});
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Per-seed pass rule: at least 90% of seeds (18 of 20), all when fewer than 10.
bool seed_rule(const std::vector<bool>& passes) {
  const int n = static_cast<int>(passes.size());
  const int need = n >= 10 ? static_cast<int>(std::ceil(0.9 * n)) : n;
  return enough_passes(passes, need);
}

void run_fors_unit(Ctx& c) {
  const auto& cfg = c.cfg;
  std::vector<bool> rate_ok, quant_ok;
  for (const auto seed : cfg.seeds) {
    Rng rng(seed);
    QueryLedger ledger;
    ForsConfig fc;
    fc.B = cfg.fors_B;
    const double w = cfg.w_value;
    std::vector<std::uint64_t> draws;
    draws.reserve(cfg.samples);
    std::uint64_t attempts = 0;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
      const ForsResult r = fors_sample([](Rng&) { return Vector::Zero(1).eval(); },
                                       [w](const Vector&, Rng&) { return w; }, fc, rng, ledger);
      attempts += r.attempts;
      draws.push_back(r.w_draws);
    }
    const double rate = static_cast<double>(cfg.samples) / static_cast<double>(attempts);
    const double expected = std::exp(w - fc.B);
    const double se = binomial_se(expected, attempts);
    const bool ok_rate = std::abs(rate - expected) <= 3.0 * se;
    const WdrawCheck wc = wdraw_tail_check(fc.B, cfg.wdraw_delta, draws);
    rate_ok.push_back(ok_rate);
    quant_ok.push_back(wc.pass);
    c.report.ledger += ledger;
    c.row(seed, cfg.wdraw_delta, "acceptance_rate", rate);
    c.row(seed, cfg.wdraw_delta, "wdraw_quantile", wc.quantile);
    c.results.push_back(json{{"seed", seed},
                             {"acceptance_rate", rate},
                             {"expected_acceptance", expected},
                             {"se", se},
                             {"wdraw_quantile", wc.quantile},
                             {"wdraw_bound", wc.bound},
                             {"aggregate_constant", wc.aggregate_constant},
                             {"ledger", ledger_json(ledger)}});
  }
  c.verdict("acceptance_rate", seed_rule(rate_ok), "per-attempt acceptance within 3 SE of exp(w - B)");
  c.verdict("wdraw_quantile", seed_rule(quant_ok), "per-call draw quantile below 3 B e^{2B} log(2/delta)");
}

void run_tilt_exactness(Ctx& c) {
  const auto& cfg = c.cfg;
  const Potential& p = c.potential;
  const Vector x0 = to_vector(cfg.x0);
  TiltPlan plan;
  if (cfg.plan_tilt) {
    TiltConstants tk;
    tk.B = cfg.fors_B;
    plan = cfg.mode == Mode::FirstOrder ? plan_tilt_first_order(p, c.noise, cfg.delta, tk)
                                        : plan_tilt_zeroth_order(p, c.noise, x0, cfg.delta, tk);
  } else {
    plan.eta = *cfg.eta;
    plan.M = cfg.prox_M;
    plan.n_batch = cfg.prox_batch;
    plan.eps_prox = prox_tolerance(p, plan.M);
  }
  const TiltProblem tp{p, x0, plan.eta};
  const GaussianReference law = gaussian_tilt_law(tp);
  ForsConfig fc;
  fc.B = cfg.fors_B;

  std::vector<bool> passes;
  for (const auto seed : cfg.seeds) {
    const Rng root(seed);
    Rng alg = root.derive(2);
    QueryLedger ledger;
    std::vector<Vector> out;
    out.reserve(cfg.samples);
    if (cfg.mode == Mode::FirstOrder) {
      GradientOracle oracle(p, c.noise, root.derive(1), ledger);
      const double G = std::max(p.grad(x0).norm(), 1e-12);
      ProxConfig pc = make_prox_config(p, plan.eta, plan.M, plan.n_batch, G);
      if (cfg.prox_iters) pc.k_iters = *cfg.prox_iters;
      for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        const Vector xhat = approx_prox(p, oracle, x0, pc);
        const RgoContext ctx(tp, xhat, fc.B, plan.n_batch, plan.M, plan.eps_prox);
        out.push_back(sample_tilt(ctx, oracle, fc, alg).x);
      }
    } else {
      ValueOracle oracle(p, c.noise, root.derive(1), ledger);
      const RgoContext ctx(tp, x0, fc.B, plan.n_batch, plan.M, plan.eps_prox);
      for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        out.push_back(sample_tilt(ctx, oracle, fc, alg).x);
      }
    }
    bool ok = true;
    json coords = json::array();
    for (int i = 0; i < p.dim(); ++i) {
      const auto ks = ks_test(marginal(out, i), [&](double v) { return law.marginal_cdf(i, v); });
      ok = ok && ks.p_value > kSignificance / p.dim();
      coords.push_back(json{{"ks_statistic", ks.statistic}, {"p_value", ks.p_value}});
      c.row(seed, cfg.delta, "ks_p_" + std::to_string(i), ks.p_value);
    }
    passes.push_back(ok);
    c.report.ledger += ledger;
    c.results.push_back(json{{"seed", seed}, {"coordinates", coords}, {"pass", ok},
                             {"ledger", ledger_json(ledger)}});
  }
  c.results.push_back(json{{"plan", {{"eta", plan.eta}, {"M", plan.M}, {"n_batch", plan.n_batch},
                                     {"eps_prox", plan.eps_prox}, {"tv_bound", plan.tv_bound}}}});
  c.verdict("tilt_ks", seed_rule(passes),
            std::to_string(std::count(passes.begin(), passes.end(), true)) + "/" +
                std::to_string(passes.size()) + " seeds with KS p > 0.01");
}

void run_prox_check(Ctx& c) {
  const auto& cfg = c.cfg;
  const Potential& p = c.potential;
  const Vector x0 = to_vector(cfg.x0);
  const double G = std::max(p.grad(x0).norm(), 1e-12);
  ProxConfig pc = make_prox_config(p, *cfg.eta, cfg.prox_M, cfg.prox_batch, G);
  if (cfg.prox_iters) pc.k_iters = *cfg.prox_iters;
  const double tol = pc.eta * prox_tolerance(p, pc.M);
  const double eps = eps_tail(c.noise, pc.n_batch, pc.M);
  std::vector<bool> passes;
  for (const auto seed : cfg.seeds) {
    QueryLedger ledger;
    GradientOracle oracle(p, c.noise, Rng(seed).derive(1), ledger);
    std::uint64_t failures = 0;
    double worst = 0.0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      const Vector xhat = approx_prox(p, oracle, x0, pc);
      const double r = prox_residual(p, xhat, x0, pc.eta);
      worst = std::max(worst, r);
      if (r > tol) ++failures;
    }
    const double rate = static_cast<double>(failures) / static_cast<double>(cfg.trials);
    const double allowed = std::min(1.0, 2.0 * eps);
    const double limit = allowed + 3.0 * binomial_se(allowed, cfg.trials);
    const bool ok = rate <= limit;
    passes.push_back(ok);
    c.report.ledger += ledger;
    c.row(seed, 0.0, "failure_rate", rate);
    c.row(seed, 0.0, "max_residual", worst);
    c.results.push_back(json{{"seed", seed},  {"failure_rate", rate}, {"allowed", limit},
                             {"tolerance", tol}, {"max_residual", worst}, {"k_iters", pc.k_iters},
                             {"ledger", ledger_json(ledger)}});
  }
  c.verdict("prox_residual", seed_rule(passes),
            "residual above 10 eta (m_s + M) no more often than 2 eps_n(M) + 3 SE");
}

Schedule plan_for(const Ctx& c, double delta) {
  return c.cfg.mode == Mode::FirstOrder
             ? plan_first_order(c.potential, c.noise, c.cfg.assumption, delta, c.cfg.constants)
             : plan_zeroth_order(c.potential, c.noise, c.cfg.assumption, delta, c.cfg.constants);
}

InitialSampler init_sampler(const ExperimentConfig& cfg, int dim) {
  const double m = cfg.init_mean;
  const double s = cfg.init_sd;
  return [m, s, dim](Rng& r) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = m + s * r.normal();
    return x;
  };
}

void run_sampler_e2e(Ctx& c) {
  const auto& cfg = c.cfg;
  const Potential& p = c.potential;
  const Schedule sched = plan_for(c, cfg.delta);
  c.results.push_back(json{{"schedule", json::parse(sched.to_json())}});
  std::vector<bool> passes;
  for (const auto seed : cfg.seeds) {
    const SamplerOutput out =
        run_proximal_sampler(p, c.noise, sched, init_sampler(cfg, p.dim()),
                             RunOptions{seed, cfg.chains, cfg.threads});
    c.report.ledger += out.ledger;
    json res{{"seed", seed}, {"ledger", ledger_json(out.ledger)}};
    const auto xs = marginal(out.samples, 0);
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(xs.size());
    res["mean_0"] = mean;
    c.row(seed, cfg.delta, "mean_0", mean);
    if (const auto& ref = p.reference(); ref && xs.size() >= 100) {
      const Law1D law = normal_law(ref->mean[0], ref->marginal_sd(0));
      const TvEstimate tv = empirical_tv_1d(xs, law);
      const auto ks = ks_test(xs, law.cdf);
      const bool ok = tv.tv <= cfg.delta + tv.bias_bound;
      passes.push_back(ok);
      res["tv"] = tv.tv;
      res["tv_limit"] = cfg.delta + tv.bias_bound;
      res["ks_p"] = ks.p_value;
      res["pass"] = ok;
      c.row(seed, cfg.delta, "tv", tv.tv);
      c.row(seed, cfg.delta, "ks_p", ks.p_value);
    }
    c.results.push_back(res);
  }
  if (!passes.empty()) {
    c.verdict("sampler_tv", seed_rule(passes), "binned TV to target at most delta + plug-in bias");
  }
}

void run_delta_scaling(Ctx& c) {
  const auto& cfg = c.cfg;
  const Potential& p = c.potential;
  for (const auto seed : cfg.seeds) {
    std::vector<double> inv, measured, planned;
    for (const double delta : cfg.deltas) {
      const Schedule sched = plan_for(c, delta);
      const SamplerOutput out =
          run_proximal_sampler(p, c.noise, sched, init_sampler(cfg, p.dim()),
                               RunOptions{seed, cfg.chains, cfg.threads});
      c.report.ledger += out.ledger;
      const double q = static_cast<double>(cfg.mode == Mode::FirstOrder ? out.ledger.grad_queries
                                                                        : out.ledger.value_queries);
      inv.push_back(1.0 / delta);
      measured.push_back(q);
      planned.push_back(sched.planned_queries);
      c.row(seed, delta, "queries", q);
      c.row(seed, delta, "planned_queries", sched.planned_queries);
      c.row(seed, delta, "N", static_cast<double>(sched.N));
      c.row(seed, delta, "n_batch", static_cast<double>(sched.n_batch));
      c.row(seed, delta, "M", sched.M);
      c.results.push_back(json{{"seed", seed}, {"delta", delta}, {"queries", q},
                               {"schedule", json::parse(sched.to_json())}});
    }
    const double slope = scaling_slope(inv, measured);
    const double planned_slope = scaling_slope(inv, planned);
    c.row(seed, 0.0, "slope", slope);
    c.row(seed, 0.0, "planned_slope", planned_slope);
    c.results.push_back(json{{"seed", seed}, {"slope", slope}, {"planned_slope", planned_slope}});
    if (cfg.expect == "linear") {
      c.verdict("slope_seed_" + std::to_string(seed), slope >= 0.75 && slope <= 1.25,
                "slope " + fmt(slope) + " in [0.75, 1.25]");
    } else if (cfg.expect == "polylog") {
      c.verdict("slope_seed_" + std::to_string(seed), slope <= 0.3,
                "slope " + fmt(slope) + " <= 0.3");
    }
  }
}

PsiFunction psi_of(const ExperimentConfig& cfg) {
  return cfg.psi_kind == "power" ? PsiFunction::power(cfg.psi_s)
                                 : PsiFunction::exp_power(cfg.psi_s);
}

void run_lower_bound(Ctx& c) {
  const auto& cfg = c.cfg;
  const PsiFunction psi = psi_of(cfg);
  const double F = f_psi(psi, cfg.delta);
  const std::uint64_t T = max_budget_below_bound(psi, cfg.delta);
  const AdversarialOraclePair pair = AdversarialOraclePair::build(psi, cfg.delta);
  c.results.push_back(json{{"psi", psi.describe()}, {"F_psi", F}, {"T", T}, {"p", pair.p},
                           {"M", pair.M}, {"psi_moment", pair.psi_moment()}});
  if (psi.kind == PsiFunction::Kind::Power && psi.s == 2.0) {
    const double exact = 1.0 / cfg.delta - cfg.delta;
    c.verdict("f_psi_closed_form", std::abs(F - exact) <= 1e-6 * exact,
              "F = " + fmt(F) + " vs 1/delta - delta = " + fmt(exact));
  }

  const Schedule sched =
      plan_first_order(make_gaussian_potential(Vector::Zero(1), 1.0),
                       NoiseModel::poly_moment(1, 1.0),
                       AssumptionCase::lsi(1.0, cfg.delta * cfg.delta), cfg.delta, cfg.constants);
  ProximalSamplerAdapter prox(sched);
  SgldAdapter sgld(cfg.sgld_step);
  const Law1D p0 = normal_law(0.0, 1.0);
  const Law1D pd = normal_law(cfg.delta, 1.0);
  for (SamplingAlgorithm* alg : std::vector<SamplingAlgorithm*>{&prox, &sgld}) {
    for (const auto seed : cfg.seeds) {
      const CoupledRunResult r = coupled_run(*alg, pair, T, cfg.trials, seed, cfg.threads);
      const double tv0 = empirical_tv_1d(r.out0, p0).tv;
      const double tvd = empirical_tv_1d(r.out_delta, pd).tv;
      const std::string tag = alg->name() + "_seed_" + std::to_string(seed);
      c.verdict("coupling_" + tag, !r.coupling_broken && r.tv_arms <= r.coupling_bound + 3.0 * r.coupling_se,
                "arm TV " + fmt(r.tv_arms) + " <= T p + 3 SE = " +
                    fmt(r.coupling_bound + 3.0 * r.coupling_se));
      c.verdict("separation_" + tag, std::max(tv0, tvd) > cfg.delta / 8.0,
                "max arm TV to target " + fmt(std::max(tv0, tvd)) + " > delta/8 = " +
                    fmt(cfg.delta / 8.0));
      c.row(seed, cfg.delta, alg->name() + "_tv_arms", r.tv_arms);
      c.row(seed, cfg.delta, alg->name() + "_tv_arm0", tv0);
      c.row(seed, cfg.delta, alg->name() + "_tv_arm_delta", tvd);
      c.row(seed, cfg.delta, alg->name() + "_corrupted_fraction", r.corrupted_fraction);
      c.results.push_back(json{{"algorithm", alg->name()},
                               {"seed", seed},
                               {"tv_arms", r.tv_arms},
                               {"coupling_bound", r.coupling_bound},
                               {"coupling_se", r.coupling_se},
                               {"corrupted_fraction", r.corrupted_fraction},
                               {"differing_fraction", r.differing_fraction},
                               {"tv_arm0_to_target", tv0},
                               {"tv_arm_delta_to_target", tvd},
                               {"exact_target_tv", gaussian_tv(0.0, cfg.delta)}});
    }
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Ctx c{cfg, make_potential(cfg.potential), make_noise(cfg.noise_key, cfg.noise_params), {}, json::array()};

  using Suite = std::function<void(Ctx&)>;
  Suite suite;
  switch (cfg.experiment) {
    case ExperimentKind::ForsUnit: suite = run_fors_unit; break;
    case ExperimentKind::TiltExactness: suite = run_tilt_exactness; break;
    case ExperimentKind::ProxCheck: suite = run_prox_check; break;
    case ExperimentKind::SamplerE2E: suite = run_sampler_e2e; break;
    case ExperimentKind::DeltaScaling: suite = run_delta_scaling; break;
    case ExperimentKind::LowerBound: suite = run_lower_bound; break;
  }
  try {
    suite(c);
  } catch (const std::exception& e) {
    c.verdict("suite_completed", false, e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json verdicts = json::array();
  for (const auto& v : c.report.verdicts) {
    verdicts.push_back(json{{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  }
  json doc{{"schema_version", kReportSchemaVersion},
           {"experiment", to_string(cfg.experiment)},
           {"config", json::parse(cfg.echo)},
           {"plan_constants", json::parse(cfg.constants.to_json())},
           {"results", c.results},
           {"ledger", ledger_json(c.report.ledger)},
           {"verdicts", verdicts},
           {"all_pass", c.report.all_pass()},
           {"wall_clock_seconds", secs},
           {"generated_at", utc_timestamp()}};
  c.report.json = doc.dump(2);
  return c.report;
}

void write_report(const ExperimentReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  std::ofstream js(base / "report.json");
  std::ofstream csv(base / "results.csv");
  if (!js || !csv) throw Error("cannot write report files into '" + dir + "'");
  js << report.json << '\n';
  csv << report.csv();
}

std::string resolve_output_dir(const std::optional<std::string>& flag,
                               const ExperimentConfig& cfg) {
  if (flag && !flag->empty()) return *flag;
  return cfg.output_dir;
}

}  // namespace hiacc
