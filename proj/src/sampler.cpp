#include "hiacc/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace hiacc {

using nlohmann::json;

const char* to_string(Mode mode) {
  return mode == Mode::FirstOrder ? "first_order" : "zeroth_order";
}

namespace {

Mode mode_from_string(const std::string& s) {
  if (s == "first_order") return Mode::FirstOrder;
  if (s == "zeroth_order") return Mode::ZerothOrder;
  throw DomainError("unknown mode '" + s + "'");
}

AssumptionCase::Tag tag_from_string(const std::string& s) {
  for (auto t : {AssumptionCase::Tag::LSI, AssumptionCase::Tag::PI, AssumptionCase::Tag::LC}) {
    if (s == to_string(t)) return t;
  }
  throw DomainError("unknown assumption case '" + s + "'");
}

json constants_json(const PlanConstants& k) {
  return json{{"eta_const", k.eta_const},
              {"steps_const", k.steps_const},
              {"fors_B_first", k.fors_B_first},
              {"fors_B_zeroth", k.fors_B_zeroth},
              {"tail_C", k.tail.C},
              {"tail_c", k.tail.c},
              {"m_grid_points", k.m_grid_points},
              {"m_grid_span", k.m_grid_span},
              {"max_attempts", k.max_attempts},
              {"max_w_per_call", k.max_w_per_call}};
}

PlanConstants constants_from(const json& j) {
  PlanConstants k;
  k.eta_const = j.value("eta_const", k.eta_const);
  k.steps_const = j.value("steps_const", k.steps_const);
  k.fors_B_first = j.value("fors_B_first", k.fors_B_first);
  k.fors_B_zeroth = j.value("fors_B_zeroth", k.fors_B_zeroth);
  k.tail.C = j.value("tail_C", k.tail.C);
  k.tail.c = j.value("tail_c", k.tail.c);
  k.m_grid_points = j.value("m_grid_points", k.m_grid_points);
  k.m_grid_span = j.value("m_grid_span", k.m_grid_span);
  k.max_attempts = j.value("max_attempts", k.max_attempts);
  k.max_w_per_call = j.value("max_w_per_call", k.max_w_per_call);
  return k;
}

}  // namespace

std::string PlanConstants::to_json() const { return constants_json(*this).dump(2); }

PlanConstants PlanConstants::from_json(const std::string& text) {
  return constants_from(json::parse(text));
}

std::string Schedule::to_json(std::optional<std::uint64_t> seed) const {
  json j{{"mode", hiacc::to_string(mode)},
         {"case", hiacc::to_string(assumption.tag)},
         {"case_constant", assumption.constant},
         {"warm_start", assumption.warm_start},
         {"delta", delta},
         {"eta", eta},
         {"N", N},
         {"M", M},
         {"n_batch", n_batch},
         {"eps_prox", eps_prox},
         {"G", G},
         {"k_iters", k_iters},
         {"B", B},
         {"planned_queries", planned_queries},
         {"constants", constants_json(constants)}};
  if (assumption.w2_bound) j["w2_bound"] = *assumption.w2_bound;
  if (seed) j["seed"] = *seed;
  return j.dump(2);
}

Schedule Schedule::from_json(const std::string& text) {
  const json j = json::parse(text);
  Schedule s;
  s.mode = mode_from_string(j.at("mode").get<std::string>());
  s.assumption.tag = tag_from_string(j.at("case").get<std::string>());
  s.assumption.constant = j.at("case_constant").get<double>();
  s.assumption.warm_start = j.at("warm_start").get<double>();
  if (j.contains("w2_bound")) s.assumption.w2_bound = j.at("w2_bound").get<double>();
  s.delta = j.at("delta").get<double>();
  s.eta = j.at("eta").get<double>();
  s.N = j.at("N").get<std::uint64_t>();
  s.M = j.at("M").get<double>();
  s.n_batch = j.at("n_batch").get<std::uint64_t>();
  s.eps_prox = j.at("eps_prox").get<double>();
  s.G = j.at("G").get<double>();
  s.k_iters = j.at("k_iters").get<std::uint64_t>();
  s.B = j.at("B").get<double>();
  s.planned_queries = j.at("planned_queries").get<double>();
  s.constants = constants_from(j.at("constants"));
  return s;
}

double gaussian_warm_start(double m0, double s0, double m, double s, int dim) {
  if (!(s0 > 0.0) || !(s > 0.0)) throw DomainError("standard deviations must be positive");
  if (dim < 1) throw DimensionError("dimension must be positive");
  const double denom = 2.0 * s * s - s0 * s0;
  if (!(denom > 0.0)) throw DomainError("chi-square divergence is infinite unless 2 s^2 > s0^2");
  const double per_coord = std::log(s * s / (s0 * std::sqrt(denom))) + (m0 - m) * (m0 - m) / denom;
  return dim * per_coord;
}

double gradient_norm_bound(const Potential& p, double warm_start, double fail) {
  if (!(fail > 0.0 && fail < 1.0)) throw DomainError("failure budget must lie in (0, 1)");
  const double s = p.holder_s();
  const double d = p.dim();
  const double g2 = 64.0 * std::pow(p.holder_beta(), 2.0 / (1.0 + s)) /
                    std::pow(d, (1.0 - s) / (1.0 + s)) *
                    (warm_start + d + std::log(1.0 / fail));
  return std::sqrt(g2);
}

namespace {

void check_plan_inputs(const Potential& p, const AssumptionCase& a, double delta) {
  a.validate();
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (a.tag == AssumptionCase::Tag::LSI && p.holder_s() != 1.0) {
    throw UnsupportedCombination("the log-Sobolev schedule needs a smooth potential (s = 1)");
  }
}

double expected_w_per_step(double B) { return 2.0 * B * std::exp(B); }

std::uint64_t ceil_steps(double steps) {
  if (!std::isfinite(steps) || steps > 1e15) {
    throw InfeasibleSchedule("iteration count is not finite");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(steps)));
}

// (beta^2 d^s l + beta^2 l^2)^{1/(1+s)}
double smooth_term(const Potential& p, double l) {
  const double s = p.holder_s();
  const double b2 = p.holder_beta() * p.holder_beta();
  return std::pow(b2 * std::pow(p.dim(), s) * l + b2 * l * l, 1.0 / (1.0 + s));
}

}  // namespace

Schedule plan_first_order_at(const Potential& p, const NoiseModel& noise,
                             const AssumptionCase& a, double delta, double M,
                             const PlanConstants& k) {
  check_plan_inputs(p, a, delta);
  if (!(M > 0.0)) throw DomainError("M must be positive");
  const double d = p.dim();
  const double s = p.holder_s();
  const double beta = p.holder_beta();
  const double m_s = p.m_s();
  const double Delta = a.warm_start;
  const double c = a.constant;
  const double M2 = M * M;

  double steps = 0.0;
  switch (a.tag) {
    case AssumptionCase::Tag::LSI: {
      const double lA = std::log(d + Delta + 1.0 / delta + c * (beta + M2));
      steps = c * (beta * std::sqrt(d) * std::pow(lA, 1.5) + (beta + M2) * lA * lA);
      break;
    }
    case AssumptionCase::Tag::PI: {
      const double lA = std::log(d + Delta + 1.0 / delta + c * (std::pow(beta, 2.0 / (1.0 + s)) + M2));
      steps = c * (smooth_term(p, lA) + M2 * lA) * (Delta + std::log(1.0 / delta));
      break;
    }
    case AssumptionCase::Tag::LC: {
      const double w2 = *a.w2_bound;
      const double lA =
          std::log(d + Delta + 1.0 / delta + (std::pow(beta, 2.0 / (1.0 + s)) + M2) * w2 * w2);
      steps = (smooth_term(p, lA) + M2 * lA) * w2 * w2 / (delta * delta);
      break;
    }
  }

  Schedule out;
  out.mode = Mode::FirstOrder;
  out.assumption = a;
  out.delta = delta;
  out.M = M;
  out.B = k.fors_B_first;
  out.constants = k;
  out.N = ceil_steps(k.steps_const * steps);

  const double l = std::log(static_cast<double>(out.N) / delta);
  out.eta = 1.0 / (k.eta_const * (smooth_term(p, l) + M2 * l));
  if (m_s > 0.0) out.eta = std::min(out.eta, 0.5 / m_s);

  const double fail = delta / (10.0 * static_cast<double>(out.N));
  out.n_batch = phi(noise, M, fail, k.tail);
  out.G = gradient_norm_bound(p, Delta, fail);
  out.eps_prox = prox_tolerance(p, M);
  out.k_iters = default_prox_iters(out.G, M, m_s);
  out.planned_queries = static_cast<double>(out.N) * static_cast<double>(out.n_batch) *
                        (static_cast<double>(out.k_iters) + expected_w_per_step(out.B));
  return out;
}

Schedule plan_first_order(const Potential& p, const NoiseModel& noise, const AssumptionCase& a,
                          double delta, const PlanConstants& k) {
  check_plan_inputs(p, a, delta);
  if (k.m_grid_points < 1 || !(k.m_grid_span >= 1.0)) throw DomainError("bad M grid");
  const double m1 = mean_abs_deviation(noise, p.dim());
  double m_lo = std::max(m1, 1e-3 * p.m_s());
  if (!(m_lo > 0.0)) m_lo = 1e-3;

  std::optional<Schedule> best;
  std::string last_reason;
  for (int i = 0; i < k.m_grid_points; ++i) {
    const double t = k.m_grid_points == 1 ? 0.0 : static_cast<double>(i) / (k.m_grid_points - 1);
    const double M = m_lo * std::pow(k.m_grid_span, t);
    try {
      Schedule cand = plan_first_order_at(p, noise, a, delta, M, k);
      if (!best || cand.planned_queries < best->planned_queries) best = std::move(cand);
    } catch (const InfeasibleSchedule& e) {
      last_reason = e.what();
    } catch (const UnsupportedCombination& e) {
      last_reason = e.what();
    }
  }
  if (!best) {
    throw InfeasibleSchedule("no truncation level in [" + std::to_string(m_lo) + ", " +
                             std::to_string(m_lo * k.m_grid_span) +
                             "] admits a batch size for " + noise.describe() + " (" +
                             last_reason + ")");
  }
  return *best;
}

Schedule plan_zeroth_order(const Potential& p, const NoiseModel& noise, const AssumptionCase& a,
                           double delta, const PlanConstants& k) {
  check_plan_inputs(p, a, delta);
  const double d = p.dim();
  const double s = p.holder_s();
  const double beta = p.holder_beta();
  const double Delta = a.warm_start;
  const double c = a.constant;
  const double scale = std::pow(beta * std::pow(d, s), 2.0 / (1.0 + s));

  double steps = 0.0;
  switch (a.tag) {
    case AssumptionCase::Tag::LSI: {
      const double lA = std::log(d + Delta + 1.0 / delta + c * beta);
      steps = c * beta * (d + Delta + lA) * lA * lA;
      break;
    }
    case AssumptionCase::Tag::PI: {
      const double lA = std::log(d + Delta + 1.0 / delta + c * std::pow(beta, 2.0 / (1.0 + s)));
      steps = c * scale * (1.0 + (Delta + lA) / d) * (Delta + std::log(1.0 / delta)) * lA;
      break;
    }
    case AssumptionCase::Tag::LC: {
      const double w2 = *a.w2_bound;
      const double lA =
          std::log(d + Delta + 1.0 / delta + std::pow(beta, 2.0 / (1.0 + s)) * w2 * w2);
      steps = scale * (1.0 + (Delta + lA) / d) * lA * w2 * w2 / (delta * delta);
      break;
    }
  }

  Schedule out;
  out.mode = Mode::ZerothOrder;
  out.assumption = a;
  out.delta = delta;
  out.M = 1.0;
  out.B = k.fors_B_zeroth;
  out.constants = k;
  out.N = ceil_steps(k.steps_const * steps);

  const double l = std::log(static_cast<double>(out.N) / delta);
  out.eta = 1.0 / (k.eta_const * scale * (1.0 + (Delta + l) / d) * l);

  const double fail = delta / (4.0 * static_cast<double>(out.N));
  out.n_batch = phi(noise, 1.0, fail, k.tail);
  out.G = gradient_norm_bound(p, Delta, fail);
  out.eps_prox = out.G;
  out.k_iters = 0;
  out.planned_queries = static_cast<double>(out.N) * 2.0 * static_cast<double>(out.n_batch) *
                        expected_w_per_step(out.B);
  return out;
}

namespace {

Vector gaussian_step(const Vector& x, double eta, Rng& rng) {
  Vector y = x;
  const double sd = std::sqrt(eta);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
  return y;
}

ForsConfig fors_config(const Schedule& sched) {
  ForsConfig cfg;
  cfg.B = sched.B;
  cfg.max_attempts = sched.constants.max_attempts;
  cfg.max_w_per_call = sched.constants.max_w_per_call;
  return cfg;
}

void check_schedule(const Potential& p, const Schedule& sched, Mode mode) {
  if (sched.mode != mode) throw DomainError("schedule mode does not match the oracle type");
  if (!(sched.eta > 0.0)) throw DomainError("schedule eta must be positive");
  if (sched.n_batch < 1) throw DomainError("schedule n_batch must be >= 1");
  if (mode == Mode::FirstOrder && p.m_s() > 0.0 && sched.eta > 0.5 / p.m_s() * (1.0 + 1e-12)) {
    throw DomainError("schedule eta violates eta <= 1/(2 m_s)");
  }
}

}  // namespace

Vector proximal_step(const Potential& p, StochasticGradient& oracle, const Schedule& sched,
                     const Vector& x, Rng& rng) {
  const Vector y = gaussian_step(x, sched.eta, rng);
  ProxConfig pc;
  pc.eta = sched.eta;
  pc.M = sched.M;
  pc.n_batch = sched.n_batch;
  pc.G = sched.G;
  pc.k_iters = sched.k_iters;
  const Vector xhat = approx_prox(p, oracle, y, pc);
  if (prox_residual(p, xhat, y, sched.eta) > sched.eta * sched.eps_prox) {
    ++oracle.ledger().prox_failures;
  }
  const RgoContext ctx(TiltProblem{p, y, sched.eta}, xhat, sched.B, sched.n_batch, sched.M,
                       sched.eps_prox);
  return sample_tilt(ctx, oracle, fors_config(sched), rng).x;
}

Vector proximal_step(const Potential& p, ValueOracle& oracle, const Schedule& sched,
                     const Vector& x, Rng& rng) {
  const Vector y = gaussian_step(x, sched.eta, rng);
  if (p.grad(y).norm() > sched.eps_prox) ++oracle.ledger().prox_failures;
  const RgoContext ctx(TiltProblem{p, y, sched.eta}, y, sched.B, sched.n_batch, sched.M,
                       sched.eps_prox);
  return sample_tilt(ctx, oracle, fors_config(sched), rng).x;
}

namespace {

template <class Oracle>
Vector run_chain_impl(const Potential& p, Oracle& oracle, const Schedule& sched, Vector x,
                      Rng& rng, const StepHook& on_step, Mode mode) {
  check_schedule(p, sched, mode);
  require_dim(x, p.dim(), "initial state");
  for (std::uint64_t step = 0; step < sched.N; ++step) {
    x = proximal_step(p, oracle, sched, x, rng);
    if (on_step) on_step(step, x);
  }
  return x;
}

}  // namespace

Vector run_chain(const Potential& p, StochasticGradient& oracle, const Schedule& sched,
                 Vector x0, Rng& rng, const StepHook& on_step) {
  return run_chain_impl(p, oracle, sched, std::move(x0), rng, on_step, Mode::FirstOrder);
}

Vector run_chain(const Potential& p, ValueOracle& oracle, const Schedule& sched, Vector x0,
                 Rng& rng, const StepHook& on_step) {
  return run_chain_impl(p, oracle, sched, std::move(x0), rng, on_step, Mode::ZerothOrder);
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(count, 1)));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr first_error;
  std::uint64_t first_index = std::numeric_limits<std::uint64_t>::max();

  auto worker = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
        stop.store(true, std::memory_order_relaxed);
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

SamplerOutput run_proximal_sampler(const Potential& p, const NoiseModel& noise,
                                   const Schedule& sched, const InitialSampler& mu0,
                                   const RunOptions& opts) {
  check_schedule(p, sched, sched.mode);
  SamplerOutput out;
  out.samples.resize(opts.chains);
  out.chain_ledgers.resize(opts.chains);
  const Rng root(opts.seed);

  parallel_for(opts.chains, opts.threads, [&](std::uint64_t c) {
    const Rng chain_root = root.derive(c);
    Rng init = chain_root.derive(0);
    Rng alg = chain_root.derive(2);
    QueryLedger& ledger = out.chain_ledgers[c];
    std::uint64_t step = 0;
    const StepHook hook = [&](std::uint64_t k, const Vector&) { step = k + 1; };
    try {
      Vector x = mu0(init);
      if (sched.mode == Mode::FirstOrder) {
        GradientOracle oracle(p, noise, chain_root.derive(1), ledger);
        out.samples[c] = run_chain(p, oracle, sched, std::move(x), alg, hook);
      } else {
        ValueOracle oracle(p, noise, chain_root.derive(1), ledger);
        out.samples[c] = run_chain(p, oracle, sched, std::move(x), alg, hook);
      }
    } catch (const ChainFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw ChainFailure(c, step, e.what());
    }
  });

  for (const auto& l : out.chain_ledgers) out.ledger += l;
  return out;
}

}  // namespace hiacc
