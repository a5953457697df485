#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hiacc/errors.hpp"
#include "hiacc/experiment.hpp"
#include "hiacc/fors.hpp"
#include "hiacc/lowerbound.hpp"
#include "hiacc/oracles.hpp"
#include "hiacc/potential.hpp"
#include "hiacc/sampler.hpp"
#include "hiacc/verify.hpp"

namespace py = pybind11;
using namespace hiacc;

namespace {

py::dict ledger_dict(const QueryLedger& l) {
  py::dict d;
  d["grad_queries"] = l.grad_queries;
  d["value_queries"] = l.value_queries;
  d["fors_attempts"] = l.fors_attempts;
  d["w_draws"] = l.w_draws;
  d["prox_iters"] = l.prox_iters;
  d["rgo_calls"] = l.rgo_calls;
  d["prox_failures"] = l.prox_failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "High-accuracy proximal sampling with stochastic oracles";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<UnsupportedCombination>(m, "UnsupportedCombination", base.ptr());
  py::register_exception<InfeasibleSchedule>(m, "InfeasibleSchedule", base.ptr());
  py::register_exception<BudgetViolation>(m, "BudgetViolation", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

  py::class_<Potential>(m, "Potential")
      .def_property_readonly("name", &Potential::name)
      .def_property_readonly("dim", &Potential::dim)
      .def_property_readonly("holder_s", &Potential::holder_s)
      .def_property_readonly("holder_beta", &Potential::holder_beta)
      .def_property_readonly("m_s", &Potential::m_s)
      .def_property_readonly("lsi_const", &Potential::lsi_const)
      .def("value", &Potential::value, py::arg("x"))
      .def("grad", &Potential::grad, py::arg("x"))
      .def("__repr__", [](const Potential& p) { return "<Potential " + p.name() + ">"; });

  m.def(
      "make_potential",
      [](const std::string& key, std::map<std::string, double> scalars,
         std::map<std::string, std::vector<double>> lists) {
        return make_potential(PotentialSpec{key, std::move(scalars), std::move(lists)});
      },
      py::arg("key"), py::arg("scalars") = std::map<std::string, double>{},
      py::arg("lists") = std::map<std::string, std::vector<double>>{});
  m.def("potential_catalog", &potential_catalog);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def_readonly("sigma", &NoiseModel::sigma)
      .def_property_readonly("key", &NoiseModel::key)
      .def("describe", &NoiseModel::describe)
      .def("__repr__", [](const NoiseModel& n) { return "<NoiseModel " + n.describe() + ">"; });
  m.def("make_noise", &make_noise, py::arg("key"),
        py::arg("params") = std::map<std::string, double>{});
  m.def("noise_catalog", &noise_catalog);
  m.def(
      "eps_tail", [](const NoiseModel& n, std::uint64_t batch, double M) { return eps_tail(n, batch, M); },
      py::arg("noise"), py::arg("n"), py::arg("M"));
  m.def(
      "phi", [](const NoiseModel& n, double M, double delta) { return phi(n, M, delta); },
      py::arg("noise"), py::arg("M"), py::arg("delta"));

  py::class_<AssumptionCase>(m, "AssumptionCase")
      .def_static("lsi", &AssumptionCase::lsi, py::arg("c_lsi"), py::arg("warm_start"))
      .def_static("pi", &AssumptionCase::pi, py::arg("c_pi"), py::arg("warm_start"))
      .def_static("lc", &AssumptionCase::lc, py::arg("w2"), py::arg("warm_start"))
      .def_readonly("constant", &AssumptionCase::constant)
      .def_readonly("warm_start", &AssumptionCase::warm_start);

  py::class_<Schedule>(m, "Schedule")
      .def_readonly("delta", &Schedule::delta)
      .def_readonly("eta", &Schedule::eta)
      .def_readonly("N", &Schedule::N)
      .def_readonly("M", &Schedule::M)
      .def_readonly("n_batch", &Schedule::n_batch)
      .def_readonly("k_iters", &Schedule::k_iters)
      .def_readonly("B", &Schedule::B)
      .def_readonly("planned_queries", &Schedule::planned_queries)
      .def("to_json", [](const Schedule& s) { return s.to_json(); });

  m.def(
      "plan_first_order",
      [](const Potential& p, const NoiseModel& n, const AssumptionCase& a, double delta) {
        return plan_first_order(p, n, a, delta);
      },
      py::arg("potential"), py::arg("noise"), py::arg("assumption"), py::arg("delta"));
  m.def(
      "plan_zeroth_order",
      [](const Potential& p, const NoiseModel& n, const AssumptionCase& a, double delta) {
        return plan_zeroth_order(p, n, a, delta);
      },
      py::arg("potential"), py::arg("noise"), py::arg("assumption"), py::arg("delta"));
  m.def("gaussian_warm_start", &gaussian_warm_start, py::arg("m0"), py::arg("s0"), py::arg("m"),
        py::arg("s"), py::arg("dim"));

  m.def(
      "run_proximal_sampler",
      [](const Potential& p, const NoiseModel& noise, const Schedule& sched, double init_mean,
         double init_sd, std::uint64_t seed, std::uint64_t chains, unsigned threads) {
        const int d = p.dim();
        const InitialSampler mu0 = [=](Rng& r) {
          Vector x(d);
          for (int i = 0; i < d; ++i) x[i] = init_mean + init_sd * r.normal();
          return x;
        };
        SamplerOutput out;
        {
          py::gil_scoped_release release;
          out = run_proximal_sampler(p, noise, sched, mu0, RunOptions{seed, chains, threads});
        }
        py::array_t<double> samples({static_cast<py::ssize_t>(chains), static_cast<py::ssize_t>(d)});
        auto view = samples.mutable_unchecked<2>();
        for (std::size_t c = 0; c < out.samples.size(); ++c) {
          for (int i = 0; i < d; ++i) view(c, i) = out.samples[c][i];
        }
        return py::make_tuple(samples, ledger_dict(out.ledger));
      },
      py::arg("potential"), py::arg("noise"), py::arg("schedule"), py::arg("init_mean") = 0.0,
      py::arg("init_sd") = 1.0, py::arg("seed") = 0, py::arg("chains") = 1, py::arg("threads") = 0);

  m.def(
      "acceptance_probability",
      [](std::vector<double> support, std::vector<double> weights, double B) {
        return acceptance_probability(DiscreteDist{std::move(support), std::move(weights)}, B);
      },
      py::arg("support"), py::arg("weights"), py::arg("B"));
  m.def("fors_wdraw_bound", &fors_wdraw_bound, py::arg("B"), py::arg("delta"));

  m.def(
      "ks_normal",
      [](std::vector<double> xs, double mean, double sd) {
        const TestResult r = ks_test(std::move(xs), normal_law(mean, sd).cdf);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("samples"), py::arg("mean") = 0.0, py::arg("sd") = 1.0);
  m.def(
      "tv_normal",
      [](const std::vector<double>& xs, double mean, double sd, int bins) {
        const TvEstimate t = empirical_tv_1d(xs, normal_law(mean, sd), bins);
        return py::make_tuple(t.tv, t.bias_bound);
      },
      py::arg("samples"), py::arg("mean") = 0.0, py::arg("sd") = 1.0, py::arg("bins") = 50);
  m.def("kolmogorov_q", &kolmogorov_q, py::arg("lam"));
  m.def("scaling_slope", &scaling_slope, py::arg("xs"), py::arg("ys"));

  m.def(
      "f_psi",
      [](const std::string& kind, double s, double delta) {
        if (kind == "power") return f_psi(PsiFunction::power(s), delta);
        if (kind == "exp_power") return f_psi(PsiFunction::exp_power(s), delta);
        throw DomainError("psi kind must be 'power' or 'exp_power'");
      },
      py::arg("kind"), py::arg("s"), py::arg("delta"));

  m.def(
      "validate_config", [](const std::string& text) { return validate_config(text).echo; },
      py::arg("config_json"));
  m.def("experiment_catalog", &experiment_catalog);
  m.def(
      "run_experiment",
      [](const std::string& text) {
        const ExperimentConfig cfg = validate_config(text);
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiment(cfg);
        }
        py::dict d;
        d["report"] = rep.json;
        d["csv"] = rep.csv();
        d["all_pass"] = rep.all_pass();
        d["ledger"] = ledger_dict(rep.ledger);
        return d;
      },
      py::arg("config_json"));
}
