#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ballnls/basis.hpp"
#include "ballnls/dynamics.hpp"
#include "ballnls/error.hpp"
#include "ballnls/experiments.hpp"
#include "ballnls/io.hpp"
#include "ballnls/measures.hpp"
#include "ballnls/norms.hpp"
#include "ballnls/special.hpp"
#include "ballnls/stats.hpp"
#include "ballnls/version.hpp"

namespace py = pybind11;
using namespace ballnls;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

RadialState to_state(const CArray& a, double t = 0.0) {
  if (a.ndim() != 1) throw DomainError("coefficients must be one-dimensional");
  return RadialState(std::vector<Complex>(a.data(), a.data() + a.size()), t);
}

CArray from_state(const RadialState& s) {
  CArray out(static_cast<py::ssize_t>(s.coeffs.size()));
  std::copy(s.coeffs.begin(), s.coeffs.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vec(const DArray& a) { return {a.data(), a.data() + a.size()}; }

CArray trajectory_coefficients(const Trajectory& t) {
  const auto S = static_cast<py::ssize_t>(t.size()), N = static_cast<py::ssize_t>(t.N());
  CArray out({S, N});
  auto* p = out.mutable_data();
  for (const auto& st : t.states) p = std::copy(st.coeffs.begin(), st.coeffs.end(), p);
  return out;
}

Trajectory trajectory_from_array(const CArray& coeffs, double dt_record, double t0) {
  if (coeffs.ndim() != 2) throw DomainError("trajectory coefficients must be (samples, N)");
  Trajectory t;
  t.dt_record = dt_record;
  const auto S = coeffs.shape(0), N = coeffs.shape(1);
  for (py::ssize_t k = 0; k < S; ++k) {
    const auto* row = coeffs.data() + k * N;
    t.states.emplace_back(std::vector<Complex>(row, row + N), t0 + static_cast<double>(k) * dt_record);
    t.mass_log.push_back(mass(t.states.back()));
    t.energy_log.push_back(std::nan(""));
  }
  return t;
}

FreeMeasureSpec spec_for(int N, const std::string& preset) {
  return FreeMeasureSpec::preset(parse_measure_preset(preset), N);
}

}  // namespace

PYBIND11_MODULE(_ballnls, m) {
  m.doc() = "Radial cubic NLS Galerkin simulator on the unit ball";
  m.attr("__version__") = kArtifactVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<PrecisionError>(m, "PrecisionError", base.ptr());
  py::register_exception<StorageError>(m, "StorageError", base.ptr());
  py::register_exception<UndefinedRatioError>(m, "UndefinedRatioError", base.ptr());
  py::register_exception<FitDegenerateError>(m, "FitDegenerateError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SamplingError>(m, "SamplingError", base.ptr());
  py::register_exception<BlowUpError>(m, "BlowUpError", base.ptr());

  // basis
  m.def("sine_integral", &sine_integral, py::arg("x"));
  m.def("eigenfunction_value", [](int n, double r) { return eigenfunction_value(EigenIndex(n), r); },
        py::arg("n"), py::arg("r"));
  m.def(
      "eigenfunction_lp_norm",
      [](int n, double p, std::size_t half_waves) {
        return eigenfunction_lp_norm(EigenIndex(n), p, QuadratureRule::for_half_waves(half_waves));
      },
      py::arg("n"), py::arg("p"), py::arg("half_waves") = 1024);
  m.def("correlation", [](int a, int b, int c, int d) {
    return correlation(EigenIndex(a), EigenIndex(b), EigenIndex(c), EigenIndex(d));
  });
  m.def(
      "correlation_by_quadrature",
      [](int a, int b, int c, int d, double tol) {
        return correlation_by_quadrature(EigenIndex(a), EigenIndex(b), EigenIndex(c), EigenIndex(d), tol);
      },
      py::arg("n"), py::arg("n1"), py::arg("n2"), py::arg("n3"), py::arg("tolerance") = 1e-12);
  m.def("count_circle_representations", &count_circle_representations, py::arg("ell"), py::arg("N"));

  py::class_<CorrelationTensor>(m, "CorrelationTensor")
      .def_property_readonly("n_max", &CorrelationTensor::n_max)
      .def_property_readonly("quad_order", &CorrelationTensor::quad_order)
      .def_property_readonly("bound_constant", &CorrelationTensor::bound_constant)
      .def("__call__", &CorrelationTensor::operator())
      .def("dense", [](const CorrelationTensor& t, int N) {
        const auto d = t.dense(N);
        DArray out({N, N, N, N});
        std::copy(d.begin(), d.end(), out.mutable_data());
        return out;
      });
  m.def(
      "build_tensor",
      [](int n_max, int quad_order) {
        return build_tensor(n_max, tensor_rule(quad_order > 0 ? quad_order : default_quad_order(n_max)));
      },
      py::arg("n_max"), py::arg("quad_order") = 0);
  m.def("sigma_sum", [](int n, int N2, const CorrelationTensor& t) { return sigma_sum(EigenIndex(n), N2, t); });
  m.def("read_tensor_cache", &read_tensor_cache);
  m.def("write_tensor_cache", &write_tensor_cache);

  // measures
  m.def(
      "sigma",
      [](int N, const std::string& preset) {
        const auto s = spec_for(N, preset).sigma;
        return DArray(static_cast<py::ssize_t>(s.size()), s.data());
      },
      py::arg("N"), py::arg("preset") = "derived");
  m.def(
      "sample_free",
      [](int N, std::uint64_t seed, std::uint64_t stream, const std::string& preset) {
        RngStream rng(seed, stream);
        return from_state(sample_free(spec_for(N, preset), rng));
      },
      py::arg("N"), py::arg("seed"), py::arg("stream") = 0, py::arg("preset") = "derived");
  m.def(
      "sample_gibbs",
      [](int N, std::uint64_t seed, std::uint64_t stream, const std::string& preset, double beta, long max_attempts) {
        RngStream rng(seed, stream);
        const auto g = sample_gibbs(spec_for(N, preset), beta, rng, max_attempts);
        return py::make_tuple(from_state(g.state), g.attempts);
      },
      py::arg("N"), py::arg("seed"), py::arg("stream") = 0, py::arg("preset") = "derived", py::arg("beta") = 0.25,
      py::arg("max_attempts") = 100000);
  m.def("quartic_norm", [](const CArray& a, const CorrelationTensor& t) { return quartic_norm(to_state(a), t); });
  m.def(
      "chaos_moment",
      [](const CArray& alpha, int q, long trials, std::uint64_t seed) {
        RngStream rng(seed, 0);
        const auto e = chaos_moment_ratio(std::span<const Complex>(alpha.data(), alpha.size()), q, trials, rng);
        return py::dict(py::arg("moment") = e.moment, py::arg("ratio") = e.ratio, py::arg("std_error") = e.std_error);
      },
      py::arg("alpha"), py::arg("q"), py::arg("trials"), py::arg("seed") = 0);

  // dynamics
  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("coefficients", &trajectory_coefficients)
      .def_property_readonly("times",
                             [](const Trajectory& t) {
                               std::vector<double> v;
                               for (const auto& s : t.states) v.push_back(s.time);
                               return v;
                             })
      .def_readonly("mass", &Trajectory::mass_log)
      .def_readonly("energy", &Trajectory::energy_log)
      .def_readonly("dt_record", &Trajectory::dt_record)
      .def_property_readonly("N", &Trajectory::N)
      .def("__len__", &Trajectory::size);
  m.def("trajectory_from_array", &trajectory_from_array, py::arg("coefficients"), py::arg("dt_record"),
        py::arg("t0") = 0.0);
  m.def(
      "evolve",
      [](const CArray& a, double t_end, const std::string& method, double dt, double coupling, double dt_record,
         const CorrelationTensor* tensor) {
        IntegratorConfig cfg;
        cfg.method = parse_integrator(method);
        cfg.dt = dt > 0.0 ? dt : IntegratorConfig::default_dt(static_cast<int>(a.size()));
        cfg.coupling = coupling;
        const auto state = to_state(a);
        py::gil_scoped_release release;
        if (cfg.method == IntegratorMethod::kReferenceRk4) {
          if (!tensor) throw DomainError("the reference integrator needs a tensor");
          return evolve(state, t_end, Propagator(state.N(), cfg, *tensor), dt_record);
        }
        return evolve(state, t_end, Propagator(state.N(), cfg), dt_record);
      },
      py::arg("coefficients"), py::arg("t_end"), py::arg("method") = "collocation_rk4", py::arg("dt") = 0.0,
      py::arg("coupling") = 1.0, py::arg("dt_record") = 0.0, py::arg("tensor") = nullptr);
  m.def("mass", [](const CArray& a) { return mass(to_state(a)); });
  m.def("energy", [](const CArray& a) {
    const auto s = to_state(a);
    return conserved_quantities(s, ModalGrid(s.N())).second;
  });
  m.def("read_trajectory", &read_trajectory);
  m.def("write_trajectory", &write_trajectory);

  // norms
  m.def("hs_norm", [](const CArray& a, double s) { return hs_norm(to_state(a), s); }, py::arg("coefficients"),
        py::arg("s"));
  m.def(
      "mixed_norm",
      [](const Trajectory& t, double p, double q) {
        return mixed_norm(t, p, q, QuadratureRule::for_half_waves(static_cast<std::size_t>(4 * t.N())));
      },
      py::arg("trajectory"), py::arg("p"), py::arg("q"));
  m.def(
      "xsb_norm",
      [](const Trajectory& t, double s, double b, bool hann) {
        return xsb_norm(spectrum_from_trajectory(t, hann ? Taper::kSmooth : Taper::kNone), s, b);
      },
      py::arg("trajectory"), py::arg("s"), py::arg("b"), py::arg("hann") = false);
  m.def(
      "triple_norm_upper",
      [](const Trajectory& t, double T) { return triple_norm_upper(spectrum_from_trajectory(t), T).upper; },
      py::arg("trajectory"), py::arg("T"));
  m.def(
      "window_mean_square", [](const Trajectory& t, double T) { return window_mean_square(spectrum_from_trajectory(t), T); },
      py::arg("trajectory"), py::arg("T"));

  // stats
  m.def("ks_two_sample", [](const DArray& x, const DArray& y) {
    const auto r = ks_two_sample(to_vec(x), to_vec(y));
    return py::make_tuple(r.statistic, r.critical);
  });
  m.def(
      "fit_tail",
      [](const DArray& x, int grid_points, int bootstrap, std::uint64_t seed) {
        const auto f = fit_tail(to_vec(x), grid_points, bootstrap, seed);
        return py::dict(py::arg("c") = f.fitted_c, py::arg("kappa") = f.fitted_kappa,
                        py::arg("c_std_error") = f.c_std_error, py::arg("kappa_std_error") = f.kappa_std_error,
                        py::arg("lambda_grid") = f.lambda_grid,
                        py::arg("log_survival") = f.empirical_log_survival);
      },
      py::arg("samples"), py::arg("grid_points") = 40, py::arg("bootstrap") = 200, py::arg("seed") = 0);

  // experiments
  m.def(
      "run_invariance",
      [](int N, long samples, double t_compare, std::uint64_t seed, const std::string& preset) {
        EnsembleSettings s;
        s.seed = seed;
        s.preset = parse_measure_preset(preset);
        s.beta = preset_beta(s.preset);
        InvarianceReport r;
        {
          py::gil_scoped_release release;
          r = run_invariance(N, samples, t_compare, s);
        }
        py::dict obs;
        for (const auto& o : r.observables) obs[py::str(o.name)] = py::make_tuple(o.statistic, o.critical);
        return py::dict(py::arg("observables") = obs, py::arg("acceptance_rate") = r.acceptance_rate,
                        py::arg("max_relative_mass_drift") = r.max_relative_mass_drift,
                        py::arg("passes") = r.passes());
      },
      py::arg("N"), py::arg("samples"), py::arg("t_compare"), py::arg("seed") = 0, py::arg("preset") = "derived");
  m.def(
      "run_convergence_ladder",
      [](std::uint64_t seed, std::vector<int> N_values, double s, double t_end, const std::string& integrator,
         double coupling) {
        LadderSettings st;
        st.s = s;
        st.t_end = t_end;
        st.integrator = parse_integrator(integrator);
        st.coupling = coupling;
        ConvergenceLadder r;
        {
          py::gil_scoped_release release;
          r = run_convergence_ladder(seed, std::move(N_values), st);
        }
        return py::dict(py::arg("diffs") = r.diffs, py::arg("fitted_exponent") = r.fitted_exponent,
                        py::arg("strictly_decreasing") = r.strictly_decreasing, py::arg("dt") = r.dt);
      },
      py::arg("seed"), py::arg("N_values"), py::arg("s") = 0.4, py::arg("t_end") = 0.5,
      py::arg("integrator") = "collocation_split", py::arg("coupling") = 1.0);
  m.def(
      "run_embedding_study",
      [](int clause, int N, int trials, std::uint64_t seed) {
        EmbeddingReport r;
        {
          py::gil_scoped_release release;
          r = run_embedding_study(embedding_defaults(clause), N, trials, seed);
        }
        return py::dict(py::arg("ratios") = r.ratios, py::arg("max_ratio") = r.max_ratio,
                        py::arg("median_ratio") = r.median_ratio);
      },
      py::arg("clause"), py::arg("N"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "run_tail_experiment",
      [](int N, long samples, const std::string& kind, bool gibbs, std::uint64_t seed, int bootstrap) {
        EnsembleSettings s;
        s.seed = seed;
        TailSettings t;
        t.kind = parse_tail_kind(kind);
        t.gibbs = gibbs;
        t.bootstrap = bootstrap;
        TailReport r;
        {
          py::gil_scoped_release release;
          r = run_tail_experiment(N, samples, t, s);
        }
        return py::dict(py::arg("kappa") = r.fit.fitted_kappa, py::arg("c") = r.fit.fitted_c,
                        py::arg("kappa_std_error") = r.fit.kappa_std_error, py::arg("values") = r.values);
      },
      py::arg("N"), py::arg("samples"), py::arg("kind") = "L4_x", py::arg("gibbs") = false, py::arg("seed") = 0,
      py::arg("bootstrap") = 200);
}
