// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Python surface of the library. Thin, value-oriented wrappers: mixtures,
// forward operators, the closed-form flow quantities, and the solver entry
// points. Heavy calls release the GIL.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flowlps/baselines.hpp"
#include "flowlps/config.hpp"
#include "flowlps/dataset.hpp"
#include "flowlps/flow.hpp"
#include "flowlps/forward.hpp"
#include "flowlps/gmm.hpp"
#include "flowlps/rng.hpp"
#include "flowlps/sampler.hpp"
#include "flowlps/verify.hpp"

namespace py = pybind11;

namespace {

using namespace flowlps;

GaussianMixture mixture_from_parts(const std::vector<double>& weights,
                                   const std::vector<Eigen::VectorXd>& means,
                                   const std::vector<Eigen::MatrixXd>& covs) {
  if (weights.size() != means.size() || weights.size() != covs.size()) {
    throw std::invalid_argument("mixture: weights, means and covs must have equal length");
  }
  std::vector<GaussianMixture::Component> comps(weights.size());
  for (size_t k = 0; k < weights.size(); ++k) {
    comps[k] = {weights[k], means[k], covs[k]};
  }
  return GaussianMixture(std::move(comps));
}

SignalShape shape_from_pair(int height, int width) {
  if (width <= 0) throw std::invalid_argument("shape: width must be positive");
  return height <= 1 && width >= 1 && height == 1 ? SignalShape::vec(width)
                                                  : SignalShape::image(height, width);
}

ProximalSolver proximal_from_string(const std::string& name, double lr0, double decay_factor,
                                    int decay_every) {
  if (name == "ridge") return ProximalSolver::exact_ridge();
  if (name == "cg") return ProximalSolver::conjugate_gradient();
  if (name == "gd") return ProximalSolver::gradient_descent(lr0, decay_factor, decay_every);
  throw std::invalid_argument("proximal: expected ridge, cg or gd, got '" + name + "'");
}

py::list trajectory_to_list(const Trajectory& traj) {
  py::list out;
  for (const auto& r : traj.records) {
    py::dict d;
    d["step"] = r.step;
    d["t"] = r.t;
    d["phase"] = r.phase;
    d["residual_sq"] = r.residual_sq;
    d["anchor_dist_sq"] = r.anchor_dist_sq;
    if (r.mse_true) d["mse_true"] = *r.mse_true;
    out.append(std::move(d));
  }
  return out;
}

py::dict solve_lps(const GaussianMixture& prior, const ForwardOperator& op,
                   const Eigen::VectorXd& y, double sigma_n, const std::string& preset,
                   int n_steps, int alpha, const std::string& n_langevin, int n_total, double zeta,
                   const std::string& rho, const std::string& proximal, double lr0,
                   double decay_factor, int decay_every, std::uint64_t seed,
                   std::uint64_t instance, double sg_step_size) {
  Measurement meas(y, op, Decoder::identity(op.in_dim()), sigma_n);

  if (preset == "single-gradient") {
    SingleGradientResult r;
    {
      py::gil_scoped_release release;
      r = single_gradient_solve(meas, prior, n_steps, sg_step_size, alpha, seed, instance);
    }
    py::dict out;
    out["reconstruction"] = r.reconstruction;
    out["z_star"] = r.x0_hat;
    out["trajectory"] = trajectory_to_list(r.trajectory);
    return out;
  }

  LPSConfig cfg;
  cfg.n_steps = n_steps;
  cfg.alpha = alpha;
  cfg.n_langevin = parse_langevin(n_langevin);
  cfg.n_total = n_total;
  cfg.zeta = zeta;
  cfg.rho = parse_rho(rho);
  cfg.proximal = proximal_from_string(proximal, lr0, decay_factor, decay_every);
  cfg.seed = seed;

  if (preset == "pure-proximal") {
    cfg = preset_pure_proximal(cfg);
  } else if (preset == "pure-langevin") {
    cfg = preset_pure_langevin(cfg);
  } else if (preset == "unconditional") {
    cfg = preset_unconditional(cfg);
  } else if (preset != "flowlps") {
    throw std::invalid_argument("preset: unknown solver preset '" + preset + "'");
  }
  cfg.validate();

  SolveResult r;
  {
    py::gil_scoped_release release;
    r = solve(meas, prior, cfg, instance);
  }
  py::dict out;
  out["reconstruction"] = r.reconstruction;
  out["z_star"] = r.z_star;
  out["trajectory"] = trajectory_to_list(r.trajectory);
  return out;
}

}  // namespace

PYBIND11_MODULE(_flowlps, m) {
  m.doc() = "Langevin-proximal posterior sampling over analytic flow priors";

  py::class_<GaussianMixture>(m, "GaussianMixture")
      .def(py::init(&mixture_from_parts), py::arg("weights"), py::arg("means"), py::arg("covs"))
      .def_property_readonly("dim", &GaussianMixture::dim)
      .def_property_readonly("num_components", &GaussianMixture::num_components)
      .def("mean", &GaussianMixture::mean)
      .def("covariance", &GaussianMixture::covariance)
      .def("log_density", &GaussianMixture::log_density, py::arg("x"))
      .def(
          "sample",
          [](const GaussianMixture& g, std::uint64_t seed, int n) {
            RandomStream rng = derive_stream(seed, "py-sample");
            return g.sample(rng, n);
          },
          py::arg("seed"), py::arg("n"))
      .def(
          "weights",
          [](const GaussianMixture& g) {
            std::vector<double> w(static_cast<size_t>(g.num_components()));
            for (int k = 0; k < g.num_components(); ++k) w[static_cast<size_t>(k)] = g.component(k).weight;
            return w;
          })
      .def(
          "component_mean",
          [](const GaussianMixture& g, int k) {
            if (k < 0 || k >= g.num_components()) throw std::out_of_range("component index");
            return g.component(k).mean;
          },
          py::arg("k"))
      .def(
          "component_cov",
          [](const GaussianMixture& g, int k) {
            if (k < 0 || k >= g.num_components()) throw std::out_of_range("component index");
            return g.component(k).cov;
          },
          py::arg("k"));

  py::class_<ForwardOperator>(m, "ForwardOperator")
      .def_static("identity", &ForwardOperator::identity, py::arg("dim"))
      .def_static("mask", &ForwardOperator::mask, py::arg("dim"), py::arg("keep"))
      .def_static(
          "circular_blur",
          [](const Eigen::VectorXd& kernel, int height, int width) {
            return ForwardOperator::circular_blur(kernel, shape_from_pair(height, width));
          },
          py::arg("kernel"), py::arg("height"), py::arg("width"))
      .def_static(
          "downsample",
          [](int factor, int height, int width) {
            return ForwardOperator::downsample(factor, shape_from_pair(height, width));
          },
          py::arg("factor"), py::arg("height"), py::arg("width"))
      .def_static("dense", &ForwardOperator::dense, py::arg("a"))
      .def("apply", &ForwardOperator::apply, py::arg("x"))
      .def("adjoint", &ForwardOperator::adjoint, py::arg("u"))
      .def("materialize", &ForwardOperator::materialize)
      .def_property_readonly("in_dim", &ForwardOperator::in_dim)
      .def_property_readonly("out_dim", &ForwardOperator::out_dim);

  m.def(
      "make_blob_prior",
      [](int height, int width) { return make_blob_prior(shape_from_pair(height, width)); },
      py::arg("height"), py::arg("width"),
      "Exact generating mixture of the synthetic signal family.");

  m.def("gaussian_kernel", &gaussian_kernel, py::arg("size"), py::arg("sigma"));

  m.def("time_schedule", &time_schedule, py::arg("n_steps"), py::arg("alpha"));

  m.def("velocity", &velocity, py::arg("prior"), py::arg("t"), py::arg("x_t"));
  m.def("conditional_mean_x0", &conditional_mean_x0, py::arg("prior"), py::arg("t"),
        py::arg("x_t"));
  m.def(
      "marginal_at", [](const GaussianMixture& prior, double t) { return marginal_at(prior, t); },
      py::arg("prior"), py::arg("t"));
  m.def(
      "posterior_x0_given_y",
      [](const GaussianMixture& prior, const ForwardOperator& op, const Eigen::VectorXd& y,
         double sigma_n) { return posterior_x0_given_y(prior, op, y, sigma_n); },
      py::arg("prior"), py::arg("op"), py::arg("y"), py::arg("sigma_n"));

  m.def("solve_lps", &solve_lps, py::arg("prior"), py::arg("op"), py::arg("y"),
        py::arg("sigma_n"), py::arg("preset") = "flowlps", py::arg("n_steps") = 40,
        py::arg("alpha") = 3, py::arg("n_langevin") = "6", py::arg("n_total") = 15,
        py::arg("zeta") = 1e-4, py::arg("rho") = "sqrt-one-minus-sigma",
        py::arg("proximal") = "ridge", py::arg("lr0") = 0.1, py::arg("decay_factor") = 0.65,
        py::arg("decay_every") = 10, py::arg("seed") = 0, py::arg("instance") = 0,
        py::arg("sg_step_size") = 1.0,
        "Run one solver on a linear inverse problem with the identity decoder. Returns a dict "
        "with reconstruction, z_star and the phase trajectory.");

  m.def(
      "verify_fast",
      []() {
        std::vector<CheckResult> checks;
        {
          py::gil_scoped_release release;
          checks = verify_suite(VerifyLevel::Fast);
        }
        py::list out;
        for (const auto& c : checks) out.append(py::make_tuple(c.name, c.pass, c.detail));
        return out;
      },
      "Run the deterministic invariant battery; returns (name, pass, detail) tuples.");
}
