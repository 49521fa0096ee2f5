// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "flowlps/baselines.hpp"
#include "flowlps/dataset.hpp"
#include "flowlps/errors.hpp"
#include "flowlps/textio.hpp"

namespace flowlps {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx) {
  for (const auto& [key, unused] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw std::invalid_argument(std::string("config: unknown key '") + key + "' in " + ctx);
  }
}

json parse_json_text(const std::string& text, const char* ctx) {
  // Comments are allowed so shipped examples can annotate every knob.
  json j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  if (!j.is_object()) throw std::invalid_argument(std::string("config: ") + ctx + " must be an object");
  return j;
}

json load_json_file(const std::string& path, const char* ctx) {
  std::ifstream in(path);
  if (!in) throw IoFailure(std::string(ctx) + ": cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_json_text(text, ctx);
}

GaussianMixture mixture_from_json(const json& j, const char* ctx) {
  check_keys(j, {"dim", "components"}, ctx);
  const int dim = j.at("dim").get<int>();
  if (dim < 1) throw std::invalid_argument("prior: dim must be positive");
  std::vector<GaussianMixture::Component> comps;
  for (const auto& cj : j.at("components")) {
    check_keys(cj, {"weight", "mean", "cov"}, "prior component");
    GaussianMixture::Component c;
    c.weight = cj.at("weight").get<double>();
    const auto mean = cj.at("mean").get<std::vector<double>>();
    const auto cov = cj.at("cov").get<std::vector<double>>();
    if (static_cast<int>(mean.size()) != dim)
      throw std::invalid_argument("prior: mean length does not match dim");
    if (static_cast<int>(cov.size()) != dim * dim)
      throw std::invalid_argument("prior: cov must hold dim*dim row-major entries");
    c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
    c.cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cov.data(), dim, dim);
    comps.push_back(std::move(c));
  }
  return GaussianMixture(std::move(comps));
}

json mixture_to_json(const GaussianMixture& gmm) {
  json j;
  j["dim"] = gmm.dim();
  json comps = json::array();
  for (int k = 0; k < gmm.num_components(); ++k) {
    const auto& c = gmm.component(k);
    json cj;
    cj["weight"] = c.weight;
    cj["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
    std::vector<double> cov;
    cov.reserve(c.cov.size());
    for (Eigen::Index r = 0; r < c.cov.rows(); ++r)
      for (Eigen::Index col = 0; col < c.cov.cols(); ++col) cov.push_back(c.cov(r, col));
    cj["cov"] = std::move(cov);
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  return j;
}

SignalShape parse_shape(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 2)
    throw std::invalid_argument("config: shape must be [length] or [height, width]");
  if (j.size() == 1) return SignalShape::vec(j[0].get<int>());
  return SignalShape::image(j[0].get<int>(), j[1].get<int>());
}

RhoSchedule parse_rho_json(const json& j) {
  if (j.is_number()) return RhoSchedule::constant(j.get<double>());
  return parse_rho(j.get<std::string>());
}

LangevinSchedule parse_langevin_json(const json& j) {
  if (j.is_number_integer()) return LangevinSchedule::fixed(j.get<int>());
  return parse_langevin(j.get<std::string>());
}

void apply_proximal_json(const json& j, ProximalSolver& prox) {
  if (j.is_string()) {
    const std::string kind = j.get<std::string>();
    if (kind == "ridge") prox.kind = ProximalKind::ExactRidge;
    else if (kind == "cg") prox.kind = ProximalKind::ConjugateGradient;
    else if (kind == "gd") prox.kind = ProximalKind::GradientDescent;
    else throw std::invalid_argument("config: proximal kind must be ridge, cg, or gd");
    return;
  }
  check_keys(j, {"kind", "lr0", "decay_factor", "decay_every", "cg_tol", "cg_max_iter"}, "proximal");
  if (j.contains("kind")) apply_proximal_json(j.at("kind"), prox);
  if (j.contains("lr0")) prox.lr0 = j.at("lr0").get<double>();
  if (j.contains("decay_factor")) prox.decay_factor = j.at("decay_factor").get<double>();
  if (j.contains("decay_every")) prox.decay_every = j.at("decay_every").get<int>();
  if (j.contains("cg_tol")) prox.cg_tol = j.at("cg_tol").get<double>();
  if (j.contains("cg_max_iter")) prox.cg_max_iter = j.at("cg_max_iter").get<int>();
}

void apply_lps_json(const json& j, LPSConfig& lps) {
  if (j.contains("n_steps")) lps.n_steps = j.at("n_steps").get<int>();
  if (j.contains("alpha")) lps.alpha = j.at("alpha").get<int>();
  if (j.contains("n_langevin")) lps.n_langevin = parse_langevin_json(j.at("n_langevin"));
  if (j.contains("n_total")) lps.n_total = j.at("n_total").get<int>();
  if (j.contains("zeta")) lps.zeta = j.at("zeta").get<double>();
  if (j.contains("rho")) lps.rho = parse_rho_json(j.at("rho"));
  if (j.contains("proximal")) apply_proximal_json(j.at("proximal"), lps.proximal);
}

SolverSpec parse_solver(const json& j, const std::string& task) {
  check_keys(j,
             {"name", "preset", "n_steps", "alpha", "n_langevin", "n_total", "zeta", "rho",
              "proximal", "steps", "step_size"},
             "solver");
  SolverSpec s;
  s.preset = j.value("preset", std::string("flowlps"));
  s.lps = default_lps_for_task(task);
  apply_lps_json(j, s.lps);
  if (s.preset == "flowlps") {
    // no transform
  } else if (s.preset == "pure-proximal") {
    s.lps = preset_pure_proximal(s.lps);
  } else if (s.preset == "pure-langevin") {
    s.lps = preset_pure_langevin(s.lps);
  } else if (s.preset == "unconditional") {
    s.lps = preset_unconditional(s.lps);
  } else if (s.preset == "single-gradient") {
    s.sg_steps = j.value("steps", 40);
    s.sg_step_size = j.value("step_size", 1.0);
    s.sg_alpha = j.value("alpha", 3);
  } else {
    throw std::invalid_argument("config: unknown solver preset '" + s.preset + "'");
  }
  s.name = j.value("name", s.preset);
  return s;
}

SweepSpec parse_sweep(const json& j) {
  check_keys(j, {"n_langevin", "rho", "n_total"}, "sweep");
  SweepSpec sweep;
  if (j.contains("n_langevin"))
    for (const auto& v : j.at("n_langevin")) sweep.n_langevin.push_back(parse_langevin_json(v));
  if (j.contains("rho"))
    for (const auto& v : j.at("rho")) sweep.rho.push_back(parse_rho_json(v));
  if (j.contains("n_total"))
    for (const auto& v : j.at("n_total")) sweep.n_total.push_back(v.get<int>());
  return sweep;
}

OperatorSpec parse_operator(const json& j) {
  check_keys(j, {"kind", "keep", "keep_frac", "kernel_size", "kernel_sigma", "factor"}, "operator");
  OperatorSpec op;  // generic defaults; an explicit block overrides the task's
  op.kind = j.value("kind", std::string("identity"));
  if (j.contains("keep")) op.keep = j.at("keep").get<std::vector<int>>();
  if (j.contains("keep_frac")) op.keep_frac = j.at("keep_frac").get<double>();
  if (j.contains("kernel_size")) op.kernel_size = j.at("kernel_size").get<int>();
  if (j.contains("kernel_sigma")) op.kernel_sigma = j.at("kernel_sigma").get<double>();
  if (j.contains("factor")) op.factor = j.at("factor").get<int>();
  return op;
}

PriorSpec parse_prior(const json& j) {
  check_keys(j, {"mode", "path", "k", "n", "dim", "components"}, "prior");
  PriorSpec p;
  const std::string mode = j.value("mode", std::string("blob"));
  if (mode == "blob") {
    p.mode = PriorSpec::Mode::Blob;
  } else if (mode == "file") {
    p.mode = PriorSpec::Mode::File;
    p.path = j.at("path").get<std::string>();
  } else if (mode == "inline") {
    p.mode = PriorSpec::Mode::Inline;
    json gj;
    gj["dim"] = j.at("dim");
    gj["components"] = j.at("components");
    p.inline_gmm = mixture_from_json(gj, "inline prior");
  } else if (mode == "fit") {
    p.mode = PriorSpec::Mode::Fit;
    p.path = j.value("path", std::string());
    p.fit_k = j.value("k", 3);
    p.fit_n = j.value("n", 500);
  } else {
    throw std::invalid_argument("config: prior mode must be blob, file, inline, or fit");
  }
  return p;
}

DecoderSpec parse_decoder(const json& j) {
  check_keys(j, {"kind", "gain", "seed"}, "decoder");
  DecoderSpec d;
  d.kind = j.value("kind", std::string("identity"));
  d.gain = j.value("gain", 0.5);
  d.seed = j.value("seed", std::uint64_t{0});
  return d;
}

}  // namespace

RhoSchedule parse_rho(const std::string& text) {
  if (text == "zero") return RhoSchedule::zero();
  if (text == "one-minus-sigma") return RhoSchedule::one_minus_sigma();
  if (text == "sqrt-one-minus-sigma") return RhoSchedule::sqrt_one_minus_sigma();
  if (text.rfind("const:", 0) == 0) return RhoSchedule::constant(parse_double(text.substr(6)));
  try {
    return RhoSchedule::constant(parse_double(text));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: bad rho schedule '" + text + "'");
  }
}

LangevinSchedule parse_langevin(const std::string& text) {
  const auto arrow = text.find("->");
  try {
    if (arrow == std::string::npos)
      return LangevinSchedule::fixed(static_cast<int>(parse_int(text)));
    return LangevinSchedule::linear_decay(static_cast<int>(parse_int(text.substr(0, arrow))),
                                          static_cast<int>(parse_int(text.substr(arrow + 2))));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: bad n_langevin schedule '" + text + "'");
  }
}

LPSConfig default_lps_for_task(const std::string& task) {
  LPSConfig lps;
  lps.n_steps = 40;
  lps.n_total = 15;
  lps.zeta = 1e-4;
  lps.rho = RhoSchedule::sqrt_one_minus_sigma();
  if (task == "box-inpaint") {
    lps.alpha = 3;
    lps.n_langevin = LangevinSchedule::fixed(4);
    lps.proximal = ProximalSolver::gradient_descent(0.1, 0.65, 10);
  } else if (task == "random-inpaint") {
    lps.alpha = 3;
    lps.n_langevin = LangevinSchedule::fixed(5);
    lps.proximal = ProximalSolver::gradient_descent(0.1, 0.65, 10);
  } else if (task == "gaussian-deblur" || task == "motion-deblur") {
    lps.alpha = 3;
    lps.n_langevin = LangevinSchedule::fixed(6);
    lps.proximal = ProximalSolver::gradient_descent(0.1, 0.65, 10);
  } else if (task == "super-resolution") {
    lps.alpha = 5;
    lps.n_langevin = LangevinSchedule::fixed(4);
    lps.proximal = ProximalSolver::gradient_descent(0.5, 0.85, 5);
  } else {
    throw std::invalid_argument(
        "unknown task '" + task +
        "' (expected box-inpaint, random-inpaint, gaussian-deblur, motion-deblur, "
        "or super-resolution)");
  }
  return lps;
}

ExperimentConfig default_config_for_task(const std::string& task) {
  ExperimentConfig cfg;
  cfg.task = task;
  cfg.shape = SignalShape::image(8, 8);
  cfg.sigma_n = 0.03;
  if (task == "box-inpaint") {
    cfg.op.kind = "box-mask";
  } else if (task == "random-inpaint") {
    cfg.op.kind = "random-mask";
    cfg.op.keep_frac = 0.3;
  } else if (task == "gaussian-deblur") {
    cfg.op.kind = "gaussian-blur";
    cfg.op.kernel_size = 5;
    cfg.op.kernel_sigma = 1.0;
  } else if (task == "motion-deblur") {
    cfg.op.kind = "motion-blur";
    cfg.op.kernel_size = 5;
  } else if (task == "super-resolution") {
    cfg.op.kind = "downsample";
    cfg.op.factor = 2;
  } else {
    default_lps_for_task(task);  // throws with the task list
  }
  SolverSpec s;
  s.name = "flowlps";
  s.preset = "flowlps";
  s.lps = default_lps_for_task(task);
  cfg.solvers.push_back(std::move(s));
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) try {
  const json j = parse_json_text(json_text, "experiment");
  check_keys(j,
             {"task", "shape", "prior", "operator", "decoder", "sigma_n", "solvers", "sweep",
              "instances", "seed", "out_dir", "peak", "timing"},
             "experiment");
  ExperimentConfig cfg = default_config_for_task(j.value("task", std::string("random-inpaint")));
  if (j.contains("shape")) cfg.shape = parse_shape(j.at("shape"));
  if (j.contains("prior")) cfg.prior = parse_prior(j.at("prior"));
  if (j.contains("operator")) cfg.op = parse_operator(j.at("operator"));
  if (j.contains("decoder")) cfg.decoder = parse_decoder(j.at("decoder"));
  if (j.contains("sigma_n")) cfg.sigma_n = j.at("sigma_n").get<double>();
  if (j.contains("solvers")) {
    cfg.solvers.clear();
    for (const auto& sj : j.at("solvers")) cfg.solvers.push_back(parse_solver(sj, cfg.task));
  }
  if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
  if (j.contains("instances")) cfg.instances = j.at("instances").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("peak")) cfg.peak = j.at("peak").get<double>();
  if (j.contains("timing")) cfg.timing = j.at("timing").get<bool>();
  cfg.validate();
  return cfg;
} catch (const json::exception& e) {
  throw std::invalid_argument(std::string("config: ") + e.what());
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("load_experiment_config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_experiment_config(text);
}

void ExperimentConfig::validate() const {
  if (shape.total() < 1) throw std::invalid_argument("config: empty shape");
  if ((prior.mode == PriorSpec::Mode::Blob || prior.mode == PriorSpec::Mode::Fit) &&
      shape.total() > kMaxSignalDim)
    throw std::invalid_argument("config: blob priors support at most 256 dimensions");
  if (!(sigma_n > 0.0)) throw std::invalid_argument("config: sigma_n must be positive");
  if (!(peak > 0.0)) throw std::invalid_argument("config: peak must be positive");
  if (instances < 1) throw std::invalid_argument("config: instances must be at least 1");
  if (decoder.kind != "identity" && decoder.kind != "smooth")
    throw std::invalid_argument("config: decoder kind must be identity or smooth");
  const bool linear_decoder = decoder.kind == "identity";
  static const char* kOpKinds[] = {"identity",      "mask",        "random-mask", "box-mask",
                                   "gaussian-blur", "motion-blur", "downsample"};
  if (std::find_if(std::begin(kOpKinds), std::end(kOpKinds),
                   [&](const char* k) { return op.kind == k; }) == std::end(kOpKinds))
    throw std::invalid_argument("config: unknown operator kind '" + op.kind + "'");
  if (op.kind == "random-mask" && !(op.keep_frac > 0.0 && op.keep_frac <= 1.0))
    throw std::invalid_argument("config: keep_frac must lie in (0, 1]");
  if (solvers.empty()) throw std::invalid_argument("config: at least one solver required");
  for (const auto& s : solvers) {
    if (s.name.empty() || s.name.find(',') != std::string::npos ||
        s.name.find('/') != std::string::npos)
      throw std::invalid_argument("config: solver names must be nonempty without ',' or '/'");
    if (s.preset == "single-gradient") {
      if (s.sg_steps < 1) throw std::invalid_argument("config: single-gradient needs steps >= 1");
      if (s.sg_alpha < 1) throw std::invalid_argument("config: single-gradient needs alpha >= 1");
      if (!(s.sg_step_size >= 0.0))
        throw std::invalid_argument("config: single-gradient step_size must be >= 0");
      continue;
    }
    s.lps.validate();
    const int min_langevin = std::min(s.lps.n_langevin.start, s.lps.n_langevin.end);
    if (!linear_decoder && s.lps.proximal.kind != ProximalKind::GradientDescent &&
        s.lps.n_total > min_langevin)
      throw std::invalid_argument(
          "config: a smooth decoder needs the gradient-descent proximal solver");
  }
}

void save_prior_json(const std::string& path, const GaussianMixture& gmm) {
  std::ofstream out(path);
  if (!out) throw IoFailure("save_prior_json: cannot open " + path);
  out << mixture_to_json(gmm).dump(2) << '\n';
  if (!out) throw IoFailure("save_prior_json: write failed for " + path);
}

GaussianMixture load_prior_json(const std::string& path) try {
  return mixture_from_json(load_json_file(path, "load_prior_json"), "prior file");
} catch (const json::exception& e) {
  throw std::invalid_argument(std::string("prior file: ") + e.what());
}

ForwardOperator build_operator(const OperatorSpec& spec, const SignalShape& shape,
                               RandomStream* mask_rng) {
  const int d = shape.total();
  if (spec.kind == "identity") return ForwardOperator::identity(d);
  if (spec.kind == "mask") return ForwardOperator::mask(d, spec.keep);
  if (spec.kind == "random-mask") {
    if (mask_rng == nullptr)
      throw std::invalid_argument("build_operator: random-mask needs a random stream");
    int m = static_cast<int>(std::lround(spec.keep_frac * d));
    if (m < 1) m = 1;
    if (m > d) m = d;
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < m; ++i) {
      const int span = d - i;
      const int off = static_cast<int>(mask_rng->uniform() * span);
      std::swap(perm[i], perm[i + (off < span ? off : span - 1)]);
    }
    std::vector<int> keep(perm.begin(), perm.begin() + m);
    std::sort(keep.begin(), keep.end());
    return ForwardOperator::mask(d, keep);
  }
  if (spec.kind == "box-mask") {
    // Hide the centered box spanning half of each axis; observe the rest.
    auto inside = [](int i, int n) {
      const int len = n / 2, start = (n - len) / 2;
      return i >= start && i < start + len;
    };
    std::vector<int> keep;
    if (shape.is_2d) {
      for (int r = 0; r < shape.height; ++r)
        for (int c = 0; c < shape.width; ++c)
          if (!(inside(r, shape.height) && inside(c, shape.width)))
            keep.push_back(r * shape.width + c);
    } else {
      for (int i = 0; i < d; ++i)
        if (!inside(i, d)) keep.push_back(i);
    }
    return ForwardOperator::mask(d, keep);
  }
  if (spec.kind == "gaussian-blur")
    return ForwardOperator::circular_blur(gaussian_kernel(spec.kernel_size, spec.kernel_sigma),
                                          shape);
  if (spec.kind == "motion-blur") {
    // Horizontal box kernel: uniform streak along the fast axis.
    if (spec.kernel_size < 1 || spec.kernel_size % 2 == 0)
      throw std::invalid_argument("build_operator: motion-blur kernel_size must be odd");
    Eigen::VectorXd kernel =
        Eigen::VectorXd::Constant(spec.kernel_size, 1.0 / double(spec.kernel_size));
    return ForwardOperator::circular_blur(kernel, shape);
  }
  if (spec.kind == "downsample") return ForwardOperator::downsample(spec.factor, shape);
  throw std::invalid_argument("build_operator: unknown kind '" + spec.kind + "'");
}

Decoder make_smooth_decoder(int dim, double gain, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_smooth_decoder: dim must be positive");
  RandomStream rng = derive_stream(seed, "decoder");
  const double scale = 1.0 / std::sqrt(double(dim));
  Eigen::MatrixXd w(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) w(r, c) = scale * rng.normal();
  Eigen::VectorXd b(dim);
  for (int i = 0; i < dim; ++i) b[i] = 0.1 * rng.normal();
  return Decoder::smooth(w, b, gain);
}

Decoder build_decoder(const DecoderSpec& spec, int dim) {
  if (spec.kind == "identity") return Decoder::identity(dim);
  if (spec.kind == "smooth") return make_smooth_decoder(dim, spec.gain, spec.seed);
  throw std::invalid_argument("build_decoder: unknown kind '" + spec.kind + "'");
}

ResolvedPriors resolve_priors(const ExperimentConfig& cfg) {
  switch (cfg.prior.mode) {
    case PriorSpec::Mode::Blob: {
      GaussianMixture g = make_blob_prior(cfg.shape);
      return {g, g};
    }
    case PriorSpec::Mode::File: {
      GaussianMixture g = load_prior_json(cfg.prior.path);
      if (g.dim() != cfg.shape.total())
        throw std::invalid_argument("config: prior file dimension does not match shape");
      return {g, g};
    }
    case PriorSpec::Mode::Inline: {
      const GaussianMixture& g = *cfg.prior.inline_gmm;
      if (g.dim() != cfg.shape.total())
        throw std::invalid_argument("config: inline prior dimension does not match shape");
      return {g, g};
    }
    case PriorSpec::Mode::Fit: {
      GaussianMixture truth = make_blob_prior(cfg.shape);
      Eigen::MatrixXd data;
      if (!cfg.prior.path.empty()) {
        data = load_dataset_csv(cfg.prior.path);
        if (data.cols() != cfg.shape.total())
          throw std::invalid_argument("config: fit data dimension does not match shape");
      } else {
        RandomStream rng = derive_stream(cfg.seed, "fit-data");
        data = generate_blob_dataset(cfg.shape, cfg.prior.fit_n, rng).samples;
      }
      EmOptions opts;
      opts.seed = cfg.seed;
      GaussianMixture solver = fit_em(data, cfg.prior.fit_k, opts);
      return {std::move(truth), std::move(solver)};
    }
  }
  throw std::logic_error("resolve_priors: unreachable");
}

std::vector<SolverSpec> expand_sweep(const std::vector<SolverSpec>& base, const SweepSpec& sweep) {
  if (sweep.empty()) return base;
  std::vector<SolverSpec> out;
  for (const auto& s : base) {
    if (s.preset == "single-gradient") {
      out.push_back(s);  // sweep axes are sampler settings; baselines ride along once
      continue;
    }
    std::vector<SolverSpec> stage{s};
    if (!sweep.n_langevin.empty()) {
      std::vector<SolverSpec> next;
      for (const auto& cur : stage)
        for (const auto& nl : sweep.n_langevin) {
          SolverSpec v = cur;
          v.lps.n_langevin = nl;
          v.name = cur.name + "/nl=" + langevin_schedule_name(nl);
          next.push_back(std::move(v));
        }
      stage = std::move(next);
    }
    if (!sweep.rho.empty()) {
      std::vector<SolverSpec> next;
      for (const auto& cur : stage)
        for (const auto& rho : sweep.rho) {
          SolverSpec v = cur;
          v.lps.rho = rho;
          v.name = cur.name + "/rho=" + rho_schedule_name(rho);
          next.push_back(std::move(v));
        }
      stage = std::move(next);
    }
    if (!sweep.n_total.empty()) {
      std::vector<SolverSpec> next;
      for (const auto& cur : stage)
        for (int np : sweep.n_total) {
          SolverSpec v = cur;
          v.lps.n_total = np;
          v.name = cur.name + "/np=" + std::to_string(np);
          next.push_back(std::move(v));
        }
      stage = std::move(next);
    }
    for (auto& v : stage) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace flowlps
