#include "skt/studies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skt {

using nlohmann::json;

namespace {

json moments_json(const RunningMoments& m) {
  return {{"mean", m.mean}, {"stderr", m.stderr_of_mean()}, {"count", m.count}};
}

ModelParams scalar_params() {
  Vector a0(1);
  a0 << 1.0;
  Matrix a(1, 1);
  a << 1.0;
  return ModelParams::with_solved_weights(a0, a);
}

double relative_error(const Matrix& c, const Matrix& exact) {
  return (c - exact).norm() / exact.norm();
}

/// Copies coefficients into a basis with more modes per axis.
Matrix embed(const Matrix& coeffs, int dim, int from_modes, int to_modes) {
  Matrix out = Matrix::Zero(coeffs.rows(), dim == 1 ? to_modes : Index{to_modes} * to_modes);
  for (Index k = 0; k < coeffs.cols(); ++k) {
    const Index target = dim == 1 ? k : (k / from_modes) * to_modes + k % from_modes;
    out.col(target) = coeffs.col(k);
  }
  return out;
}

ExperimentConfig with_modes(const ExperimentConfig& base, int modes, int grid) {
  ExperimentConfig cfg = base;
  cfg.basis.modes = modes;
  cfg.basis.grid = grid;
  cfg.sim.initial = embed(base.sim.initial, base.basis.dim, base.basis.modes, modes);
  cfg.source["basis"]["modes"] = modes;
  cfg.source["basis"]["grid"] = grid;
  return cfg;
}

double peak_negativity(const EnsembleStats& stats) {
  double peak = 0.0;
  for (std::size_t t = 0; t < stats.times().size(); ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < stats.species(); ++i) s += stats.at(t, Field::neg_energy, i).mean;
    peak = std::max(peak, s);
  }
  return peak;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("slope needs two or more points");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------- heat

HeatStudy heat_study(int modes, double dt, double T) {
  HeatStudy out;
  out.modes = modes;
  out.dt = dt;
  out.T = T;
  const SpectralBasis basis(1, {std::numbers::pi}, modes, 2 * modes);
  NoiseSpec quiet;
  quiet.scale = 0.0;

  Matrix initial = Matrix::Zero(1, modes);
  initial(0, 1) = std::sqrt(std::numbers::pi / 2.0);  // cos x = sqrt(pi/2) e_1
  const Matrix exact = std::exp(-T) * initial;

  auto solve = [&](Scheme scheme, double step) {
    SimConfig s;
    s.dt = step;
    s.T = T;
    s.scheme = scheme;
    s.drift = DriftForm::linear;
    s.initial = initial;
    s.max_snapshots = 2;
    const Simulator sim(scalar_params(), basis, quiet, s);
    return relative_error(sim.run_path(0).trajectory.back().coeffs, exact);
  };

  out.semi_implicit_error = solve(Scheme::semi_implicit, dt);
  for (double step : {dt, dt / 2, dt / 4}) {
    out.explicit_dts.push_back(step);
    out.explicit_errors.push_back(solve(Scheme::euler_maruyama, step));
  }
  return out;
}

json HeatStudy::to_json() const {
  return {{"modes", modes},
          {"T", T},
          {"dt", dt},
          {"semi_implicit_relative_error", semi_implicit_error},
          {"explicit_dts", explicit_dts},
          {"explicit_relative_errors", explicit_errors}};
}

// -------------------------------------------------------------- moment

MomentStudy moment_study(std::size_t paths, double mc_dt, double c, std::vector<double> dts) {
  MomentStudy out;
  out.c = c;
  out.T = 1.0;
  out.mc_dt = mc_dt;
  out.paths = paths;
  out.dts = std::move(dts);

  const SpectralBasis basis(1, {1.0}, 1, 2);
  NoiseSpec spec;
  spec.family = NoiseFamily::diagonal_multiplicative;
  spec.rank = 1;
  spec.q = {1.0};
  spec.scale = c;
  spec.seed = 20240601;

  auto config = [&](double dt) {
    SimConfig s;
    s.dt = dt;
    s.T = out.T;
    s.scheme = Scheme::euler_maruyama;
    s.drift = DriftForm::none;
    s.initial = Matrix::Constant(1, 1, 1.0);  // u0 = e_0 = 1 on the unit interval
    s.max_snapshots = 2;
    return s;
  };

  if (paths > 0) {
    SimConfig s = config(mc_dt);
    s.paths = paths;
    const Simulator sim(scalar_params(), basis, spec, s);
    const EnsembleStats stats = sim.run_ensemble();
    const auto& m = stats.at(stats.times().size() - 1, Field::l2_sq, 0);
    out.mc_mean = m.mean;
    out.mc_stderr = m.stderr_of_mean();
  }

  for (double dt : out.dts) {
    const SimConfig s = config(dt);
    const Simulator sim(scalar_params(), basis, spec, s);
    const GalerkinState one{Matrix::Constant(1, 1, 1.0), 0.0};
    WienerIncrement up{Matrix::Constant(1, 1, std::sqrt(dt)), dt};
    WienerIncrement down{Matrix::Constant(1, 1, -std::sqrt(dt)), dt};
    const double sp = sim.em_step(one, up).coeffs(0, 0);
    const double sm = sim.em_step(one, down).coeffs(0, 0);
    const double growth = 0.5 * (sp * sp + sm * sm);
    out.scheme_moments.push_back(std::pow(growth, static_cast<double>(s.steps())));
  }
  return out;
}

json MomentStudy::to_json() const {
  return {{"c", c},
          {"T", T},
          {"mc_dt", mc_dt},
          {"paths", paths},
          {"mc_second_moment", mc_mean},
          {"mc_stderr", mc_stderr},
          {"closed_form", std::exp(c * c * T)},
          {"dts", dts},
          {"scheme_second_moments", scheme_moments}};
}

// ----------------------------------------------------------- estimates

EstimateSummary summarize(const EnsembleStats& stats, int modes) {
  EstimateSummary s;
  s.modes = modes;
  s.sup_l2_sq = stats.sup_l2_sq();
  s.int_grad_l2_sq = stats.int_grad_l2_sq();
  s.int_grad_sq_l2_sq = stats.int_grad_sq_l2_sq();
  s.int_squares_cubed = stats.int_squares_cubed();
  s.completed = stats.completed();
  s.blown_up = stats.blown_up();
  if (stats.completed() == 0) return s;
  const std::size_t last = stats.times().size() - 1;
  for (std::size_t i = 0; i < stats.species(); ++i) {
    s.mass0.push_back(stats.at(0, Field::mass, i).mean);
    s.mass_T.push_back(stats.at(last, Field::mass, i).mean);
    s.mass_T_stderr.push_back(stats.at(last, Field::mass, i).stderr_of_mean());
  }
  return s;
}

json EstimateSummary::to_json() const {
  return {{"modes", modes},
          {"completed", completed},
          {"blown_up", blown_up},
          {"sup_l2_sq", moments_json(sup_l2_sq)},
          {"int_grad_l2_sq", moments_json(int_grad_l2_sq)},
          {"int_grad_sq_l2_sq", moments_json(int_grad_sq_l2_sq)},
          {"int_squares_cubed", moments_json(int_squares_cubed)},
          {"mass_initial", mass0},
          {"mass_final_mean", mass_T},
          {"mass_final_stderr", mass_T_stderr}};
}

EstimatesStudy estimates_study(const ExperimentConfig& base) {
  EstimatesStudy out;
  out.coarse = summarize(make_simulator(base).run_ensemble(), base.basis.modes);
  const ExperimentConfig fine = with_modes(base, 2 * base.basis.modes, 2 * base.basis.grid);
  out.fine = summarize(make_simulator(fine).run_ensemble(), fine.basis.modes);
  return out;
}

json EstimatesStudy::to_json() const {
  return {{"coarse", coarse.to_json()}, {"fine", fine.to_json()}};
}

// ---------------------------------------------------------- negativity

NegativityStudy negativity_study(const ExperimentConfig& base, std::vector<double> dts) {
  NegativityStudy out;
  out.dts = std::move(dts);
  ExperimentConfig cfg = base;
  cfg.sim.truncated_drift = true;
  for (double dt : out.dts) {
    cfg.sim.dt = dt;
    const EnsembleStats stats = make_simulator(cfg).run_ensemble();
    out.peak.push_back(peak_negativity(stats));
    const std::size_t last = stats.times().size() - 1;
    std::vector<double> neg, se, l2;
    for (std::size_t i = 0; i < stats.species(); ++i) {
      neg.push_back(stats.at(last, Field::neg_energy, i).mean);
      se.push_back(stats.at(last, Field::neg_energy, i).stderr_of_mean());
      l2.push_back(stats.at(last, Field::l2_sq, i).mean);
    }
    out.neg_T.push_back(neg);
    out.neg_T_stderr.push_back(se);
    out.l2_T.push_back(l2);
  }
  ExperimentConfig fine = with_modes(cfg, 2 * cfg.basis.modes, 2 * cfg.basis.grid);
  out.peak_doubled_modes = peak_negativity(make_simulator(fine).run_ensemble());
  return out;
}

json NegativityStudy::to_json() const {
  return {{"dts", dts},
          {"peak_negative_energy", peak},
          {"final_negative_energy", neg_T},
          {"final_negative_energy_stderr", neg_T_stderr},
          {"final_l2_sq", l2_T},
          {"peak_negative_energy_doubled_modes", peak_doubled_modes}};
}

// ----------------------------------------------------------------- ito

ItoStudy ito_study(const ExperimentConfig& base, std::vector<double> dts,
                   std::optional<double> noisy_dt) {
  ItoStudy out;
  out.dts = std::move(dts);
  ExperimentConfig quiet = base;
  quiet.noise.scale = 0.0;
  quiet.sim.paths = 1;
  quiet.sim.track_ito = true;
  for (double dt : out.dts) {
    quiet.sim.dt = dt;
    const PathResult r = make_simulator(quiet).run_path(0);
    out.per_step_residual.push_back(r.ito_residual / static_cast<double>(r.steps_taken));
  }

  ExperimentConfig noisy = base;
  noisy.sim.track_ito = true;
  if (noisy_dt) noisy.sim.dt = *noisy_dt;
  const EnsembleStats stats = make_simulator(noisy).run_ensemble();
  out.noisy_dt = noisy.sim.dt;
  out.noisy_paths = stats.completed();
  out.noisy_mean = stats.ito_residual().mean;
  out.noisy_stderr = stats.ito_residual().stderr_of_mean();
  return out;
}

json ItoStudy::to_json() const {
  return {{"dts", dts},
          {"zero_noise_per_step_residual", per_step_residual},
          {"noisy_dt", noisy_dt},
          {"noisy_paths", noisy_paths},
          {"noisy_mean_residual", noisy_mean},
          {"noisy_stderr", noisy_stderr}};
}

// --------------------------------------------------------------- driver

json run_study(const std::string& name, const ExperimentConfig& cfg) {
  json out;
  if (name == "heat") {
    out = heat_study().to_json();
  } else if (name == "moment") {
    out = moment_study().to_json();
  } else if (name == "estimates") {
    out = estimates_study(cfg).to_json();
  } else if (name == "negativity") {
    out = negativity_study(cfg).to_json();
  } else if (name == "ito") {
    out = ito_study(cfg).to_json();
  } else {
    throw ConfigError("unknown study '" + name + "'");
  }
  out["study"] = name;
  return out;
}

}  // namespace skt
