#pragma once

#include "skt/config.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace skt {

/// Decoupled heat equation on (0, pi) with u0 = cos x and no noise. Errors are
/// relative L2 errors at T against e^{-T} cos x.
struct HeatStudy {
  int modes{16};
  double T{1.0};
  double dt{1e-3};
  double semi_implicit_error{0.0};
  std::vector<double> explicit_dts;     // dt, dt/2, dt/4
  std::vector<double> explicit_errors;
  nlohmann::json to_json() const;
};
HeatStudy heat_study(int modes = 16, double dt = 1e-3, double T = 1.0);

/**
 * Scalar linear SDE du = c u dW on one constant mode (drift off), u0 = 1.
 * The Monte Carlo part estimates E u(T)^2 with `paths` paths at `mc_dt`.
 * The weak-error part propagates E u_n^2 through em_step exactly: the step is
 * linear in u, so two-point increments +-sqrt(dt) reproduce the second
 * moment of every step.
 */
struct MomentStudy {
  double c{0.5};
  double T{1.0};
  double mc_dt{0.0};
  std::size_t paths{0};
  double mc_mean{0.0};
  double mc_stderr{0.0};
  std::vector<double> dts;
  std::vector<double> scheme_moments;  // E u_N^2 of the scheme at each dt
  nlohmann::json to_json() const;
};
MomentStudy moment_study(std::size_t paths = 100000, double mc_dt = 0x1p-9, double c = 0.5,
                         std::vector<double> dts = {0x1p-6, 0x1p-7, 0x1p-8, 0x1p-9, 0x1p-10});

/// Headline estimators of one ensemble.
struct EstimateSummary {
  int modes{0};
  RunningMoments sup_l2_sq, int_grad_l2_sq, int_grad_sq_l2_sq, int_squares_cubed;
  std::vector<double> mass0;        // per species at t = 0
  std::vector<double> mass_T;       // ensemble mean at T
  std::vector<double> mass_T_stderr;
  std::size_t completed{0};
  std::size_t blown_up{0};
  nlohmann::json to_json() const;
};
EstimateSummary summarize(const EnsembleStats& stats, int modes);

/// The benchmark at its own resolution and with the mode count doubled
/// (same dt, grid 2M per axis).
struct EstimatesStudy {
  EstimateSummary coarse, fine;
  nlohmann::json to_json() const;
};
EstimatesStudy estimates_study(const ExperimentConfig& base);

/**
 * Truncated drift under the configured noise for each dt. `peak` is the
 * maximum over save times of sum_i E||u_i^-(t)||^2; `neg_T` and `l2_T` are
 * per species at T.
 */
struct NegativityStudy {
  std::vector<double> dts;
  std::vector<double> peak;
  std::vector<std::vector<double>> neg_T, neg_T_stderr, l2_T;
  /// Same quantities at the finest dt with twice the modes.
  double peak_doubled_modes{0.0};
  nlohmann::json to_json() const;
};
NegativityStudy negativity_study(const ExperimentConfig& base,
                                 std::vector<double> dts = {8e-4, 4e-4, 2e-4, 1e-4});

/**
 * Ito energy defect. Without noise: the per-step mean of one path for each dt.
 * With the configured noise: the ensemble mean of the summed defect at
 * `noisy_dt` (default: the config's dt). The scheme's own defect is O(dt)
 * over a fixed horizon while the Monte Carlo error is O(sqrt(dt)), so the
 * noisy check only resolves the noise balance when dt is small enough.
 */
struct ItoStudy {
  std::vector<double> dts;
  std::vector<double> per_step_residual;  // zero noise, one path
  double noisy_dt{0.0};
  std::size_t noisy_paths{0};
  double noisy_mean{0.0};
  double noisy_stderr{0.0};
  nlohmann::json to_json() const;
};
ItoStudy ito_study(const ExperimentConfig& base,
                   std::vector<double> dts = {8e-4, 4e-4, 2e-4, 1e-4},
                   std::optional<double> noisy_dt = std::nullopt);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Names accepted by run_study.
inline const std::vector<std::string> kStudyNames{"heat", "moment", "estimates", "negativity",
                                                   "ito"};

nlohmann::json run_study(const std::string& name, const ExperimentConfig& cfg);

}  // namespace skt
