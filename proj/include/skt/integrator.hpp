#pragma once

#include "skt/diagnostics.hpp"
#include "skt/drift.hpp"
#include "skt/model.hpp"
#include "skt/noise.hpp"
#include "skt/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace skt {

enum class Scheme { euler_maruyama, tamed_euler_maruyama, semi_implicit };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// Coefficient magnitude beyond which a path counts as blown up.
inline constexpr double kBlowUpThreshold = 1e12;

struct SimConfig {
  double dt{1e-3};
  double T{1.0};
  Scheme scheme{Scheme::semi_implicit};
  DriftForm drift{DriftForm::cross_diffusion};
  bool truncated_drift{false};
  std::size_t paths{1};
  /// Coefficients of Pi_N u0, n x N.
  Matrix initial;
  /// Experiment only: zero the negative part on the grid after each step.
  bool clip_negative{false};
  std::size_t max_snapshots{200};
  /// Worker threads; 0 means hardware concurrency.
  unsigned workers{0};
  double moment_order{4.0};
  /// Accumulate the per-step Ito energy defect (costs one extra projection).
  bool track_ito{false};

  std::size_t steps() const;
  void validate(std::size_t n, Index num_modes) const;
};

enum class ExitStatus { completed, blown_up };

struct PathResult {
  std::vector<GalerkinState> trajectory;  // at save times; ends at the last finite state
  std::vector<DiagnosticsRecord> records;
  ExitStatus status{ExitStatus::completed};
  std::size_t steps_taken{0};
  /// Sum over steps of the Ito energy defect (0 unless tracked).
  double ito_residual{0.0};
};

/**
 * Galerkin SDE for the projected cross-diffusion system, stepped by
 *
 *   explicit:       c' = c + dt f(c) + g
 *   tamed:          c'_i = c_i + dt f_i / (1 + dt |f_i|) + g_i
 *   semi-implicit:  c'_ik = (c_ik + dt (f_ik + a_i0 lambda_k c_ik) + g_ik) / (1 + dt a_i0 lambda_k)
 *
 * where f is the drift and g the projected noise increment. Parameters,
 * basis and noise are shared read-only by all worker threads.
 */
class Simulator {
 public:
  Simulator(ModelParams params, SpectralBasis basis, NoiseSpec noise, SimConfig config);

  const ModelParams& params() const { return params_; }
  const SpectralBasis& basis() const { return basis_; }
  const NoiseOperator& noise() const { return noise_; }
  const SimConfig& config() const { return config_; }
  const ConditionReport& conditions() const { return report_; }
  /// Entropy weights used by all diagnostics: the report's weights.
  const Vector& weights() const { return report_.weights; }

  GalerkinState initial_state() const;
  /// Step indices and times of the save grid (at most max_snapshots points,
  /// always including 0 and the final step).
  const std::vector<std::size_t>& save_steps() const { return save_steps_; }
  std::vector<double> save_times() const;

  /// One step. Fills `budget` with the energy terms at the input state when given.
  GalerkinState em_step(const GalerkinState& state, const WienerIncrement& inc,
                        StepBudget* budget = nullptr) const;

  PathResult run_path(std::uint64_t path_id) const;

  /// Runs paths 0..paths-1 and folds them in path order, so the result does
  /// not depend on the worker count.
  EnsembleStats run_ensemble() const;

 private:
  ModelParams params_;
  SpectralBasis basis_;
  NoiseOperator noise_;
  SimConfig config_;
  ConditionReport report_;
  DriftOptions drift_;
  std::vector<std::size_t> save_steps_;
  Matrix stiff_;  // n x N: a_i0 lambda_k when the drift has a linear part
};

/// Rows: t, species, mode, coefficient.
void write_trajectory_csv(const PathResult& path, const std::filesystem::path& file);

}  // namespace skt
