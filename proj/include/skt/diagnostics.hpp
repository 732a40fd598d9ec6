#pragma once

#include "skt/noise.hpp"
#include "skt/spectral.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace skt {

/// Norms of one state. Per-species vectors have length n.
struct DiagnosticsRecord {
  double t{0.0};
  std::vector<double> l2_sq;          // ||u_i||^2
  std::vector<double> grad_l2_sq;     // ||grad u_i||^2
  std::vector<double> grad_sq_l2_sq;  // ||grad (u_i^2)||^2
  std::vector<double> neg_energy;     // ||u_i^-||^2
  std::vector<double> sq_l2;          // ||u_i^2||  (not squared)
  std::vector<double> mass;           // int u_i
  double entropy{0.0};                // 1/2 sum_i w_i ||u_i||^2
  double hs_noise{0.0};               // ||sigma(u)||_HS^2

  double total_l2_sq() const;
  double total_grad_l2_sq() const;
  double total_grad_sq_l2_sq() const;
  /// ||(u_1^2, ..., u_n^2)||^3 in L^2.
  double squares_l2_cubed() const;
};

/// Statistic columns, in export order. The first six are per species.
enum class Field { l2_sq, grad_l2_sq, grad_sq_l2_sq, neg_energy, sq_l2, mass, entropy, hs_noise };
inline constexpr std::array<Field, 8> kAllFields{Field::l2_sq,      Field::grad_l2_sq,
                                                 Field::grad_sq_l2_sq, Field::neg_energy,
                                                 Field::sq_l2,      Field::mass,
                                                 Field::entropy,    Field::hs_noise};
inline constexpr std::size_t kSpeciesFields = 6;
std::string_view field_name(Field f);
bool is_species_field(Field f);
double field_value(const DiagnosticsRecord& r, Field f, std::size_t species);

DiagnosticsRecord record(const SpectralBasis& basis, const Vector& weights,
                         const NoiseOperator& noise, const GalerkinState& state);

/// Energy budget terms of one explicit step from state u_n:
/// dissipation = sum_i w_i <A(u) grad u, grad u_i>,
/// noise_input = ||W^{1/2} Pi_N sigma(u)||_HS^2,
/// martingale  = sum_i w_i (u_i, Pi_N sigma_i dW).
struct StepBudget {
  double dt{0.0};
  double dissipation{0.0};
  double noise_input{0.0};
  double martingale{0.0};
};

/// Discrete defect of the Ito energy identity over one step:
/// dH + dt*dissipation - dt/2*noise_input - martingale.
double ito_residual(double entropy_before, double entropy_after, const StepBudget& step);
double ito_residual(const DiagnosticsRecord& before, const DiagnosticsRecord& after,
                    const StepBudget& step);

// Smoothed negative part f_eps and its derivatives. f_eps(z) = -z for
// z <= -eps, a quintic in z on [-eps, 0] joining with C^2 continuity, and 0
// for z >= 0.
double stampacchia_f(double eps, double z);
double stampacchia_df(double eps, double z);
double stampacchia_d2f(double eps, double z);
/// psi_eps = f f'' + (f')^2.
double stampacchia_psi(double eps, double z);
/// F_eps(v) = int f_eps(v)^2 dx for grid samples v.
double stampacchia_F(double eps, const SpectralBasis& basis, const Vector& grid_field);

/// Streaming mean/variance (Chan et al. merge) plus the mean of |x|^p.
struct RunningMoments {
  double count{0.0};
  double mean{0.0};
  double m2{0.0};
  double mean_p{0.0};

  void add(double x, double p);
  void merge(const RunningMoments& other);
  double variance() const;
  double stderr_of_mean() const;
};

/// Scalars reduced over one path: running sup over save times and
/// trapezoidal time integrals on the save grid.
struct PathEstimators {
  double sup_l2_sq{0.0};        // sup_t ||u||^2
  double sup_l2_pow_p{0.0};     // sup_t ||u||^p
  double int_grad_l2_sq{0.0};   // int ||grad u||^2 dt
  double int_grad_sq_l2_sq{0.0};  // int ||grad u^2||^2 dt
  double int_squares_cubed{0.0};  // int ||u^2||^3 dt
  double ito_residual{0.0};     // sum of per-step defects (when tracked)
};

PathEstimators reduce_path(const std::vector<DiagnosticsRecord>& records, double p);

/// Monte Carlo estimators over completed paths.
class EnsembleStats {
 public:
  EnsembleStats() = default;
  EnsembleStats(std::size_t n_species, std::vector<double> save_times, double p);

  std::size_t species() const { return n_; }
  double moment_order() const { return p_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t completed() const { return completed_; }
  std::size_t blown_up() const { return blown_up_; }
  double blown_up_fraction() const;
  /// At most 1% of paths blew up.
  bool within_blowup_budget() const;

  /// Folds one completed path (records at every save time).
  void add_path(const std::vector<DiagnosticsRecord>& records, const PathEstimators& est);
  void add_blown_up() { ++blown_up_; }
  void merge(const EnsembleStats& other);

  const RunningMoments& at(std::size_t time_index, Field f, std::size_t species = 0) const;

  const RunningMoments& sup_l2_sq() const { return sup_l2_sq_; }
  const RunningMoments& sup_l2_pow_p() const { return sup_l2_pow_p_; }
  const RunningMoments& int_grad_l2_sq() const { return int_grad_l2_sq_; }
  const RunningMoments& int_grad_sq_l2_sq() const { return int_grad_sq_l2_sq_; }
  const RunningMoments& int_squares_cubed() const { return int_squares_cubed_; }
  const RunningMoments& ito_residual() const { return ito_residual_; }

 private:
  std::size_t slot(std::size_t time_index, Field f, std::size_t species) const;

  std::size_t n_{0};
  std::vector<double> times_;
  double p_{4.0};
  std::vector<RunningMoments> cells_;
  RunningMoments sup_l2_sq_, sup_l2_pow_p_, int_grad_l2_sq_, int_grad_sq_l2_sq_,
      int_squares_cubed_, ito_residual_;
  std::size_t completed_{0};
  std::size_t blown_up_{0};
};

struct NegativityPoint {
  double t;
  std::size_t species;
  double mean;
  double stderr_of_mean;
};

/// E||u_i^-||^2 with standard errors at every save time.
std::vector<NegativityPoint> negativity_report(const EnsembleStats& stats);

/// Column header of the statistics CSV.
inline constexpr std::string_view kStatsCsvHeader = "t,species,field,mean,var,stderr,p_moment";

/// One row per (save time, field, species); scalar fields use species "all".
/// Numbers are written with 17 significant digits.
void export_csv(const EnsembleStats& stats, const std::filesystem::path& path);
std::string format_csv(const EnsembleStats& stats);

}  // namespace skt
