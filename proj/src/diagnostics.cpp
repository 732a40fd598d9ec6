#include "skt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace skt {

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

double DiagnosticsRecord::total_l2_sq() const { return sum(l2_sq); }
double DiagnosticsRecord::total_grad_l2_sq() const { return sum(grad_l2_sq); }
double DiagnosticsRecord::total_grad_sq_l2_sq() const { return sum(grad_sq_l2_sq); }

double DiagnosticsRecord::squares_l2_cubed() const {
  double s = 0.0;
  for (double v : sq_l2) s += v * v;
  return std::pow(s, 1.5);
}

std::string_view field_name(Field f) {
  switch (f) {
    case Field::l2_sq: return "l2_sq";
    case Field::grad_l2_sq: return "grad_l2_sq";
    case Field::grad_sq_l2_sq: return "grad_sq_l2_sq";
    case Field::neg_energy: return "neg_energy";
    case Field::sq_l2: return "sq_l2";
    case Field::mass: return "mass";
    case Field::entropy: return "entropy";
    case Field::hs_noise: return "hs_noise";
  }
  return "?";
}

bool is_species_field(Field f) { return static_cast<std::size_t>(f) < kSpeciesFields; }

double field_value(const DiagnosticsRecord& r, Field f, std::size_t s) {
  switch (f) {
    case Field::l2_sq: return r.l2_sq[s];
    case Field::grad_l2_sq: return r.grad_l2_sq[s];
    case Field::grad_sq_l2_sq: return r.grad_sq_l2_sq[s];
    case Field::neg_energy: return r.neg_energy[s];
    case Field::sq_l2: return r.sq_l2[s];
    case Field::mass: return r.mass[s];
    case Field::entropy: return r.entropy;
    case Field::hs_noise: return r.hs_noise;
  }
  return 0.0;
}

DiagnosticsRecord record(const SpectralBasis& basis, const Vector& weights,
                         const NoiseOperator& noise, const GalerkinState& state) {
  const Matrix u = basis.synthesize(state.coeffs);
  const auto grad = basis.gradient(state.coeffs);
  const double w = basis.cell_weight();

  const Matrix u2 = u.array().square().matrix();
  Vector grad_sq = Vector::Zero(u.rows());
  Vector grad_u2_sq = Vector::Zero(u.rows());
  for (const auto& g : grad) {
    grad_sq += g.array().square().matrix().rowwise().sum();
    grad_u2_sq += (2.0 * u.array() * g.array()).square().matrix().rowwise().sum();
  }

  DiagnosticsRecord r;
  r.t = state.time;
  const Vector l2 = w * u2.rowwise().sum();
  r.l2_sq = to_std(l2);
  r.grad_l2_sq = to_std(w * grad_sq);
  r.grad_sq_l2_sq = to_std(w * grad_u2_sq);
  r.neg_energy = to_std(w * u.cwiseMin(0.0).array().square().matrix().rowwise().sum());
  r.sq_l2 = to_std((w * u2.array().square().matrix().rowwise().sum()).cwiseSqrt());
  r.mass = to_std(w * u.rowwise().sum());
  r.entropy = 0.5 * weights.dot(l2);
  r.hs_noise = noise.hs_norm_sq(u);
  return r;
}

double ito_residual(double entropy_before, double entropy_after, const StepBudget& step) {
  return (entropy_after - entropy_before) + step.dt * step.dissipation -
         0.5 * step.dt * step.noise_input - step.martingale;
}

double ito_residual(const DiagnosticsRecord& before, const DiagnosticsRecord& after,
                    const StepBudget& step) {
  return ito_residual(before.entropy, after.entropy, step);
}

double stampacchia_f(double eps, double z) {
  if (z >= 0.0) return 0.0;
  if (z <= -eps) return -z;
  const double t = z / eps;
  return -3.0 * t * t * t * t * z - 8.0 * t * t * t * z - 6.0 * t * t * z;
}

double stampacchia_df(double eps, double z) {
  if (z >= 0.0) return 0.0;
  if (z <= -eps) return -1.0;
  const double t = z / eps;
  return -(15.0 * t * t * t * t + 32.0 * t * t * t + 18.0 * t * t);
}

double stampacchia_d2f(double eps, double z) {
  if (z >= 0.0 || z <= -eps) return 0.0;
  const double t = z / eps;
  return -(60.0 * t * t * t + 96.0 * t * t + 36.0 * t) / eps;
}

double stampacchia_psi(double eps, double z) {
  const double df = stampacchia_df(eps, z);
  return stampacchia_f(eps, z) * stampacchia_d2f(eps, z) + df * df;
}

double stampacchia_F(double eps, const SpectralBasis& basis, const Vector& grid_field) {
  if (grid_field.size() != basis.num_points()) throw ShapeError("grid field has wrong point count");
  double s = 0.0;
  for (Index g = 0; g < grid_field.size(); ++g) {
    const double f = stampacchia_f(eps, grid_field[g]);
    s += f * f;
  }
  return basis.cell_weight() * s;
}

void RunningMoments::add(double x, double p) {
  count += 1.0;
  const double delta = x - mean;
  mean += delta / count;
  m2 += delta * (x - mean);
  mean_p += (std::pow(std::abs(x), p) - mean_p) / count;
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.count == 0.0) return;
  if (count == 0.0) {
    *this = o;
    return;
  }
  const double total = count + o.count;
  const double delta = o.mean - mean;
  mean += delta * o.count / total;
  m2 += o.m2 + delta * delta * count * o.count / total;
  mean_p += (o.mean_p - mean_p) * o.count / total;
  count = total;
}

double RunningMoments::variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }

double RunningMoments::stderr_of_mean() const {
  return count > 0.0 ? std::sqrt(variance() / count) : 0.0;
}

PathEstimators reduce_path(const std::vector<DiagnosticsRecord>& records, double p) {
  PathEstimators e;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double l2 = records[i].total_l2_sq();
    e.sup_l2_sq = std::max(e.sup_l2_sq, l2);
    e.sup_l2_pow_p = std::max(e.sup_l2_pow_p, std::pow(l2, p / 2.0));
    if (i == 0) continue;
    const double h = records[i].t - records[i - 1].t;
    const auto& a = records[i - 1];
    const auto& b = records[i];
    e.int_grad_l2_sq += 0.5 * h * (a.total_grad_l2_sq() + b.total_grad_l2_sq());
    e.int_grad_sq_l2_sq += 0.5 * h * (a.total_grad_sq_l2_sq() + b.total_grad_sq_l2_sq());
    e.int_squares_cubed += 0.5 * h * (a.squares_l2_cubed() + b.squares_l2_cubed());
  }
  return e;
}

EnsembleStats::EnsembleStats(std::size_t n_species, std::vector<double> save_times, double p)
    : n_(n_species), times_(std::move(save_times)), p_(p) {
  if (!(p_ >= 2.0)) throw ConfigError("moment order p must be >= 2");
  cells_.resize(times_.size() * (kSpeciesFields * n_ + (kAllFields.size() - kSpeciesFields)));
}

std::size_t EnsembleStats::slot(std::size_t ti, Field f, std::size_t s) const {
  const std::size_t per_time = kSpeciesFields * n_ + (kAllFields.size() - kSpeciesFields);
  const auto fi = static_cast<std::size_t>(f);
  const std::size_t offset =
      is_species_field(f) ? fi * n_ + s : kSpeciesFields * n_ + (fi - kSpeciesFields);
  return ti * per_time + offset;
}

const RunningMoments& EnsembleStats::at(std::size_t ti, Field f, std::size_t s) const {
  if (ti >= times_.size() || (is_species_field(f) && s >= n_)) {
    throw ShapeError("statistics index out of range");
  }
  return cells_[slot(ti, f, s)];
}

double EnsembleStats::blown_up_fraction() const {
  const std::size_t total = completed_ + blown_up_;
  return total ? static_cast<double>(blown_up_) / static_cast<double>(total) : 0.0;
}

bool EnsembleStats::within_blowup_budget() const { return blown_up_fraction() <= 0.01; }

void EnsembleStats::add_path(const std::vector<DiagnosticsRecord>& records,
                             const PathEstimators& est) {
  if (records.size() != times_.size()) throw ShapeError("path records do not match save times");
  for (std::size_t ti = 0; ti < records.size(); ++ti) {
    for (Field f : kAllFields) {
      const std::size_t ns = is_species_field(f) ? n_ : 1;
      for (std::size_t s = 0; s < ns; ++s) {
        cells_[slot(ti, f, s)].add(field_value(records[ti], f, s), p_);
      }
    }
  }
  sup_l2_sq_.add(est.sup_l2_sq, p_);
  sup_l2_pow_p_.add(est.sup_l2_pow_p, p_);
  int_grad_l2_sq_.add(est.int_grad_l2_sq, p_);
  int_grad_sq_l2_sq_.add(est.int_grad_sq_l2_sq, p_);
  int_squares_cubed_.add(est.int_squares_cubed, p_);
  ito_residual_.add(est.ito_residual, p_);
  ++completed_;
}

void EnsembleStats::merge(const EnsembleStats& o) {
  if (o.n_ != n_ || o.times_ != times_ || o.p_ != p_) {
    throw ShapeError("cannot merge statistics with different layouts");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].merge(o.cells_[i]);
  sup_l2_sq_.merge(o.sup_l2_sq_);
  sup_l2_pow_p_.merge(o.sup_l2_pow_p_);
  int_grad_l2_sq_.merge(o.int_grad_l2_sq_);
  int_grad_sq_l2_sq_.merge(o.int_grad_sq_l2_sq_);
  int_squares_cubed_.merge(o.int_squares_cubed_);
  ito_residual_.merge(o.ito_residual_);
  completed_ += o.completed_;
  blown_up_ += o.blown_up_;
}

std::vector<NegativityPoint> negativity_report(const EnsembleStats& stats) {
  std::vector<NegativityPoint> out;
  for (std::size_t ti = 0; ti < stats.times().size(); ++ti) {
    for (std::size_t s = 0; s < stats.species(); ++s) {
      const auto& m = stats.at(ti, Field::neg_energy, s);
      out.push_back({stats.times()[ti], s, m.mean, m.stderr_of_mean()});
    }
  }
  return out;
}

std::string format_csv(const EnsembleStats& stats) {
  std::string out(kStatsCsvHeader);
  out += '\n';
  if (stats.completed() == 0) return out;
  char buf[256];
  for (std::size_t ti = 0; ti < stats.times().size(); ++ti) {
    for (Field f : kAllFields) {
      const std::size_t ns = is_species_field(f) ? stats.species() : 1;
      for (std::size_t s = 0; s < ns; ++s) {
        const auto& m = stats.at(ti, f, s);
        const std::string species = is_species_field(f) ? std::to_string(s) : "all";
        std::snprintf(buf, sizeof buf, "%.17g,%s,%s,%.17g,%.17g,%.17g,%.17g\n",
                      stats.times()[ti], species.c_str(), std::string(field_name(f)).c_str(),
                      m.mean, m.variance(), m.stderr_of_mean(), m.mean_p);
        out += buf;
      }
    }
  }
  return out;
}

void export_csv(const EnsembleStats& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << format_csv(stats);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace skt
