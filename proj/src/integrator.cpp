#include "skt/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace skt {

namespace {

// Paths are folded in blocks of this size; workers fill a block, then the
// calling thread merges it in path order.
constexpr std::size_t kFoldBlock = 256;

bool finite_and_bounded(const Matrix& c) {
  for (Index i = 0; i < c.size(); ++i) {
    const double v = c.data()[i];
    if (!std::isfinite(v) || std::abs(v) > kBlowUpThreshold) return false;
  }
  return true;
}

double weighted_sq(const Vector& w, const Matrix& c) { return w.dot(c.rowwise().squaredNorm()); }

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::euler_maruyama: return "euler-maruyama";
    case Scheme::tamed_euler_maruyama: return "tamed-euler-maruyama";
    case Scheme::semi_implicit: return "semi-implicit-diffusion";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "euler-maruyama") return Scheme::euler_maruyama;
  if (s == "tamed-euler-maruyama") return Scheme::tamed_euler_maruyama;
  if (s == "semi-implicit-diffusion") return Scheme::semi_implicit;
  throw ConfigError("unknown scheme '" + s + "'");
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::max(1.0, std::round(T / dt)));
}

void SimConfig::validate(std::size_t n, Index num_modes) const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (dt > T * (1.0 + 1e-12)) throw ConfigError("dt must not exceed T");
  if (paths < 1) throw ConfigError("paths must be >= 1");
  if (max_snapshots < 2) throw ConfigError("max_snapshots must be >= 2");
  if (!(moment_order >= 2.0)) throw ConfigError("moment order p must be >= 2");
  if (initial.rows() != static_cast<Index>(n) || initial.cols() != num_modes) {
    throw ShapeError("initial coefficients must be n x N");
  }
}

Simulator::Simulator(ModelParams params, SpectralBasis basis, NoiseSpec noise, SimConfig config)
    : params_(std::move(params)),
      basis_(std::move(basis)),
      noise_(std::move(noise), basis_, params_.n),
      config_(std::move(config)) {
  params_.validate();
  config_.validate(params_.n, basis_.num_modes());
  report_ = check_conditions(params_);
  if (!report_.admissible) {
    // Diagnostics still need weights; fall back to the model's pi.
    report_.weights = params_.pi;
  }
  drift_ = {config_.drift, config_.truncated_drift};

  const std::size_t steps = config_.steps();
  const std::size_t intervals = std::min(steps, config_.max_snapshots - 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    save_steps_.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(steps) / static_cast<double>(intervals))));
  }

  stiff_ = Matrix::Zero(static_cast<Index>(params_.n), basis_.num_modes());
  if (config_.drift != DriftForm::none) {
    stiff_ = params_.a0 * basis_.eigenvalues().transpose();
  }
}

GalerkinState Simulator::initial_state() const { return {config_.initial, 0.0}; }

std::vector<double> Simulator::save_times() const {
  std::vector<double> t;
  t.reserve(save_steps_.size());
  for (std::size_t s : save_steps_) t.push_back(static_cast<double>(s) * config_.dt);
  return t;
}

GalerkinState Simulator::em_step(const GalerkinState& state, const WienerIncrement& inc,
                                 StepBudget* budget) const {
  const double dt = config_.dt;
  const FluxFields fields = evaluate_flux(basis_, params_, state.coeffs, drift_);
  Matrix f = drift_apply(basis_, fields);

  Matrix g;
  const bool noisy = noise_.spec().scale > 0.0;
  if (noisy) {
    g = basis_.project(noise_.apply(fields.u, inc));
  } else {
    g = Matrix::Zero(state.coeffs.rows(), state.coeffs.cols());
  }

  if (budget) {
    budget->dt = dt;
    budget->dissipation = dissipation(basis_, report_.weights, fields);
    budget->noise_input = noisy ? noise_.projected_hs_norm_sq(fields.u, report_.weights) : 0.0;
    budget->martingale =
        report_.weights.dot(state.coeffs.cwiseProduct(g).rowwise().sum());
  }

  GalerkinState next;
  next.time = state.time + dt;
  switch (config_.scheme) {
    case Scheme::euler_maruyama:
      next.coeffs = state.coeffs + dt * f + g;
      break;
    case Scheme::tamed_euler_maruyama: {
      const Vector norms = f.rowwise().norm();
      for (Index i = 0; i < f.rows(); ++i) f.row(i) /= 1.0 + dt * norms[i];
      next.coeffs = state.coeffs + dt * f + g;
      break;
    }
    case Scheme::semi_implicit: {
      const Matrix lin = stiff_.cwiseProduct(state.coeffs);
      next.coeffs = (state.coeffs + dt * (f + lin) + g).array() / (1.0 + dt * stiff_.array());
      break;
    }
  }

  if (config_.clip_negative) {
    next.coeffs = basis_.project(basis_.synthesize(next.coeffs).cwiseMax(0.0));
  }
  return next;
}

PathResult Simulator::run_path(std::uint64_t path_id) const {
  PathResult out;
  GalerkinState state = initial_state();
  const std::size_t steps = config_.steps();
  const bool noisy = noise_.spec().scale > 0.0;

  out.trajectory.push_back(state);
  out.records.push_back(record(basis_, report_.weights, noise_, state));

  WienerIncrement inc;
  inc.dt = config_.dt;
  inc.dW = Matrix::Zero(static_cast<Index>(params_.n), noise_.spec().rank);
  StepBudget budget;
  std::size_t next_save = 1;
  for (std::size_t s = 0; s < steps; ++s) {
    if (noisy) sample_increment_into(noise_.spec(), params_.n, path_id, s, config_.dt, inc);
    GalerkinState next = em_step(state, inc, config_.track_ito ? &budget : nullptr);
    if (!finite_and_bounded(next.coeffs)) {
      out.status = ExitStatus::blown_up;
      if (out.trajectory.back().time != state.time) out.trajectory.push_back(state);
      return out;
    }
    if (config_.track_ito) {
      out.ito_residual += ito_residual(0.5 * weighted_sq(report_.weights, state.coeffs),
                                       0.5 * weighted_sq(report_.weights, next.coeffs), budget);
    }
    state = std::move(next);
    ++out.steps_taken;
    if (next_save < save_steps_.size() && save_steps_[next_save] == s + 1) {
      out.trajectory.push_back(state);
      out.records.push_back(record(basis_, report_.weights, noise_, state));
      ++next_save;
    }
  }
  return out;
}

EnsembleStats Simulator::run_ensemble() const {
  EnsembleStats stats(params_.n, save_times(), config_.moment_order);
  const std::size_t paths = config_.paths;
  unsigned workers = config_.workers ? config_.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);

  struct Slot {
    bool completed{false};
    std::vector<DiagnosticsRecord> records;
    PathEstimators est;
  };
  std::vector<Slot> block(std::min(paths, kFoldBlock));

  for (std::size_t start = 0; start < paths; start += kFoldBlock) {
    const std::size_t count = std::min(kFoldBlock, paths - start);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        PathResult r = run_path(start + i);
        Slot& slot = block[i];
        slot.completed = r.status == ExitStatus::completed;
        if (slot.completed) {
          slot.est = reduce_path(r.records, config_.moment_order);
          slot.est.ito_residual = r.ito_residual;
          slot.records = std::move(r.records);
        }
      }
    };
    const unsigned width = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (width <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < width; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (block[i].completed) {
        stats.add_path(block[i].records, block[i].est);
      } else {
        stats.add_blown_up();
      }
    }
  }
  return stats;
}

void write_trajectory_csv(const PathResult& path, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string());
  out << "t,species,mode,coefficient\n";
  char buf[96];
  for (const auto& s : path.trajectory) {
    for (Index i = 0; i < s.coeffs.rows(); ++i) {
      for (Index k = 0; k < s.coeffs.cols(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%ld,%ld,%.17g\n", s.time, static_cast<long>(i),
                      static_cast<long>(k), s.coeffs(i, k));
        out << buf;
      }
    }
  }
}

}  // namespace skt
