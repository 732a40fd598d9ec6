#pragma once

#include "skt/integrator.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace skt {

struct BasisConfig {
  int dim{1};
  std::vector<double> lengths{1.0};
  int modes{8};
  int grid{16};

  SpectralBasis build() const { return {dim, lengths, modes, grid}; }
};

/**
 * One experiment file:
 *
 *   {"model": {"n", "a0", "a", "pi"?},
 *    "basis": {"dim", "lengths", "modes", "grid"?},
 *    "noise": {"family", "K", "q" | {"decay_exponent"}, "c", "seed"},
 *    "sim":   {"dt", "T", "scheme", "drift", "truncated_drift", "paths",
 *              "initial", "clip_negative", "p", "max_snapshots", "track_ito"},
 *    "study"?, "output_dir"?}
 *
 * Lengths may be numbers or the string "pi". "initial" is a list (one entry
 * per species) of cosine terms {"k": [k_0, k_1], "amp": a}, each meaning
 * a prod_a cos(k_a pi x_a / L_a), or {"coeffs": [[...]]} with raw n x N
 * coefficients.
 */
struct ExperimentConfig {
  ModelParams model;
  BasisConfig basis;
  NoiseSpec noise;
  SimConfig sim;
  std::optional<std::string> study;
  std::optional<std::string> output_dir;
  nlohmann::json source;  // the resolved document, after overrides
};

/// Applies a "a.b.c=value" override in place. The value is parsed as JSON
/// when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads the file, applies overrides in order, then honors SKT_SPDE_SEED.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Coefficients of Pi_N of a sum of cosine terms.
Matrix initial_from_terms(const SpectralBasis& basis, const nlohmann::json& species_terms);

nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const ModelParams& p);

Simulator make_simulator(const ExperimentConfig& cfg);

}  // namespace skt
