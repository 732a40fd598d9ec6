#include "skt/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

namespace skt {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

Vector to_vector(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a list of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Matrix to_matrix(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("expected a nested list");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size()) throw ShapeError("ragged matrix in config");
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

double length_value(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "pi") return std::numbers::pi;
    throw ConfigError("length must be a number or \"pi\"");
  }
  return j.get<double>();
}

ModelParams parse_model(const json& m) {
  const Vector a0 = to_vector(require(m, "a0", "model"));
  const Matrix a = to_matrix(require(m, "a", "model"));
  ModelParams p;
  if (m.contains("pi")) {
    p.n = static_cast<std::size_t>(a0.size());
    p.a0 = a0;
    p.a = a;
    p.pi = to_vector(m.at("pi"));
    p.validate();
  } else {
    if (a.rows() != a0.size() || a.cols() != a0.size()) throw ShapeError("a must be n x n");
    p = ModelParams::with_solved_weights(a0, a);
  }
  if (m.contains("n") && m.at("n").get<std::size_t>() != p.n) {
    throw ShapeError("model.n does not match the length of a0");
  }
  return p;
}

BasisConfig parse_basis(const json& b) {
  BasisConfig c;
  c.dim = b.value("dim", 1);
  c.lengths.clear();
  const json& L = require(b, "lengths", "basis");
  if (L.is_array()) {
    for (const auto& v : L) c.lengths.push_back(length_value(v));
  } else {
    c.lengths.assign(static_cast<std::size_t>(c.dim), length_value(L));
  }
  c.modes = require(b, "modes", "basis").get<int>();
  c.grid = b.value("grid", 2 * c.modes);
  return c;
}

NoiseSpec parse_noise(const json& j) {
  NoiseSpec s;
  s.family = noise_family_from_string(j.value("family", std::string("diagonal-multiplicative")));
  s.rank = j.value("K", 1);
  if (!j.contains("q")) {
    s.q.assign(static_cast<std::size_t>(std::max(s.rank, 0)), 1.0);
  } else if (j.at("q").is_object()) {
    s.q = NoiseSpec::decay_weights(s.rank, require(j.at("q"), "decay_exponent", "noise.q").get<double>());
  } else {
    s.q = j.at("q").get<std::vector<double>>();
  }
  s.scale = j.value("c", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

SimConfig parse_sim(const json& j, const SpectralBasis& basis, std::size_t n) {
  SimConfig s;
  s.dt = require(j, "dt", "sim").get<double>();
  s.T = require(j, "T", "sim").get<double>();
  if (j.contains("scheme")) s.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  if (j.contains("drift")) {
    const auto d = j.at("drift").get<std::string>();
    if (d == "cross-diffusion") s.drift = DriftForm::cross_diffusion;
    else if (d == "linear") s.drift = DriftForm::linear;
    else if (d == "none") s.drift = DriftForm::none;
    else throw ConfigError("unknown drift form '" + d + "'");
  }
  s.truncated_drift = j.value("truncated_drift", false);
  s.paths = j.value("paths", std::size_t{1});
  s.clip_negative = j.value("clip_negative", false);
  s.moment_order = j.value("p", 4.0);
  s.max_snapshots = j.value("max_snapshots", std::size_t{200});
  s.track_ito = j.value("track_ito", false);
  s.workers = j.value("workers", 0u);

  const json& init = require(j, "initial", "sim");
  if (init.is_object()) {
    s.initial = to_matrix(require(init, "coeffs", "sim.initial"));
  } else {
    if (!init.is_array() || init.size() != n) {
      throw ShapeError("sim.initial needs one term list per species");
    }
    s.initial = Matrix::Zero(static_cast<Index>(n), basis.num_modes());
    for (std::size_t i = 0; i < n; ++i) {
      s.initial.row(static_cast<Index>(i)) = initial_from_terms(basis, init[i]);
    }
  }
  s.validate(n, basis.num_modes());
  return s;
}

}  // namespace

Matrix initial_from_terms(const SpectralBasis& basis, const json& terms) {
  Matrix c = Matrix::Zero(1, basis.num_modes());
  if (!terms.is_array()) throw ConfigError("initial terms must be a list");
  for (const auto& t : terms) {
    const auto k = require(t, "k", "initial term").get<std::vector<int>>();
    const double amp = require(t, "amp", "initial term").get<double>();
    if (static_cast<int>(k.size()) != basis.dim()) throw ShapeError("initial term needs one k per axis");
    bool retained = true;
    double norm = 1.0;
    Index mode = 0;
    for (int a = 0; a < basis.dim(); ++a) {
      if (k[static_cast<std::size_t>(a)] < 0) throw ConfigError("wave numbers must be >= 0");
      if (k[static_cast<std::size_t>(a)] >= basis.modes_per_axis()) retained = false;
      const double L = basis.lengths()[static_cast<std::size_t>(a)];
      norm *= k[static_cast<std::size_t>(a)] == 0 ? 1.0 / std::sqrt(L) : std::sqrt(2.0 / L);
      mode = mode * basis.modes_per_axis() + k[static_cast<std::size_t>(a)];
    }
    // Modes beyond the truncation are orthogonal to every e_k: Pi_N drops them.
    if (retained) c(0, mode) += amp / norm;
  }
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in override '" + assignment + "'");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  c.source = doc;
  c.model = parse_model(require(doc, "model", "config"));
  c.basis = parse_basis(require(doc, "basis", "config"));
  const SpectralBasis basis = c.basis.build();
  c.noise = parse_noise(doc.value("noise", json::object()));
  c.sim = parse_sim(require(doc, "sim", "config"), basis, c.model.n);
  if (doc.contains("study")) c.study = doc.at("study").get<std::string>();
  if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  json doc = json::parse(in);
  for (const auto& o : overrides) apply_override(doc, o);
  if (const char* seed = std::getenv("SKT_SPDE_SEED"); seed && *seed) {
    doc["noise"]["seed"] = std::stoull(seed);
  }
  return parse_config(doc);
}

json to_json(const ConditionReport& r) {
  json j;
  j["alpha1"] = r.alpha1 ? json(*r.alpha1) : json(nullptr);
  j["alpha2"] = r.alpha2;
  j["detailed_balance"] = r.detailed_balance;
  j["admissible"] = r.admissible;
  j["alpha"] = r.alpha;
  switch (r.route) {
    case CoercivityRoute::detailed_balance: j["route"] = "detailed-balance"; break;
    case CoercivityRoute::self_diffusion: j["route"] = "self-diffusion"; break;
    case CoercivityRoute::none: j["route"] = nullptr; break;
  }
  j["weights"] = std::vector<double>(r.weights.data(), r.weights.data() + r.weights.size());
  return j;
}

json to_json(const ModelParams& p) {
  json a = json::array();
  for (Index i = 0; i < p.a.rows(); ++i) {
    a.push_back(std::vector<double>(p.a.row(i).data(), p.a.row(i).data() + p.a.cols()));
  }
  return {{"n", p.n},
          {"a0", std::vector<double>(p.a0.data(), p.a0.data() + p.a0.size())},
          {"a", a},
          {"pi", std::vector<double>(p.pi.data(), p.pi.data() + p.pi.size())}};
}

Simulator make_simulator(const ExperimentConfig& cfg) {
  return {cfg.model, cfg.basis.build(), cfg.noise, cfg.sim};
}

}  // namespace skt
