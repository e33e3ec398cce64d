#include "casimir/materials.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "casimir/errors.hpp"
#include "casimir/units.hpp"

namespace casimir {

std::string_view to_string(Model m) { return m == Model::drude ? "drude" : "plasma"; }

Model parse_model(std::string_view s) {
  if (s == "drude") return Model::drude;
  if (s == "plasma") return Model::plasma;
  throw ConfigError("unknown model '" + std::string(s) + "' (expected drude or plasma)");
}

std::string_view to_string(PermittivityKind k) {
  switch (k) {
    case PermittivityKind::drude: return "drude";
    case PermittivityKind::plasma: return "plasma";
    case PermittivityKind::oscillator: return "oscillator";
    case PermittivityKind::tabulated_with_drude_tail: return "tabulated_with_drude_tail";
    case PermittivityKind::tabulated_with_plasma_tail: return "tabulated_with_plasma_tail";
    case PermittivityKind::vacuum: return "vacuum";
  }
  return "?";
}

PermittivityKind parse_permittivity_kind(std::string_view s) {
  for (auto k : {PermittivityKind::drude, PermittivityKind::plasma, PermittivityKind::oscillator,
                 PermittivityKind::tabulated_with_drude_tail, PermittivityKind::tabulated_with_plasma_tail,
                 PermittivityKind::vacuum})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown permittivity kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Optical tables

OpticalDataTable::OpticalDataTable(std::vector<OpticalSample> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ConfigError("optical data table is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!(r.energy_ev > 0.0) || !std::isfinite(r.energy_ev))
      throw ConfigError("photon energies must be positive and finite", static_cast<int>(i) + 2);
    if (!(r.n >= 0.0) || !(r.k >= 0.0))
      throw ConfigError("n and k must be non-negative", static_cast<int>(i) + 2);
    if (i > 0 && !(r.energy_ev > rows_[i - 1].energy_ev))
      throw ConfigError("photon energies must be strictly increasing", static_cast<int>(i) + 2);
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view s, int line) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("malformed number '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

OpticalDataTable parse_optical_csv(std::string_view text) {
  std::vector<OpticalSample> rows;
  std::vector<int> line_of_row;
  bool header_seen = false;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != "energy_ev,n,k") throw ConfigError("expected header 'energy_ev,n,k'", line_no);
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 3> fields;
    std::size_t start = 0;
    for (int f = 0; f < 3; ++f) {
      const auto comma = line.find(',', start);
      if ((f < 2) == (comma == std::string_view::npos))
        throw ConfigError("expected 3 comma-separated fields", line_no);
      fields[f] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      start = comma + 1;
    }
    rows.push_back({parse_field(fields[0], line_no), parse_field(fields[1], line_no), parse_field(fields[2], line_no)});
    line_of_row.push_back(line_no);
  }
  if (!header_seen) throw ConfigError("missing header 'energy_ev,n,k'", 1);
  if (rows.empty()) throw ConfigError("optical data table is empty");
  try {
    return OpticalDataTable(std::move(rows));
  } catch (const ConfigError& e) {
    // Re-map the row index reported by the table to the source line.
    const int row = e.line() - 2;
    const int line = row >= 0 && row < static_cast<int>(line_of_row.size()) ? line_of_row[row] : 0;
    std::string what = e.what();
    what = what.substr(0, what.rfind(" (line"));
    throw ConfigError(what, line);
  }
}

OpticalDataTable load_optical_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open optical table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_optical_csv(ss.str());
}

// ---------------------------------------------------------------------------
// MaterialResponse

MaterialResponse MaterialResponse::vacuum() { return MaterialResponse(); }

MaterialResponse MaterialResponse::drude(std::string name, DrudeParams p, double mu) {
  if (!(p.plasma_frequency > 0.0) || !(p.relaxation > 0.0))
    throw DomainError("Drude parameters must be positive");
  if (!(mu >= 1.0)) throw DomainError("static permeability must be >= 1");
  MaterialResponse m;
  m.name_ = std::move(name);
  m.kind_ = PermittivityKind::drude;
  m.plasma_frequency_ = p.plasma_frequency;
  m.relaxation_ = p.relaxation;
  m.mu0_ = mu;
  return m;
}

MaterialResponse MaterialResponse::plasma(std::string name, PlasmaParams p, double mu) {
  if (!(p.plasma_frequency > 0.0)) throw DomainError("plasma frequency must be positive");
  if (!(mu >= 1.0)) throw DomainError("static permeability must be >= 1");
  MaterialResponse m;
  m.name_ = std::move(name);
  m.kind_ = PermittivityKind::plasma;
  m.plasma_frequency_ = p.plasma_frequency;
  m.mu0_ = mu;
  return m;
}

MaterialResponse MaterialResponse::oscillator(std::string name, OscillatorParams p) {
  if (p.strengths.size() != p.frequencies.size())
    throw DomainError("oscillator strengths and frequencies differ in length");
  for (std::size_t j = 0; j < p.strengths.size(); ++j) {
    if (!(p.strengths[j] >= 0.0)) throw DomainError("oscillator strengths must be >= 0");
    if (!(p.frequencies[j] > 0.0)) throw DomainError("oscillator frequencies must be > 0");
  }
  MaterialResponse m;
  m.name_ = std::move(name);
  m.kind_ = PermittivityKind::oscillator;
  m.oscillators_ = std::move(p);
  return m;
}

MaterialResponse MaterialResponse::tabulated(std::string name, OpticalDataTable table, KramersKronigTail tail,
                                             Model extrapolation, double mu, std::optional<double> match_energy) {
  if (!(mu >= 1.0)) throw DomainError("static permeability must be >= 1");
  MaterialResponse m;
  m.name_ = std::move(name);
  m.mu0_ = mu;
  m.match_energy_ = match_energy;
  if (const auto* d = std::get_if<DrudeParams>(&tail)) {
    if (!(d->plasma_frequency > 0.0) || !(d->relaxation > 0.0))
      throw DomainError("Drude parameters must be positive");
    m.plasma_frequency_ = d->plasma_frequency;
    m.relaxation_ = d->relaxation;
  } else if (const auto* p = std::get_if<PlasmaParams>(&tail)) {
    if (!(p->plasma_frequency > 0.0)) throw DomainError("plasma frequency must be positive");
    m.plasma_frequency_ = p->plasma_frequency;
  } else {
    throw DomainError("tabulated material needs a Drude or plasma tail");
  }
  m.kind_ = extrapolation == Model::drude ? PermittivityKind::tabulated_with_drude_tail
                                          : PermittivityKind::tabulated_with_plasma_tail;
  if (extrapolation == Model::drude && !m.relaxation_)
    throw DomainError("drude model requested against a material lacking a relaxation parameter");
  m.table_ = std::make_shared<const OpticalDataTable>(std::move(table));
  m.transform_ = std::make_shared<const KramersKronigTransform>(*m.table_, tail, match_energy);
  return m;
}

bool MaterialResponse::is_metal() const {
  return kind_ != PermittivityKind::oscillator && kind_ != PermittivityKind::vacuum;
}

MaterialResponse MaterialResponse::with_model(Model target) const {
  if (!is_metal()) return *this;
  MaterialResponse m = *this;
  const bool tabulated =
      kind_ == PermittivityKind::tabulated_with_drude_tail || kind_ == PermittivityKind::tabulated_with_plasma_tail;
  if (target == Model::drude) {
    if (!relaxation_)
      throw DomainError("drude model requested against material '" + name_ + "' lacking a relaxation parameter");
    m.kind_ = tabulated ? PermittivityKind::tabulated_with_drude_tail : PermittivityKind::drude;
  } else {
    m.kind_ = tabulated ? PermittivityKind::tabulated_with_plasma_tail : PermittivityKind::plasma;
  }
  return m;
}

double MaterialResponse::permittivity(double xi) const {
  if (!(xi >= 0.0)) throw DomainError("permittivity requires xi >= 0");
  switch (kind_) {
    case PermittivityKind::vacuum:
      return 1.0;
    case PermittivityKind::drude: {
      if (xi == 0.0) return std::numeric_limits<double>::infinity();
      const double wp = *plasma_frequency_;
      return 1.0 + wp * wp / (xi * (xi + *relaxation_));
    }
    case PermittivityKind::plasma: {
      if (xi == 0.0) throw DomainError("zero-frequency pole of the plasma model");
      const double wp = *plasma_frequency_;
      return 1.0 + wp * wp / (xi * xi);
    }
    case PermittivityKind::oscillator: {
      double eps = 1.0;
      for (std::size_t j = 0; j < oscillators_.strengths.size(); ++j) {
        const double w = units::rad_per_s_to_ev(oscillators_.frequencies[j]);
        eps += oscillators_.strengths[j] * w * w / (w * w + xi * xi);
      }
      return eps;
    }
    case PermittivityKind::tabulated_with_drude_tail:
      if (xi == 0.0) return std::numeric_limits<double>::infinity();
      return (*transform_)(xi);
    case PermittivityKind::tabulated_with_plasma_tail: {
      if (xi == 0.0) throw DomainError("zero-frequency pole of the plasma model");
      if (!relaxation_) return (*transform_)(xi);  // transform carries the pole itself
      // Replace the free-electron (Drude) absorption by the dissipationless pole.
      const double wp = *plasma_frequency_, g = *relaxation_;
      return (*transform_)(xi) + wp * wp * g / (xi * xi * (xi + g));
    }
  }
  return 1.0;
}

double permittivity(const MaterialResponse& material, double xi) { return material.permittivity(xi); }

double permeability(const MaterialResponse& material, int matsubara_index) {
  return matsubara_index == 0 ? material.static_permeability() : 1.0;
}

std::vector<double> matsubara_grid(const MaterialResponse& material, double temperature_k, int l_max) {
  if (!(temperature_k > 0.0)) throw DomainError("temperature must be positive");
  if (l_max < 1) throw DomainError("l_max must be >= 1");
  std::vector<double> eps(static_cast<std::size_t>(l_max));
  for (int l = 1; l <= l_max; ++l) eps[l - 1] = material.permittivity(units::matsubara_energy(temperature_k, l));
  return eps;
}

}  // namespace casimir
