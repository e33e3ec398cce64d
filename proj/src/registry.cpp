#include "casimir/registry.hpp"

#include <fstream>

#include "casimir/errors.hpp"

namespace casimir {

using nlohmann::json;

namespace {

struct MetalDefaults {
  const char* name;
  double plasma_frequency;
  double relaxation;
  double mu;
  bool approximate;
};

// Free-electron parameters used for the low-frequency extrapolation (eV).
// Pt relaxation is only known approximately.
constexpr MetalDefaults kMetals[] = {
    {"Ni", 4.89, 0.0436, 110.0, false}, {"Pt", 4.94, 0.13, 1.0, true},  {"Al", 11.34, 0.041, 1.0, false},
    {"Cu", 8.6, 0.0325, 1.0, false},    {"Fe", 4.09, 0.018, 1.0e4, false},
};

double number(const json& j, const char* key, const std::string& name) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError("material '" + name + "': missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

OpticalDataTable bundled_optical_table(std::string_view metal) {
  for (const auto& [name, csv] : detail::bundled_optical_tables())
    if (name == metal) return parse_optical_csv(csv);
  throw ConfigError("no bundled optical table for '" + std::string(metal) + "'");
}

MaterialResponse material_from_json(const std::string& name, const json& entry,
                                    const std::filesystem::path& base_dir) {
  if (!entry.is_object()) throw ConfigError("material '" + name + "': entry must be an object");
  if (!entry.contains("kind") || !entry.at("kind").is_string())
    throw ConfigError("material '" + name + "': missing 'kind'");
  const auto kind = parse_permittivity_kind(entry.at("kind").get<std::string>());
  const double mu = entry.value("static_permeability", 1.0);
  const bool approximate = entry.value("approximate", false);

  MaterialResponse m = MaterialResponse::vacuum();
  try {
    switch (kind) {
      case PermittivityKind::vacuum:
        break;
      case PermittivityKind::drude:
        m = MaterialResponse::drude(name, {number(entry, "plasma_frequency_ev", name), number(entry, "relaxation_ev", name)},
                                    mu);
        break;
      case PermittivityKind::plasma:
        m = MaterialResponse::plasma(name, {number(entry, "plasma_frequency_ev", name)}, mu);
        if (entry.contains("relaxation_ev"))
          m = MaterialResponse::drude(name, {number(entry, "plasma_frequency_ev", name), number(entry, "relaxation_ev", name)},
                                      mu)
                  .with_model(Model::plasma);
        break;
      case PermittivityKind::oscillator: {
        OscillatorParams p;
        for (const auto& o : entry.value("oscillators", json::array())) {
          p.strengths.push_back(number(o, "strength", name));
          p.frequencies.push_back(number(o, "frequency_rad_s", name));
        }
        m = MaterialResponse::oscillator(name, std::move(p));
        break;
      }
      case PermittivityKind::tabulated_with_drude_tail:
      case PermittivityKind::tabulated_with_plasma_tail: {
        if (!entry.contains("table") || !entry.at("table").is_string())
          throw ConfigError("material '" + name + "': tabulated kinds need a 'table' path");
        const std::string ref = entry.at("table").get<std::string>();
        OpticalDataTable table;
        if (ref.starts_with("builtin:")) {
          table = bundled_optical_table(ref.substr(8));
        } else {
          std::filesystem::path p(ref);
          if (p.is_relative()) p = base_dir / p;
          table = load_optical_csv(p.string());
        }
        KramersKronigTail tail;
        if (entry.contains("relaxation_ev"))
          tail = DrudeParams{number(entry, "plasma_frequency_ev", name), number(entry, "relaxation_ev", name)};
        else
          tail = PlasmaParams{number(entry, "plasma_frequency_ev", name)};
        std::optional<double> match;
        if (entry.contains("match_energy_ev")) match = number(entry, "match_energy_ev", name);
        const Model extrapolation =
            kind == PermittivityKind::tabulated_with_drude_tail ? Model::drude : Model::plasma;
        m = MaterialResponse::tabulated(name, std::move(table), tail, extrapolation, mu, match);
        break;
      }
    }
  } catch (const DomainError& e) {
    throw ConfigError("material '" + name + "': " + e.what());
  }
  if (kind == PermittivityKind::vacuum && mu != 1.0)
    throw ConfigError("material '" + name + "': vacuum has unit permeability");
  return m.mark_approximate(approximate);
}

MaterialRegistry MaterialRegistry::builtin() {
  MaterialRegistry r;
  const std::filesystem::path none;
  r.add("vacuum", {{"kind", "vacuum"}}, none);
  r.add("sapphire", {{"kind", "oscillator"},
                     {"static_permeability", 1.0},
                     {"oscillators",
                      {{{"strength", 7.03}, {"frequency_rad_s", 1.0e14}}, {{"strength", 2.072}, {"frequency_rad_s", 2.0e16}}}}},
        none);
  for (const auto& m : kMetals) {
    json e = {{"kind", "drude"},
              {"plasma_frequency_ev", m.plasma_frequency},
              {"relaxation_ev", m.relaxation},
              {"static_permeability", m.mu}};
    if (m.approximate) e["approximate"] = true;
    r.add(m.name, e, none);
    e["kind"] = "tabulated_with_drude_tail";
    e["table"] = std::string("builtin:") + m.name;
    r.add(std::string(m.name) + "_tab", e, none);
  }
  for (auto& [_, entry] : r.entries_) entry.builtin = true;
  return r;
}

MaterialRegistry MaterialRegistry::load(const std::filesystem::path& path) {
  MaterialRegistry r = builtin();
  if (path.empty() || !std::filesystem::exists(path)) return r;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open registry '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("registry '" + path.string() + "' is not valid JSON: " + e.what());
  }
  r.merge_json(doc, path.parent_path());
  return r;
}

void MaterialRegistry::merge_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("registry must be a JSON object keyed by material name");
  for (const auto& [name, entry] : doc.items()) add(name, entry, base_dir);
}

void MaterialRegistry::add(const std::string& name, const json& entry, const std::filesystem::path& base_dir) {
  json source = entry;
  // Stored table paths are absolute so entries can be copied into run configs.
  if (source.is_object() && source.contains("table") && source.at("table").is_string()) {
    const std::string ref = source.at("table").get<std::string>();
    if (!ref.starts_with("builtin:") && std::filesystem::path(ref).is_relative())
      source["table"] = std::filesystem::absolute(base_dir / ref).lexically_normal().string();
  }
  entries_.insert_or_assign(name, Entry{material_from_json(name, source, base_dir), source, false});
}

bool MaterialRegistry::contains(std::string_view name) const { return entries_.find(name) != entries_.end(); }

const MaterialResponse& MaterialRegistry::get(std::string_view name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown material '" + std::string(name) + "'");
  return it->second.material;
}

const json& MaterialRegistry::entry(std::string_view name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown material '" + std::string(name) + "'");
  return it->second.source;
}

std::vector<std::string> MaterialRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

json MaterialRegistry::user_entries() const {
  json out = json::object();
  for (const auto& [name, e] : entries_)
    if (!e.builtin) out[name] = e.source;
  return out;
}

}  // namespace casimir
