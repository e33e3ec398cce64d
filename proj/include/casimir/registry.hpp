#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "casimir/materials.hpp"

namespace casimir {

/// Named materials. The built-in set carries the free-electron parameters
/// of Ni, Pt, Al, Cu and Fe, sapphire, vacuum, and `<metal>_tab` variants
/// backed by the bundled optical tables.
///
/// Registry files are JSON objects keyed by material name:
///   { "NiTab": { "kind": "tabulated_with_drude_tail", "plasma_frequency_ev": 4.89,
///                "relaxation_ev": 0.0436, "static_permeability": 110, "table": "ni.csv" } }
/// `table` paths are resolved relative to the registry file; `builtin:<Metal>`
/// refers to a bundled table. Oscillators are listed as
///   "oscillators": [ { "strength": 7.03, "frequency_rad_s": 1e14 }, ... ].
class MaterialRegistry {
 public:
  static MaterialRegistry builtin();

  /// Built-in entries overlaid with the entries of `path` (if it exists).
  static MaterialRegistry load(const std::filesystem::path& path);

  void merge_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

  /// Adds or replaces an entry described by its JSON form.
  void add(const std::string& name, const nlohmann::json& entry, const std::filesystem::path& base_dir);

  bool contains(std::string_view name) const;
  /// Throws ConfigError for unknown names.
  const MaterialResponse& get(std::string_view name) const;
  const nlohmann::json& entry(std::string_view name) const;
  std::vector<std::string> names() const;

  /// JSON for every entry not present in the built-in set.
  nlohmann::json user_entries() const;

 private:
  struct Entry {
    MaterialResponse material;
    nlohmann::json source;
    bool builtin = false;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Builds a material from its registry JSON description.
MaterialResponse material_from_json(const std::string& name, const nlohmann::json& entry,
                                    const std::filesystem::path& base_dir);

/// Bundled `energy_ev,n,k` CSV text, keyed by metal symbol.
OpticalDataTable bundled_optical_table(std::string_view metal);

namespace detail {
std::vector<std::pair<std::string_view, std::string_view>> bundled_optical_tables();
}

}  // namespace casimir
