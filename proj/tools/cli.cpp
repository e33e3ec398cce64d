#include "cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "casimir/analytic_limits.hpp"
#include "casimir/errors.hpp"
#include "casimir/registry.hpp"
#include "casimir/scan.hpp"
#include "casimir/units.hpp"

namespace casimir::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

namespace {

// ---------------------------------------------------------------------------
// Configuration

struct ScanSpec {
  double min = 25.0;
  double max = 250.0;
  int points = 60;
  std::string spacing = "log";
};

struct RunConfig {
  std::string command;
  std::string plate1 = "vacuum";
  std::string film = "Ni";
  std::string plate3 = "vacuum";
  std::optional<double> thickness;
  std::optional<ScanSpec> scan;
  double temperature = 300.0;
  std::vector<Model> models;
  std::vector<Quantity> quantities;
  MatsubaraSettings numerics;
  std::optional<std::pair<double, double>> bracket;
  double tolerance_nm = 0.01;
  std::string format = "csv";
  std::string units = "both";
  json materials = json::object();
};

// Values given on the command line; unset ones fall back to the config file.
struct Flags {
  std::string config_path;
  std::string output_path;
  std::optional<std::string> plate1, film, plate3, spacing, format, units;
  std::optional<double> a, a_min, a_max, temperature, tail_tol, quad_tol, tol;
  std::optional<int> points, max_terms, fixed_terms;
  std::vector<std::string> models, quantities;
  std::vector<double> bracket;
};

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError(std::string("config field '") + key + "' must be a list");
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError(std::string("config field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '#') {
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        constexpr std::string_view tag = "# config: ";
        if (line.starts_with(tag)) return json::parse(line.substr(tag.size()));
        if (!line.starts_with("#")) break;
      }
      throw ConfigError("'" + path + "' has no embedded '# config:' line");
    }
    json j = json::parse(text);
    if (j.is_object() && j.contains("config") && j.contains("columns")) return j.at("config");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

void overlay(json& j, const Flags& f) {
  if (f.plate1) j["plate1"] = *f.plate1;
  if (f.film) j["film"] = *f.film;
  if (f.plate3) j["plate3"] = *f.plate3;
  if (f.a) j["thickness_nm"] = *f.a;
  if (f.a_min) j["scan"]["min"] = *f.a_min;
  if (f.a_max) j["scan"]["max"] = *f.a_max;
  if (f.points) j["scan"]["points"] = *f.points;
  if (f.spacing) j["scan"]["spacing"] = *f.spacing;
  if (f.temperature) j["temperature_K"] = *f.temperature;
  if (!f.models.empty()) j["models"] = f.models;
  if (!f.quantities.empty()) j["quantities"] = f.quantities;
  if (f.tail_tol) j["numerics"]["term_tail_rel_tol"] = *f.tail_tol;
  if (f.quad_tol) j["numerics"]["quad_rel_tol"] = *f.quad_tol;
  if (f.max_terms) j["numerics"]["max_terms"] = *f.max_terms;
  if (f.fixed_terms) j["numerics"]["fixed_terms"] = *f.fixed_terms;
  if (!f.bracket.empty()) {
    if (f.bracket.size() != 2) throw ConfigError("--bracket takes two thicknesses: LO,HI");
    j["bracket"] = f.bracket;
  }
  if (f.tol) j["tolerance_nm"] = *f.tol;
  if (f.format) j["output"]["format"] = *f.format;
  if (f.units) j["output"]["units"] = *f.units;
}

RunConfig parse_config(const std::string& command, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.command = command;
  c.plate1 = field<std::string>(j, "plate1", c.plate1);
  c.film = field<std::string>(j, "film", c.film);
  c.plate3 = field<std::string>(j, "plate3", c.plate3);
  if (j.contains("thickness_nm")) c.thickness = field<double>(j, "thickness_nm", 0.0);
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    ScanSpec spec;
    spec.min = field<double>(s, "min", spec.min);
    spec.max = field<double>(s, "max", spec.max);
    spec.points = field<int>(s, "points", spec.points);
    spec.spacing = field<std::string>(s, "spacing", spec.spacing);
    c.scan = spec;
  }
  c.temperature = field<double>(j, "temperature_K", c.temperature);
  for (const auto& m : string_list(j, "models")) c.models.push_back(parse_model(m));
  for (const auto& q : string_list(j, "quantities")) c.quantities.push_back(parse_quantity(q));
  if (j.contains("numerics")) {
    const json& n = j.at("numerics");
    auto& s = c.numerics;
    s.term_tail_rel_tol = field<double>(n, "term_tail_rel_tol", s.term_tail_rel_tol);
    s.quad_rel_tol = field<double>(n, "quad_rel_tol", s.quad_rel_tol);
    s.quad_abs_floor = field<double>(n, "quad_abs_floor", s.quad_abs_floor);
    s.max_terms = field<int>(n, "max_terms", s.max_terms);
    s.fixed_terms = field<int>(n, "fixed_terms", s.fixed_terms);
  }
  if (j.contains("bracket")) {
    const auto b = field<std::vector<double>>(j, "bracket", {});
    if (b.size() != 2) throw ConfigError("bracket must hold two thicknesses");
    c.bracket = std::pair{b[0], b[1]};
  }
  c.tolerance_nm = field<double>(j, "tolerance_nm", c.tolerance_nm);
  if (j.contains("output")) {
    c.format = field<std::string>(j.at("output"), "format", c.format);
    c.units = field<std::string>(j.at("output"), "units", c.units);
  }
  if (j.contains("materials")) {
    if (!j.at("materials").is_object()) throw ConfigError("'materials' must map names to registry entries");
    c.materials = j.at("materials");
  }

  // Command defaults and validation.
  if (c.models.empty())
    c.models = command == "crossing" ? std::vector{Model::drude} : std::vector{Model::drude, Model::plasma};
  if (c.quantities.empty())
    c.quantities = command == "crossing" || command == "compare"
                       ? std::vector{Quantity::free_energy}
                       : std::vector{Quantity::free_energy, Quantity::pressure};
  if (command == "crossing" && (c.models.size() != 1 || c.quantities.size() != 1))
    throw ConfigError("crossing takes exactly one model and one quantity");
  if (command == "compute") {
    if (!c.thickness) throw ConfigError("compute needs a thickness (--a)");
    c.scan.reset();
  } else if (command == "scan" || command == "crossing") {
    c.thickness.reset();
  } else if (c.thickness) {
    c.scan.reset();
  }
  if (command == "crossing" && c.bracket) c.scan.reset();
  if (command != "crossing") c.bracket.reset();
  if (!c.thickness && !c.bracket && !c.scan && command != "compute") c.scan = ScanSpec{};

  if (c.thickness && !(*c.thickness > 0.0)) throw ConfigError("thickness must be positive");
  if (c.scan) {
    const auto& s = *c.scan;
    if (s.spacing != "log" && s.spacing != "linear") throw ConfigError("scan spacing must be 'log' or 'linear'");
    if (!(s.min > 0.0)) throw ConfigError("thickness must be positive");
    if (s.points < 2 || !(s.max > s.min)) throw ConfigError("scan range is empty");
  }
  if (c.bracket && !(c.bracket->first > 0.0 && c.bracket->second > 0.0))
    throw ConfigError("thickness must be positive");
  if (!(c.tolerance_nm > 0.0)) throw ConfigError("crossing tolerance must be positive");
  if (!(c.temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (c.format != "csv" && c.format != "json") throw ConfigError("output format must be csv or json");
  if (c.units != "natural" && c.units != "si" && c.units != "both")
    throw ConfigError("output units must be natural, si or both");
  try {
    c.numerics.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["plate1"] = c.plate1;
  j["film"] = c.film;
  j["plate3"] = c.plate3;
  j["temperature_K"] = c.temperature;
  if (c.thickness) j["thickness_nm"] = *c.thickness;
  if (c.scan) j["scan"] = {{"min", c.scan->min}, {"max", c.scan->max}, {"points", c.scan->points}, {"spacing", c.scan->spacing}};
  if (c.bracket) j["bracket"] = {c.bracket->first, c.bracket->second};
  if (c.command == "crossing") j["tolerance_nm"] = c.tolerance_nm;
  j["models"] = json::array();
  for (Model m : c.models) j["models"].push_back(std::string(to_string(m)));
  j["quantities"] = json::array();
  for (Quantity q : c.quantities) j["quantities"].push_back(std::string(to_string(q)));
  j["numerics"] = {{"term_tail_rel_tol", c.numerics.term_tail_rel_tol},
                   {"quad_rel_tol", c.numerics.quad_rel_tol},
                   {"quad_abs_floor", c.numerics.quad_abs_floor},
                   {"max_terms", c.numerics.max_terms},
                   {"fixed_terms", c.numerics.fixed_terms}};
  j["output"] = {{"format", c.format}, {"units", c.units}};
  j["materials"] = c.materials;
  return j;
}

std::vector<double> scan_grid(const ScanSpec& s) {
  return thickness_grid(s.min, s.max, s.points, s.spacing == "log");
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
};

struct UnitSet {
  bool natural;
  bool si;
};

UnitSet unit_set(const std::string& u) { return {u != "si", u != "natural"}; }

void value_columns(std::vector<std::string>& cols, const std::string& base, Quantity q, UnitSet u) {
  const bool fe = q == Quantity::free_energy;
  if (u.natural) {
    cols.push_back(base + (fe ? "_eV_nm2" : "_eV_nm3"));
    cols.push_back((fe ? "a2" : "a3") + base + "_ueV");
  }
  if (u.si) cols.push_back(base + (fe ? "_J_m2" : "_Pa"));
}

void value_cells(std::vector<Cell>& row, std::optional<double> v, Quantity q, double a, UnitSet u) {
  const bool fe = q == Quantity::free_energy;
  auto put = [&](double scale) { row.push_back(v ? Cell{*v * scale} : Cell{}); };
  if (u.natural) {
    put(1.0);
    put((fe ? a * a : a * a * a) * 1e6);
  }
  if (u.si) put(fe ? units::j_per_m2_per_ev_nm2 : units::pa_per_ev_nm3);
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt::format("{:.12g}", *d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return "";
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(format_cell(c));
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

std::string render(const RunConfig& c, const json& config, const Table& t) {
  const std::string config_text = config.dump();
  const std::string hash = fnv1a64(config_text);
  if (c.format == "json") {
    json doc;
    doc["command"] = c.command;
    doc["config"] = config;
    doc["config_hash"] = "fnv1a64:" + hash;
    doc["notes"] = t.notes;
    doc["columns"] = t.columns;
    doc["rows"] = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (const auto& cell : r) row.push_back(cell_json(cell));
      doc["rows"].push_back(row);
    }
    return doc.dump(2) + "\n";
  }
  std::string s = "# casimir-film " + c.command + "\n";
  s += "# config: " + config_text + "\n";
  s += "# config_hash: fnv1a64:" + hash + "\n";
  for (const auto& n : t.notes) s += "# " + n + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_cell(r[i]);
    s += "\n";
  }
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) throw ConfigError("cannot write '" + path + "'");
  outf << content;
}

std::string unit_note(UnitSet u) {
  std::string n = "units: thickness nm; temperature K";
  if (u.natural) n += "; F eV/nm^2, P eV/nm^3, a2F and a3P in micro-eV";
  if (u.si) n += "; F J/m^2, P Pa";
  return n;
}

// ---------------------------------------------------------------------------
// Commands

struct Context {
  RunConfig config;
  json resolved;
  MaterialRegistry registry;
  LayerStack stack;
  std::string output_path;
};

Context prepare(const std::string& command, const Flags& flags, const std::string& registry_path) {
  json j = json::object();
  fs::path config_dir;
  if (!flags.config_path.empty()) {
    j = read_config_file(flags.config_path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    config_dir = fs::path(flags.config_path).parent_path();
  }
  overlay(j, flags);

  Context ctx{parse_config(command, j), {}, MaterialRegistry::load(registry_path), {}, flags.output_path};
  ctx.registry.merge_json(ctx.config.materials, config_dir);
  json used = json::object();
  for (const auto& name : {ctx.config.plate1, ctx.config.film, ctx.config.plate3})
    used[name] = ctx.registry.entry(name);
  ctx.config.materials = used;
  ctx.resolved = to_json(ctx.config);

  ctx.stack.plate1 = ctx.registry.get(ctx.config.plate1);
  ctx.stack.film = ctx.registry.get(ctx.config.film);
  ctx.stack.plate3 = ctx.registry.get(ctx.config.plate3);
  ctx.stack.temperature_k = ctx.config.temperature;
  ctx.stack.thickness_nm = ctx.config.thickness.value_or(100.0);
  return ctx;
}

void emit(const Context& ctx, const Table& t, std::ostream& out, bool to_stdout_without_path) {
  const std::string content = render(ctx.config, ctx.resolved, t);
  if (!ctx.output_path.empty())
    write_file(ctx.output_path, content);
  else if (to_stdout_without_path)
    out << content;
}

std::string describe_stack(const RunConfig& c) {
  return fmt::format("{} | {} | {} at {} K", c.plate1, c.film, c.plate3, c.temperature);
}

int cmd_compute(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.config;
  const UnitSet u = unit_set(c.units);
  const double a = *c.thickness;
  Table t;
  t.notes.push_back(unit_note(u));
  t.columns = {"model", "quantity", "a_nm"};
  for (const char* base : {"total", "zero_term", "nonzero_terms"}) {
    if (u.natural) t.columns.push_back(std::string(base) + "_natural");
    if (u.si) t.columns.push_back(std::string(base) + "_si");
  }
  if (u.natural) t.columns.push_back("scaled_ueV");
  t.columns.insert(t.columns.end(), {"l_used", "tail_estimate"});

  out << "stack: " << describe_stack(c) << ", a = " << fmt::format("{}", a) << " nm\n";
  for (Quantity q : c.quantities) {
    std::vector<SpectralResult> results;
    for (Model m : c.models) results.push_back(evaluate(ctx.stack.with_thickness(a), m, q, c.numerics));
    const bool fe = q == Quantity::free_energy;
    const double si = fe ? units::j_per_m2_per_ev_nm2 : units::pa_per_ev_nm3;
    for (const auto& r : results) {
      std::vector<Cell> row{std::string(to_string(r.model)), std::string(to_string(q)), a};
      for (double v : {r.total, r.zero_term, r.nonzero_terms()}) {
        if (u.natural) row.push_back(v);
        if (u.si) row.push_back(v * si);
      }
      if (u.natural) row.push_back(r.scaled_micro_ev());
      row.push_back(static_cast<long long>(r.l_used));
      row.push_back(r.tail_estimate);
      t.rows.push_back(std::move(row));

      out << fmt::format("{:<7}{:<12} total {:.6e} {}  ({:.6e} {})  l=0 {:.6e}  l>=1 {:.6e}  {} = {:.4f} ueV  l_used {}\n",
                         to_string(r.model), to_string(q), r.total, fe ? "eV/nm^2" : "eV/nm^3", r.total_si(),
                         fe ? "J/m^2" : "Pa", r.zero_term, r.nonzero_terms(), fe ? "a^2F" : "a^3P",
                         r.scaled_micro_ev(), r.l_used);
    }
    if (results.size() == 2 && results[0].model != results[1].model) {
      const auto& d = results[0].model == Model::drude ? results[0] : results[1];
      const auto& p = results[0].model == Model::drude ? results[1] : results[0];
      if (p.total != 0.0)
        out << fmt::format("ratio |drude|/|plasma| ({}) = {:.4f}\n", to_string(q), std::abs(d.total / p.total));
      else
        out << fmt::format("ratio |drude|/|plasma| ({}) = inf\n", to_string(q));
    }
  }
  emit(ctx, t, out, false);
  return ok;
}

int cmd_scan(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.config;
  const UnitSet u = unit_set(c.units);
  const auto records = thickness_scan(ctx.stack, scan_grid(*c.scan), c.models, c.quantities, c.numerics);
  const bool has_drude = std::find(c.models.begin(), c.models.end(), Model::drude) != c.models.end();
  const bool has_f = std::find(c.quantities.begin(), c.quantities.end(), Quantity::free_energy) != c.quantities.end();

  Table t;
  t.notes.push_back(unit_note(u));
  t.columns = {"a_nm"};
  for (Quantity q : c.quantities) {
    const std::string sym = q == Quantity::free_energy ? "F" : "P";
    for (Model m : c.models) value_columns(t.columns, sym + "_" + std::string(to_string(m)), q, u);
    for (Model m : c.models) value_columns(t.columns, sym + "0_" + std::string(to_string(m)), q, u);
    value_columns(t.columns, sym + "_classical", q, u);
  }
  if (has_drude && has_f) t.columns.push_back("zero_term_fraction_drude");
  t.columns.push_back("l_used_max");

  for (const auto& r : records) {
    std::vector<Cell> row{r.thickness_nm};
    for (Quantity q : c.quantities) {
      const bool fe = q == Quantity::free_energy;
      for (Model m : c.models)
        value_cells(row, m == Model::drude ? (fe ? r.F_drude : r.P_drude) : (fe ? r.F_plasma : r.P_plasma), q,
                    r.thickness_nm, u);
      for (Model m : c.models)
        value_cells(row, m == Model::drude ? (fe ? r.F0_drude : r.P0_drude) : (fe ? r.F0_plasma : r.P0_plasma), q,
                    r.thickness_nm, u);
      value_cells(row, fe ? r.F_classical : r.P_classical, q, r.thickness_nm, u);
    }
    if (has_drude && has_f) row.push_back(r.zero_term_fraction_drude ? Cell{*r.zero_term_fraction_drude} : Cell{});
    row.push_back(static_cast<long long>(r.l_used_max.value_or(0)));
    t.rows.push_back(std::move(row));
  }
  emit(ctx, t, out, true);
  return ok;
}

int cmd_crossing(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.config;
  const Model m = c.models.front();
  const Quantity q = c.quantities.front();
  const CrossingReport rep = c.bracket ? find_sign_change(ctx.stack, m, q, *c.bracket, c.tolerance_nm, c.numerics)
                                       : first_sign_change(ctx.stack, m, q, scan_grid(*c.scan), c.tolerance_nm,
                                                           c.numerics);
  Table t;
  t.notes.push_back("units: thickness nm; residual eV/nm^2 (free energy) or eV/nm^3 (pressure)");
  t.columns = {"quantity", "model", "bracket_lo_nm", "bracket_hi_nm", "root_nm", "residual", "iterations"};
  t.rows.push_back({std::string(to_string(q)), std::string(to_string(m)), rep.bracket.first, rep.bracket.second,
                    rep.root, rep.residual, static_cast<long long>(rep.iterations)});
  out << "stack: " << describe_stack(c) << "\n";
  out << fmt::format("{} ({}) changes sign at a = {:.2f} nm (bracket {:.4g}..{:.4g} nm, {} bisections, residual {:.3e})\n",
                     to_string(q), to_string(m), rep.root, rep.bracket.first, rep.bracket.second, rep.iterations,
                     rep.residual);
  emit(ctx, t, out, false);
  return ok;
}

int cmd_compare(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.config;
  const UnitSet u = unit_set(c.units);
  const std::vector<double> grid = c.thickness ? std::vector<double>{*c.thickness} : scan_grid(*c.scan);
  Table t;
  t.notes.push_back(unit_note(u));
  t.columns = {"a_nm", "quantity"};
  for (const char* m : {"drude", "plasma"}) {
    if (u.natural) t.columns.push_back(std::string(m) + "_natural");
    if (u.si) t.columns.push_back(std::string(m) + "_si");
  }
  t.columns.insert(t.columns.end(), {"ratio_drude_over_plasma", "sign_drude", "sign_plasma"});
  for (double a : grid) {
    for (Quantity q : c.quantities) {
      const RatioReport r = model_ratio(ctx.stack, a, q, c.numerics);
      const double si = q == Quantity::free_energy ? units::j_per_m2_per_ev_nm2 : units::pa_per_ev_nm3;
      std::vector<Cell> row{a, std::string(to_string(q))};
      for (double v : {r.drude, r.plasma}) {
        if (u.natural) row.push_back(v);
        if (u.si) row.push_back(v * si);
      }
      row.push_back(r.infinite ? Cell{std::string("inf")} : Cell{r.ratio});
      row.push_back(static_cast<long long>(r.sign_drude));
      row.push_back(static_cast<long long>(r.sign_plasma));
      t.rows.push_back(std::move(row));
    }
  }
  emit(ctx, t, out, true);
  return ok;
}

// ---------------------------------------------------------------------------
// materials

std::string optional_value(std::optional<double> v, const char* unit) {
  return v ? fmt::format("{:g}{}", *v, unit) : std::string("-");
}

int cmd_materials_list(const MaterialRegistry& reg, std::ostream& out) {
  out << fmt::format("{:<12} {:<28} {:>10} {:>10} {:>8}  {}\n", "name", "kind", "wp_eV", "gamma_eV", "mu0", "notes");
  for (const auto& name : reg.names()) {
    const auto& m = reg.get(name);
    std::string notes;
    if (m.table()) notes += fmt::format("table {} rows", m.table()->rows().size());
    if (m.approximate()) notes += notes.empty() ? "approximate" : ", approximate";
    out << fmt::format("{:<12} {:<28} {:>10} {:>10} {:>8}  {}\n", name, to_string(m.kind()),
                       optional_value(m.plasma_frequency(), ""), optional_value(m.relaxation(), ""),
                       fmt::format("{:g}", m.static_permeability()), notes);
  }
  return ok;
}

int cmd_materials_show(const MaterialRegistry& reg, const std::string& name, std::ostream& out) {
  const auto& m = reg.get(name);
  out << "name: " << name << "\n";
  out << "kind: " << to_string(m.kind()) << "\n";
  if (m.plasma_frequency()) out << fmt::format("plasma frequency: omega_p = {:g} eV\n", *m.plasma_frequency());
  if (m.relaxation()) out << fmt::format("relaxation: gamma = {:g} eV\n", *m.relaxation());
  out << fmt::format("static permeability: mu = {:g}\n", m.static_permeability());
  const auto& osc = m.oscillators();
  for (std::size_t i = 0; i < osc.strengths.size(); ++i)
    out << fmt::format("oscillator {}: C = {:g}, omega = {:g} rad/s\n", i + 1, osc.strengths[i], osc.frequencies[i]);
  if (const auto* t = m.table())
    out << fmt::format("optical table: {} rows, {:g} to {:g} eV\n", t->rows().size(), t->min_energy(), t->max_energy());
  if (m.approximate()) out << "note: parameters are approximate\n";
  out << "entry: " << reg.entry(name).dump() << "\n";
  return ok;
}

struct ImportArgs {
  std::string csv;
  std::string name;
  std::string tail = "drude";
  std::string from;
  std::optional<double> plasma_frequency, relaxation, mu, match_energy;
};

int cmd_materials_import(const ImportArgs& args, const std::string& registry_path, std::ostream& out) {
  const OpticalDataTable table = load_optical_csv(args.csv);
  if (args.name.empty()) throw ConfigError("import needs --name");
  if (args.tail != "drude" && args.tail != "plasma") throw ConfigError("--tail must be drude or plasma");

  json entry;
  entry["kind"] = args.tail == "drude" ? "tabulated_with_drude_tail" : "tabulated_with_plasma_tail";
  if (!args.from.empty()) {
    const MaterialRegistry reg = MaterialRegistry::load(registry_path);
    const auto& base = reg.get(args.from);
    if (!base.plasma_frequency()) throw ConfigError("material '" + args.from + "' has no plasma frequency");
    entry["plasma_frequency_ev"] = *base.plasma_frequency();
    if (base.relaxation()) entry["relaxation_ev"] = *base.relaxation();
    entry["static_permeability"] = base.static_permeability();
  }
  if (args.plasma_frequency) entry["plasma_frequency_ev"] = *args.plasma_frequency;
  if (args.relaxation) entry["relaxation_ev"] = *args.relaxation;
  if (args.mu) entry["static_permeability"] = *args.mu;
  if (args.match_energy) entry["match_energy_ev"] = *args.match_energy;
  if (!entry.contains("plasma_frequency_ev"))
    throw ConfigError("import needs tail parameters: --from NAME or --plasma-frequency [--relaxation] [--mu]");
  if (!entry.contains("static_permeability")) entry["static_permeability"] = 1.0;
  entry["table"] = fs::absolute(args.csv).lexically_normal().string();

  // Validates the entry (tail parameters, matching energy) before writing.
  (void)material_from_json(args.name, entry, {});

  json doc = json::object();
  if (fs::exists(registry_path)) {
    std::ifstream in(registry_path);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("registry '" + registry_path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("registry '" + registry_path + "' must be a JSON object");
  }
  doc[args.name] = entry;
  write_file(registry_path, doc.dump(2) + "\n");
  out << fmt::format("imported {} ({} rows, {:g} to {:g} eV, {} tail) into {}\n", args.name, table.rows().size(),
                     table.min_energy(), table.max_energy(), args.tail, registry_path);
  return ok;
}

void add_run_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config, or an output file with an embedded config");
  sub->add_option("--plate1", f.plate1, "material below the film");
  sub->add_option("--film", f.film, "film material");
  sub->add_option("--plate3", f.plate3, "material above the film");
  sub->add_option("--T", f.temperature, "temperature in K");
  sub->add_option("--model", f.models, "drude, plasma or both (comma separated)")->delimiter(',');
  sub->add_option("--quantity", f.quantities, "free_energy, pressure or both")->delimiter(',');
  sub->add_option("--tail-tol", f.tail_tol, "relative Matsubara tail tolerance");
  sub->add_option("--quad-tol", f.quad_tol, "relative quadrature tolerance");
  sub->add_option("--max-terms", f.max_terms, "largest number of l >= 1 terms");
  sub->add_option("--fixed-terms", f.fixed_terms, "sum exactly this many l >= 1 terms");
  sub->add_option("--format", f.format, "csv or json");
  sub->add_option("--units", f.units, "natural, si or both");
  sub->add_option("-o,--output", f.output_path, "output file");
}

void add_scan_options(CLI::App* sub, Flags& f) {
  sub->add_option("--a-min", f.a_min, "smallest thickness in nm");
  sub->add_option("--a-max", f.a_max, "largest thickness in nm");
  sub->add_option("--points", f.points, "number of thicknesses");
  sub->add_option("--spacing", f.spacing, "log or linear");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Casimir free energy and pressure of metal films", "casimir-film"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::string registry_path;
  if (const char* env = std::getenv("CASIMIR_REGISTRY")) registry_path = env;
  app.add_option("--registry", registry_path, "registry JSON merged over the built-in materials");
  app.set_help_all_flag("--help-all");

  Flags flags;
  auto* compute = app.add_subcommand("compute", "free energy and pressure at one thickness");
  add_run_options(compute, flags);
  compute->add_option("--a", flags.a, "film thickness in nm");

  auto* scan = app.add_subcommand("scan", "thickness sweep");
  add_run_options(scan, flags);
  add_scan_options(scan, flags);

  auto* crossing = app.add_subcommand("crossing", "thickness where a quantity changes sign");
  add_run_options(crossing, flags);
  add_scan_options(crossing, flags);
  crossing->add_option("--bracket", flags.bracket, "LO,HI thickness bracket in nm")->delimiter(',');
  crossing->add_option("--tol", flags.tol, "bracket width at which bisection stops, nm");

  auto* compare = app.add_subcommand("compare", "Drude to plasma ratios");
  add_run_options(compare, flags);
  add_scan_options(compare, flags);
  compare->add_option("--a", flags.a, "single film thickness in nm");

  auto* materials = app.add_subcommand("materials", "inspect and extend the material registry");
  materials->require_subcommand(1);
  materials->add_subcommand("list", "list materials");
  std::string show_name;
  auto* show = materials->add_subcommand("show", "show one material");
  show->add_option("name", show_name)->required();
  ImportArgs imp;
  auto* import = materials->add_subcommand("import", "add an energy_ev,n,k table to a registry file");
  import->add_option("csv", imp.csv, "optical table")->required();
  import->add_option("--name", imp.name, "registry name")->required();
  import->add_option("--tail", imp.tail, "low-frequency extrapolation: drude or plasma");
  import->add_option("--from", imp.from, "copy tail parameters from this material");
  import->add_option("--plasma-frequency", imp.plasma_frequency, "eV");
  import->add_option("--relaxation", imp.relaxation, "eV");
  import->add_option("--mu", imp.mu, "static permeability");
  import->add_option("--match-energy", imp.match_energy, "energy (eV) below which the tail replaces the table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    if (materials->parsed()) {
      if (import->parsed())
        return cmd_materials_import(imp, registry_path.empty() ? "materials.json" : registry_path, out);
      const MaterialRegistry reg = MaterialRegistry::load(registry_path);
      if (show->parsed()) return cmd_materials_show(reg, show_name, out);
      return cmd_materials_list(reg, out);
    }
    for (auto* sub : {compute, scan, crossing, compare}) {
      if (!sub->parsed()) continue;
      const Context ctx = prepare(sub->get_name(), flags, registry_path);
      if (sub == compute) return cmd_compute(ctx, out);
      if (sub == scan) return cmd_scan(ctx, out);
      if (sub == crossing) return cmd_crossing(ctx, out);
      return cmd_compare(ctx, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << "\n";
    return convergence_error;
  } catch (const NoCrossing& e) {
    err << "no crossing: " << e.what() << "\n";
    return no_crossing;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal_error;
  }
  return ok;
}

}  // namespace casimir::cli
