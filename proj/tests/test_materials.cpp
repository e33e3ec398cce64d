#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "casimir/errors.hpp"
#include "casimir/registry.hpp"
#include "oracles.hpp"

using namespace casimir;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

}  // namespace

TEST_CASE("analytic permittivities on the imaginary axis") {
  const auto ni = MaterialResponse::drude("Ni", {4.89, 0.0436}, 110.0);
  CHECK(ni.permittivity(0.1624) == rel(1.0 + 4.89 * 4.89 / (0.1624 * (0.1624 + 0.0436))).epsilon(1e-14));
  CHECK(std::isinf(ni.permittivity(0.0)));

  const auto pl = MaterialResponse::plasma("Ni", {4.89}, 110.0);
  CHECK(pl.permittivity(1.0) == rel(1.0 + 4.89 * 4.89).epsilon(1e-14));
  CHECK_THROWS_AS(pl.permittivity(0.0), DomainError);
  CHECK_THROWS_AS(ni.permittivity(-1.0), DomainError);

  const auto reg = MaterialRegistry::builtin();
  const auto& sapphire = reg.get("sapphire");
  CHECK(sapphire.permittivity(0.0) == rel(1.0 + 7.03 + 2.072));
  const double w_ir = 1e14 * 6.582119569e-16, w_uv = 2e16 * 6.582119569e-16;
  const double xi = w_uv;
  CHECK(sapphire.permittivity(xi) ==
        rel(1.0 + 7.03 * w_ir * w_ir / (w_ir * w_ir + xi * xi) + 2.072 / 2.0).epsilon(1e-14));
  CHECK(MaterialResponse::vacuum().permittivity(3.0) == 1.0);
}

TEST_CASE("every analytic model tends to one at very large xi") {
  const auto reg = MaterialRegistry::builtin();
  for (const char* name : {"Ni", "Pt", "Al", "Cu", "Fe", "sapphire", "vacuum"}) {
    for (Model m : {Model::drude, Model::plasma}) {
      CAPTURE(name);
      CHECK(std::abs(reg.get(name).with_model(m).permittivity(1e6) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("permittivity is >= 1, decreasing, and plasma >= Drude") {
  const auto reg = MaterialRegistry::builtin();
  const auto grid = log_grid(1e-3, 1e3, 200);
  for (const auto& name : reg.names()) {
    CAPTURE(name);
    const auto& mat = reg.get(name);
    double prev = std::numeric_limits<double>::infinity();
    for (double xi : grid) {
      const double e = mat.with_model(Model::drude).permittivity(xi);
      CHECK(e >= 1.0);
      CHECK(e <= prev);
      prev = e;
      CHECK(mat.with_model(Model::plasma).permittivity(xi) >= e);
    }
  }
}

TEST_CASE("permeability is static only at l = 0") {
  const auto ni = MaterialResponse::drude("Ni", {4.89, 0.0436}, 110.0);
  CHECK(permeability(ni, 0) == 110.0);
  CHECK(permeability(ni, 1) == 1.0);
  const auto grid = matsubara_grid(ni, 300.0, 3);
  REQUIRE(grid.size() == 3);
  CHECK(grid[0] == rel(ni.permittivity(2 * oracle::pi * oracle::k_b * 300.0)));
  CHECK_THROWS_AS(matsubara_grid(ni, 0.0, 3), DomainError);
}

TEST_CASE("model switching") {
  const auto pl = MaterialResponse::plasma("X", {5.0});
  CHECK_THROWS_AS(pl.with_model(Model::drude), DomainError);
  const auto d = MaterialResponse::drude("X", {5.0, 0.05});
  CHECK(d.with_model(Model::plasma).kind() == PermittivityKind::plasma);
  CHECK(d.with_model(Model::plasma).with_model(Model::drude).kind() == PermittivityKind::drude);
  CHECK_THROWS_AS(MaterialResponse::drude("X", {5.0, 0.0}), DomainError);
  CHECK_THROWS_AS(MaterialResponse::drude("X", {5.0, 0.1}, 0.5), DomainError);
}

TEST_CASE("Kramers-Kronig reproduces a synthetic Drude metal") {
  const double wp = 9.0, g = 0.035;
  const OpticalDataTable table(
      oracle::synthetic_table([&](double w) { return oracle::drude_real_axis(wp, g, w); }, 0.05, 5e3, 1500));
  const KramersKronigTransform kk(table, DrudeParams{wp, g});
  for (double xi : {0.01, 0.1624, 0.5, 1.0, 3.0, 10.0, 100.0}) {
    CAPTURE(xi);
    CHECK(kk(xi) == rel(oracle::drude_eps(wp, g, xi)).epsilon(1e-4));
  }
  // Plasma continuation of the same table adds wp^2 g / (xi^2 (xi + g)).
  const auto m = MaterialResponse::tabulated("D", table, DrudeParams{wp, g}, Model::plasma);
  for (double xi : {0.1624, 1.0, 10.0})
    CHECK(m.permittivity(xi) == rel(oracle::plasma_eps(wp, xi)).epsilon(1e-4));
}

TEST_CASE("Kramers-Kronig reproduces a synthetic Lorentz oscillator") {
  const double c = 3.0, w0 = 2.0, g = 0.3;
  const OpticalDataTable table(
      oracle::synthetic_table([&](double w) { return oracle::lorentz_real_axis(c, w0, g, w); }, 1e-4, 1e4, 8000));
  const KramersKronigTransform kk(table, std::monostate{});
  for (double xi : {0.01, 0.5, 2.0, 10.0}) {
    CAPTURE(xi);
    CHECK(kk(xi) == rel(1.0 + c * w0 * w0 / (w0 * w0 + xi * xi + g * xi)).epsilon(1e-4));
  }
  CHECK_THROWS_AS(kk(0.0), DomainError);
}

TEST_CASE("tabulated metals: KK pieces and high-energy limit") {
  const auto reg = MaterialRegistry::builtin();
  const auto& cu = reg.get("Cu_tab");
  REQUIRE(cu.table() != nullptr);
  CHECK(cu.kind() == PermittivityKind::tabulated_with_drude_tail);
  CHECK(std::abs(cu.permittivity(1e6) - 1.0) < 1e-8);
  // Where the far-infrared data exist, the Drude tail continues them to within
  // a factor 2. Not for Cu (the low-energy rows are a different extrapolation,
  // about 0.36 of the Drude value) or Pt (data start at 0.5 eV).
  for (const char* name : {"Ni", "Fe", "Al"}) {
    CAPTURE(name);
    const auto& m = reg.get(std::string(name) + "_tab");
    const double wp = *m.plasma_frequency(), g = *m.relaxation();
    const auto first = m.table()->rows().front();
    const double drude_imag = wp * wp * g / (first.energy_ev * (first.energy_ev * first.energy_ev + g * g));
    CHECK(first.eps_imag() / drude_imag > 0.5);
    CHECK(first.eps_imag() / drude_imag < 2.0);
  }
}

TEST_CASE("optical CSV parsing") {
  const auto t = parse_optical_csv("# comment\nenergy_ev, n, k\n0.5,1,2\n\n1.0,1.5,1\n");
  REQUIRE(t.rows().size() == 2);
  CHECK(t.rows()[1].eps_imag() == rel(3.0));

  auto line_of = [](const char* text) {
    try {
      parse_optical_csv(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("energy_ev,n,k\n0.5,1,2\n0.7,1,x\n") == 3);
  CHECK(line_of("energy_ev,n,k\n0.5,1,2\n0.4,1,1\n") == 3);
  CHECK(line_of("energy_ev,n,k\n0.5,1\n") == 2);
  CHECK(line_of("wavelength,n,k\n0.5,1,2\n") == 1);
  CHECK(line_of("# only a comment\nenergy_ev,n,k\n\n-1,1,1\n") == 4);
  CHECK_THROWS_AS(parse_optical_csv("energy_ev,n,k\n"), ConfigError);
  CHECK_THROWS_AS(load_optical_csv("/nonexistent/table.csv"), ConfigError);
}

TEST_CASE("built-in registry") {
  const auto reg = MaterialRegistry::builtin();
  const auto& ni = reg.get("Ni");
  CHECK(*ni.plasma_frequency() == 4.89);
  CHECK(*ni.relaxation() == 0.0436);
  CHECK(ni.static_permeability() == 110.0);
  CHECK(reg.get("Fe").static_permeability() == 1e4);
  CHECK(reg.get("Pt").approximate());
  CHECK_FALSE(reg.get("Cu").approximate());
  CHECK(reg.get("Ni_tab").static_permeability() == 110.0);
  CHECK_THROWS_AS(reg.get("Unobtainium"), ConfigError);
  CHECK(reg.user_entries().empty());
}

TEST_CASE("registry JSON files") {
  const auto dir = std::filesystem::temp_directory_path() / "casimir_registry_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "t.csv") << "energy_ev,n,k\n0.1,3,20\n1,1.5,4\n10,0.9,0.1\n";
    std::ofstream(dir / "reg.json") << R"({
      "Mine": {"kind": "tabulated_with_drude_tail", "plasma_frequency_ev": 5.0, "relaxation_ev": 0.05,
               "static_permeability": 2.0, "table": "t.csv"},
      "Glass": {"kind": "oscillator", "oscillators": [{"strength": 1.5, "frequency_rad_s": 2e16}]},
      "Ni": {"kind": "plasma", "plasma_frequency_ev": 4.0}
    })";
  }
  const auto reg = MaterialRegistry::load(dir / "reg.json");
  CHECK(reg.get("Mine").static_permeability() == 2.0);
  CHECK(reg.get("Mine").table()->rows().size() == 3);
  CHECK(reg.get("Glass").permittivity(0.0) == rel(2.5));
  CHECK(*reg.get("Ni").plasma_frequency() == 4.0);  // file entries override built-ins
  CHECK(std::filesystem::path(reg.entry("Mine")["table"].get<std::string>()).is_absolute());
  CHECK(reg.user_entries().size() == 3);

  MaterialRegistry r2 = MaterialRegistry::builtin();
  CHECK_THROWS_AS(r2.add("Bad", {{"kind", "laser"}}, dir), ConfigError);
  CHECK_THROWS_AS(r2.add("Bad", {{"kind", "drude"}, {"plasma_frequency_ev", 5.0}}, dir), ConfigError);
  CHECK_THROWS_AS(r2.add("Bad", {{"kind", "drude"}, {"plasma_frequency_ev", -5.0}, {"relaxation_ev", 0.1}}, dir),
                  ConfigError);
  std::filesystem::remove_all(dir);
}
