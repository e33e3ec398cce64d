#include <doctest.h>

#include "approx.hpp"

#include <chrono>
#include <cmath>

#include "casimir/analytic_limits.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/units.hpp"
#include "configs.hpp"

using namespace casimir;

namespace {

const MaterialRegistry& registry() {
  static const MaterialRegistry reg = MaterialRegistry::builtin();
  return reg;
}

LayerStack stack_of(const std::string& p1, const std::string& film, const std::string& p3, double a) {
  return {registry().get(p1), registry().get(film), registry().get(p3), a, 300.0};
}

}  // namespace

TEST_CASE("radial wave number") {
  CHECK(radial_wavenumber(0.3, 4.0, 1.0, 0.0) == 0.3);
  CHECK(radial_wavenumber(0.0, 4.0, 1.0, 1.0) == rel(2.0 / 197.327).epsilon(1e-15));
  const double k0 = 0.1624 / 197.327;
  CHECK(radial_wavenumber(0.01, 715.8, 1.0, 0.1624) == rel(std::sqrt(1e-4 + 715.8 * k0 * k0)).epsilon(1e-15));
}

TEST_CASE("reflection coefficients") {
  const MediumSide same{5.0, 2.0, 0.1};
  CHECK(reflection(Polarization::tm, same, same) == 0.0);
  CHECK(reflection(Polarization::te, same, same) == 0.0);
  // xi = 0 with Drude metals: kz = k_perp on both sides
  const MediumSide ni{1e12, 110.0, 0.02}, vac{1.0, 1.0, 0.02};
  CHECK(reflection(Polarization::te, ni, vac) == rel(-109.0 / 111.0).epsilon(1e-15));
  CHECK(reflection(Polarization::tm, ni, vac) == rel(-1.0).epsilon(1e-11));
  const MediumSide grazing1{3.0, 1.0, 0.0}, grazing2{7.0, 1.0, 0.0};
  CHECK(reflection(Polarization::tm, grazing1, grazing2) == 0.0);
}

TEST_CASE("Matsubara terms against brute-force trapezoid quadrature") {
  const auto cases = regression_cases(registry());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CAPTURE(i);
    const auto& c = cases[i];
    CHECK(matsubara_term(c.stack, c.model, c.l, c.quantity) == rel(oracle_term(c)).epsilon(1e-6));
  }
}

TEST_CASE("Matsubara terms: identical media and decay") {
  const LayerStack same = stack_of("Cu", "Cu", "Cu", 50);
  for (int l : {1, 5, 50}) CHECK(matsubara_term(same, Model::drude, l, Quantity::free_energy) == 0.0);

  const LayerStack free = stack_of("vacuum", "Ni", "vacuum", 50);
  CHECK(matsubara_term(free, Model::drude, 1, Quantity::free_energy) < 0.0);
  // knee at xi_l ~ hbar c / 2a, i.e. l ~ 12 for 50 nm
  double prev = std::abs(matsubara_term(free, Model::drude, 12, Quantity::free_energy));
  for (int l = 13; l < 200; l += 3) {
    const double cur = std::abs(matsubara_term(free, Model::drude, l, Quantity::free_energy));
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(matsubara_term(free, Model::drude, 0, Quantity::free_energy), DomainError);
}

TEST_CASE("stack and settings validation") {
  LayerStack s = stack_of("vacuum", "Ni", "vacuum", 0.5);
  CHECK_THROWS_AS(free_energy(s, Model::drude), DomainError);
  s.thickness_nm = -3;
  CHECK_THROWS_WITH_AS(free_energy(s, Model::drude), "thickness must be positive", DomainError);
  s.thickness_nm = 50;
  s.temperature_k = 0;
  CHECK_THROWS_AS(free_energy(s, Model::drude), DomainError);
  MatsubaraSettings bad;
  bad.quad_rel_tol = 2.0;
  CHECK_THROWS_AS(free_energy(stack_of("vacuum", "Ni", "vacuum", 50), Model::drude, bad), DomainError);
  bad = {};
  bad.max_terms = 0;
  CHECK_THROWS_AS(free_energy(stack_of("vacuum", "Ni", "vacuum", 50), Model::drude, bad), DomainError);
}

TEST_CASE("vacuum film and plate exchange") {
  for (Model m : {Model::drude, Model::plasma}) {
    const auto r = free_energy(stack_of("vacuum", "vacuum", "vacuum", 80), m);
    CHECK(r.total == 0.0);
    CHECK(pressure(stack_of("vacuum", "vacuum", "vacuum", 80), m).total == 0.0);
    for (const auto& c : reference_configurations(registry(), "", 70)) {
      CAPTURE(c.name);
      for (Quantity q : {Quantity::free_energy, Quantity::pressure}) {
        const double x = evaluate(c.stack, m, q).total;
        const double y = evaluate(c.stack.swapped_plates(), m, q).total;
        CHECK(std::abs(x - y) <= 1e-12 * std::abs(x));
      }
    }
  }
}

TEST_CASE("accumulation identity and reporting units") {
  const auto r = free_energy(stack_of("Cu", "Ni", "vacuum", 70), Model::drude);
  double total = r.zero_term;
  for (double t : r.per_l_terms) total += t;
  CHECK(total == r.total);
  CHECK(r.l_used == static_cast<int>(r.per_l_terms.size()));
  CHECK(r.total_si() == rel(r.total * 0.1602176634).epsilon(1e-15));
  CHECK(r.scaled_micro_ev() == rel(70.0 * 70.0 * r.total * 1e6).epsilon(1e-15));
  const auto p = pressure(stack_of("Cu", "Ni", "vacuum", 70), Model::drude);
  CHECK(p.total_si() == rel(p.total * 1.602176634e8).epsilon(1e-15));
}

TEST_CASE("pressure is minus the thickness derivative of the free energy") {
  for (double a : {30.0, 60.0, 120.0, 240.0}) {
    for (const auto& c : reference_configurations(registry(), "", a)) {
      for (Model m : {Model::drude, Model::plasma}) {
        CAPTURE(c.name);
        CAPTURE(a);
        CAPTURE(to_string(m));
        auto f = [&](double x) { return free_energy(c.stack.with_thickness(x), m).total; };
        const double p = pressure(c.stack, m).total;
        CHECK(-oracle::derivative5(f, a, a / 2000) == rel(p).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("classical limit of the free-standing film") {
  const LayerStack s = stack_of("vacuum", "Ni", "vacuum", 200);
  const auto f = free_energy(s, Model::drude);
  CHECK(f.total == rel(drude_zero_free_energy(s)).epsilon(0.02));
  // the pressure approaches its classical value more slowly
  auto p_dev = [&](double a) {
    const LayerStack t = s.with_thickness(a);
    return std::abs(pressure(t, Model::drude).total / drude_zero_pressure(t) - 1.0);
  };
  CHECK(p_dev(200) < 0.05);
  CHECK(p_dev(400) < p_dev(200));
  for (double a : {25.0, 100.0, 300.0})
    for (Model m : {Model::drude, Model::plasma}) CHECK(free_energy(s.with_thickness(a), m).total < 0.0);
}

TEST_CASE("truncation is stable when the number of terms doubles") {
  MatsubaraSettings settings;
  for (const auto& c : reference_configurations(registry(), "", 25)) {
    CAPTURE(c.name);
    const auto r = free_energy(c.stack, Model::drude, settings);
    MatsubaraSettings doubled = settings;
    doubled.fixed_terms = 2 * r.l_used;
    const auto r2 = free_energy(c.stack, Model::drude, doubled);
    double scale = std::abs(r.zero_term);
    for (double t : r.per_l_terms) scale += std::abs(t);
    CHECK(std::abs(r2.total - r.total) < 10 * settings.term_tail_rel_tol * scale);
    CHECK(r.l_used <= 3000);
  }
}

TEST_CASE("non-convergence is reported") {
  MatsubaraSettings tight;
  tight.max_terms = 3;
  try {
    free_energy(stack_of("vacuum", "Ni", "vacuum", 30), Model::drude, tight);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.matsubara_index() == 3);
    CHECK(e.achieved() > tight.term_tail_rel_tol);
  }
}

TEST_CASE("single evaluation cost") {
  const auto start = std::chrono::steady_clock::now();
  free_energy(stack_of("Cu_tab", "Ni_tab", "vacuum", 25), Model::drude);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("Ni_tab on Cu_tab, 25 nm: " << ms << " ms");
  CHECK(ms < 1000.0);
}
