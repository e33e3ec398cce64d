#include "casimir/analytic_limits.hpp"

#include <algorithm>
#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/units.hpp"

namespace casimir {

ZeroFreqMedium zero_frequency_medium(const MaterialResponse& m, Model model) {
  ZeroFreqMedium z;
  z.mu = m.static_permeability();
  switch (m.kind()) {
    case PermittivityKind::vacuum:
      return z;
    case PermittivityKind::oscillator:
      z.static_permittivity = 1.0;
      for (double c : m.oscillators().strengths) z.static_permittivity += c;
      return z;
    default:
      break;
  }
  z.metal = true;
  const double wp = *m.plasma_frequency();
  if (model == Model::drude) {
    if (!m.relaxation())
      throw DomainError("drude model requested against material '" + m.name() + "' lacking a relaxation parameter");
    z.drude_weight = wp * wp / *m.relaxation();
  } else {
    z.plasma_frequency = wp;
  }
  return z;
}

ZeroFreqCoefficients::ZeroFreqCoefficients(const LayerStack& stack, Model model) : model_(model) {
  stack.validate();
  const double scale = 2.0 * stack.thickness_nm / units::hbar_c_ev_nm;
  auto side = [&](const MaterialResponse& m) {
    Side s{zero_frequency_medium(m, model), 0.0};
    if (model == Model::plasma && s.medium.metal) {
      const double w = scale * s.medium.plasma_frequency;
      s.omega_tilde2 = s.medium.mu * w * w;
    }
    return s;
  };
  plate1_ = side(stack.plate1);
  film_ = side(stack.film);
  plate3_ = side(stack.plate3);
  v_min_ = std::sqrt(film_.omega_tilde2);
}

// sqrt(v^2 - mu_2 w_2^2 + mu_n w_n^2) with v = v_min + t. The larger of the two
// non-negative pieces is factored out so the magnetic plate term (mu ~ 1e4)
// never swamps the small one.
double ZeroFreqCoefficients::kappa(const Side& s, double t) const {
  const double a = t * (t + 2.0 * v_min_);
  const double b = s.omega_tilde2;
  const double big = std::max(a, b), small = std::min(a, b);
  if (big == 0.0) return 0.0;
  return std::sqrt(big) * std::sqrt(1.0 + small / big);
}

double ZeroFreqCoefficients::tm(const Side& film, const Side& other, double t) const {
  const auto& f = film.medium;
  const auto& o = other.medium;
  if (f.metal && !o.metal) return -1.0;
  if (!f.metal && o.metal) return 1.0;
  if (!f.metal) return (o.static_permittivity - f.static_permittivity) / (o.static_permittivity + f.static_permittivity);
  if (model_ == Model::drude) return (o.drude_weight - f.drude_weight) / (o.drude_weight + f.drude_weight);
  // eps_n / eps_2 -> wp_n^2 / wp_2^2 as xi -> 0
  const double en = o.plasma_frequency * o.plasma_frequency;
  const double e2 = f.plasma_frequency * f.plasma_frequency;
  const double k2 = kappa(film, t), kn = kappa(other, t);
  const double den = en * k2 + e2 * kn;
  return den == 0.0 ? 0.0 : (en * k2 - e2 * kn) / den;
}

double ZeroFreqCoefficients::te(const Side& film, const Side& other, double t) const {
  const double m2 = film.medium.mu, mn = other.medium.mu;
  if (model_ == Model::drude) return (mn - m2) / (mn + m2);
  const double k2 = kappa(film, t), kn = kappa(other, t);
  const double den = mn * k2 + m2 * kn;
  if (den == 0.0) return (mn - m2) / (mn + m2);
  return (mn * k2 - m2 * kn) / den;
}

ZeroFreqCoefficients zero_coeffs(const LayerStack& stack, Model model) { return ZeroFreqCoefficients(stack, model); }

namespace {

double drude_bracket(const LayerStack& stack) {
  const ZeroFreqCoefficients c(stack, Model::drude);
  return polylog3(c.tm_23() * c.tm_21()) + polylog3(c.te_23() * c.te_21());
}

enum class ZeroQuantity { free_energy, pressure };

// Integral over v of the plasma l = 0 integrand, with v = v_min + u^2 to
// remove the square-root behaviour of kappa at the lower limit.
double plasma_zero_integral(const LayerStack& stack, ZeroQuantity q) {
  const ZeroFreqCoefficients c(stack, Model::plasma);
  const double v_min = c.v_min();
  auto integrand = [&](double u) {
    const double t = u * u;
    const double v = v_min + t;
    const double decay = std::exp(-t);  // e^-v relative to e^-v_min
    double sum = 0.0;
    for (double product : {c.tm_23(t) * c.tm_21(t), c.te_23(t) * c.te_21(t)}) {
      if (std::abs(product) > 1.0 + 1e-12) throw InvariantViolation("|r| > 1 in the plasma zero-frequency term");
      const double y = product * decay * std::exp(-v_min);
      sum += q == ZeroQuantity::free_energy ? v * std::log1p(-y) : v * v * y / (1.0 - y);
    }
    return 2.0 * u * sum;
  };
  if (std::exp(-v_min) == 0.0) return 0.0;
  const double breaks[] = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5, std::sqrt(80.0)};
  const auto r = quad::integrate(integrand, std::span<const double>(breaks), {1e-11, 1e-300, 4000});
  if (!r.converged) throw ConvergenceError("plasma zero-frequency quadrature did not converge", 0, r.error);
  return r.value;
}

}  // namespace

double drude_zero_free_energy(const LayerStack& stack) {
  const double a = stack.thickness_nm;
  return -units::thermal_energy(stack.temperature_k) / (16.0 * units::pi * a * a) * drude_bracket(stack);
}

double drude_zero_pressure(const LayerStack& stack) {
  const double a = stack.thickness_nm;
  return -units::thermal_energy(stack.temperature_k) / (8.0 * units::pi * a * a * a) * drude_bracket(stack);
}

double plasma_zero_free_energy(const LayerStack& stack) {
  const double a = stack.thickness_nm;
  return units::thermal_energy(stack.temperature_k) / (16.0 * units::pi * a * a) *
         plasma_zero_integral(stack, ZeroQuantity::free_energy);
}

double plasma_zero_pressure(const LayerStack& stack) {
  const double a = stack.thickness_nm;
  return -units::thermal_energy(stack.temperature_k) / (16.0 * units::pi * a * a * a) *
         plasma_zero_integral(stack, ZeroQuantity::pressure);
}

double ideal_metal_limit(const LayerStack& stack, Model model) {
  stack.validate();
  if (model == Model::plasma) return 0.0;
  const ZeroFreqCoefficients c(stack, Model::drude);
  const double a = stack.thickness_nm;
  return -units::thermal_energy(stack.temperature_k) / (16.0 * units::pi * a * a) *
         (units::zeta3 + polylog3(c.te_23() * c.te_21()));
}

}  // namespace casimir
