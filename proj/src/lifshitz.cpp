#include "casimir/lifshitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "casimir/analytic_limits.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/units.hpp"

namespace casimir {

void LayerStack::validate() const {
  if (!(thickness_nm > 0.0)) throw DomainError("thickness must be positive");
  if (thickness_nm < 1.0) throw DomainError("thickness below 1 nm is outside the continuum description");
  if (!(temperature_k > 0.0)) throw DomainError("temperature must be positive");
}

std::string_view to_string(Quantity q) { return q == Quantity::free_energy ? "free_energy" : "pressure"; }

Quantity parse_quantity(std::string_view s) {
  if (s == "free_energy" || s == "F") return Quantity::free_energy;
  if (s == "pressure" || s == "P") return Quantity::pressure;
  throw ConfigError("unknown quantity '" + std::string(s) + "' (expected free_energy or pressure)");
}

void MatsubaraSettings::validate() const {
  for (double tol : {term_tail_rel_tol, quad_rel_tol, quad_abs_floor})
    if (!(tol > 0.0 && tol < 1.0)) throw DomainError("tolerances must lie in (0, 1)");
  if (max_terms < 1) throw DomainError("max_terms must be >= 1");
  if (fixed_terms < 0) throw DomainError("fixed_terms must be >= 0");
}

double SpectralResult::nonzero_terms() const {
  double s = 0.0;
  for (double t : per_l_terms) s += t;
  return s;
}

double SpectralResult::total_si() const {
  return quantity == Quantity::free_energy ? total * units::j_per_m2_per_ev_nm2 : total * units::pa_per_ev_nm3;
}

double SpectralResult::scaled_micro_ev() const {
  const double a = thickness_nm;
  return (quantity == Quantity::free_energy ? a * a : a * a * a) * total * 1e6;
}

double radial_wavenumber(double k_perp, double eps, double mu, double xi) {
  const double k0 = xi / units::hbar_c_ev_nm;
  return std::sqrt(k_perp * k_perp + mu * eps * k0 * k0);
}

double reflection(Polarization pol, const MediumSide& film, const MediumSide& other) {
  const double c2 = pol == Polarization::tm ? film.eps : film.mu;
  const double cn = pol == Polarization::tm ? other.eps : other.mu;
  const double num = cn * film.kz - c2 * other.kz;
  const double den = cn * film.kz + c2 * other.kz;
  if (den == 0.0) return 0.0;
  return num / den;
}

namespace {

struct Permittivities {
  double plate1, film, plate3;
};

// Integral over t = v - v_min of the l >= 1 integrand (without prefactor),
// v = 2 a k_2, q = 2 a xi / (hbar c). The reflection coefficients are written
// so that identical media give exactly zero:
//   TE: q^2 (eps_2 - eps_n) / (v + kappa_n)^2
//   TM: (eps_n - eps_2) [v^2 (eps_n + eps_2) - eps_2^2 q^2] / (eps_n v + eps_2 kappa_n)^2
double term_integral(const Permittivities& eps, double q, Quantity quantity, const MatsubaraSettings& settings,
                     int l) {
  const double e2 = eps.film;
  const double q2 = q * q;
  const double v_min = q * std::sqrt(e2);
  const double decay_min = std::exp(-v_min);
  if (decay_min == 0.0) return 0.0;

  auto coefficients = [&](double t, double v, double en) {
    const double kn = std::sqrt(t * (t + 2.0 * v_min) + q2 * en);
    const double s = v + kn;
    const double te = q2 * (e2 - en) / (s * s);
    const double d = en * v + e2 * kn;
    const double tm = (en - e2) * (v * v * (en + e2) - e2 * e2 * q2) / (d * d);
    return std::pair{tm, te};
  };

  auto integrand = [&](double t) {
    const double v = v_min + t;
    const auto [tm3, te3] = coefficients(t, v, eps.plate3);
    const auto [tm1, te1] = coefficients(t, v, eps.plate1);
    if (std::abs(tm3) > 1.0 + 1e-12 || std::abs(tm1) > 1.0 + 1e-12 || std::abs(te3) > 1.0 + 1e-12 ||
        std::abs(te1) > 1.0 + 1e-12)
      throw InvariantViolation("|r| > 1 at Matsubara index " + std::to_string(l));
    const double decay = decay_min * std::exp(-t);
    double sum = 0.0;
    for (double product : {tm3 * tm1, te3 * te1}) {
      const double y = product * decay;
      sum += quantity == Quantity::free_energy ? v * std::log1p(-y) : v * v * y / (1.0 - y);
    }
    return sum;
  };

  const double breaks[] = {0.0, 0.5, 2.0, 6.0, 15.0, 30.0, 60.0};
  const auto r = quad::integrate(integrand, std::span<const double>(breaks),
                                 {settings.quad_rel_tol, settings.quad_abs_floor, 4000});
  if (!r.converged)
    throw ConvergenceError("quadrature did not converge at Matsubara index " + std::to_string(l), l,
                           r.error / std::max(std::abs(r.value), std::numeric_limits<double>::min()));
  return r.value;
}

double prefactor(const LayerStack& stack, Quantity quantity) {
  const double a = stack.thickness_nm;
  const double kt = units::thermal_energy(stack.temperature_k);
  return quantity == Quantity::free_energy ? kt / (8.0 * units::pi * a * a) : -kt / (8.0 * units::pi * a * a * a);
}

struct Resolved {
  MaterialResponse plate1, film, plate3;
};

Resolved resolve(const LayerStack& stack, Model model) {
  return {stack.plate1.with_model(model), stack.film.with_model(model), stack.plate3.with_model(model)};
}

double term_for(const LayerStack& stack, const Resolved& m, int l, Quantity quantity,
                const MatsubaraSettings& settings) {
  const double xi = units::matsubara_energy(stack.temperature_k, l);
  const Permittivities eps{m.plate1.permittivity(xi), m.film.permittivity(xi), m.plate3.permittivity(xi)};
  const double q = 2.0 * stack.thickness_nm * xi / units::hbar_c_ev_nm;
  return prefactor(stack, quantity) * term_integral(eps, q, quantity, settings, l);
}

}  // namespace

double matsubara_term(const LayerStack& stack, Model model, int l, Quantity quantity,
                      const MatsubaraSettings& settings) {
  stack.validate();
  settings.validate();
  if (l < 1) throw DomainError("matsubara_term handles l >= 1; the l = 0 term is analytic");
  return term_for(stack, resolve(stack, model), l, quantity, settings);
}

double zero_term(const LayerStack& stack, Model model, Quantity quantity) {
  if (model == Model::drude)
    return quantity == Quantity::free_energy ? drude_zero_free_energy(stack) : drude_zero_pressure(stack);
  return quantity == Quantity::free_energy ? plasma_zero_free_energy(stack) : plasma_zero_pressure(stack);
}

SpectralResult evaluate(const LayerStack& stack, Model model, Quantity quantity, const MatsubaraSettings& settings) {
  stack.validate();
  settings.validate();
  const Resolved materials = resolve(stack, model);

  SpectralResult res;
  res.model = model;
  res.quantity = quantity;
  res.thickness_nm = stack.thickness_nm;
  res.zero_term = zero_term(stack, model, quantity) + 0.0;  // no signed zeros in reports

  // Tail bound: once successive terms shrink geometrically with ratio rho,
  // the remainder after term l is at most |t_l| rho / (1 - rho). It is
  // compared against the sum of magnitudes, which stays finite where the
  // signed sum passes through zero.
  // A reflection coefficient passing near zero makes single terms dip by
  // orders of magnitude. The tail is therefore taken from an envelope that
  // decays no faster than the asymptotic ratio exp(-2 a xi_1 / hbar c) of the
  // exp(-v_min) factor, and the streak restarts on every sign change.
  const double rho_floor =
      std::exp(-2.0 * stack.thickness_nm * units::matsubara_energy(stack.temperature_k, 1) / units::hbar_c_ev_nm);
  const int limit = settings.fixed_terms > 0 ? settings.fixed_terms : settings.max_terms;
  double magnitude = std::abs(res.zero_term);
  double previous = 0.0, envelope = 0.0;
  int satisfied = 0;
  double estimate = std::numeric_limits<double>::infinity();
  for (int l = 1; l <= limit; ++l) {
    const double t = term_for(stack, materials, l, quantity, settings);
    res.per_l_terms.push_back(t);
    magnitude += std::abs(t);
    envelope = std::max(std::abs(t), envelope * rho_floor);
    res.l_used = l;
    if (settings.fixed_terms > 0 || l < 2) {
      previous = t;
      continue;
    }
    if (envelope == 0.0) {
      estimate = 0.0;
    } else {
      const double rho = previous == 0.0 ? rho_floor : std::max(std::abs(t / previous), rho_floor);
      estimate = rho < 1.0 ? envelope * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    }
    const bool sign_change = (t < 0.0) != (previous < 0.0) && t != 0.0 && previous != 0.0;
    previous = t;
    const double relative = magnitude > 0.0 ? estimate / magnitude : 0.0;
    res.tail_estimate = relative;
    satisfied = relative <= settings.term_tail_rel_tol && !sign_change ? satisfied + 1 : 0;
    if (satisfied >= 2) break;
    if (l == limit)
      throw ConvergenceError("Matsubara sum not converged after " + std::to_string(limit) +
                                 " terms (tail ratio " + std::to_string(relative) + ")",
                             l, relative);
  }

  res.total = res.zero_term;
  for (double t : res.per_l_terms) res.total += t;
  return res;
}

SpectralResult free_energy(const LayerStack& stack, Model model, const MatsubaraSettings& settings) {
  return evaluate(stack, model, Quantity::free_energy, settings);
}

SpectralResult pressure(const LayerStack& stack, Model model, const MatsubaraSettings& settings) {
  return evaluate(stack, model, Quantity::pressure, settings);
}

}  // namespace casimir
