#pragma once

#include <string_view>
#include <vector>

#include "casimir/materials.hpp"
#include "casimir/stack.hpp"

namespace casimir {

enum class Quantity { free_energy, pressure };

std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view s);

struct MatsubaraSettings {
  double term_tail_rel_tol = 1e-8;
  double quad_rel_tol = 1e-9;
  double quad_abs_floor = 1e-30;
  int max_terms = 5000;
  /// When positive, sum exactly this many l >= 1 terms and skip the tail test.
  int fixed_terms = 0;

  /// Throws DomainError for tolerances outside (0, 1) or max_terms < 1.
  void validate() const;
};

/// Free energy in eV/nm^2 or pressure in eV/nm^3, split into the l = 0 term
/// and the l >= 1 terms. `total` is accumulated as zero_term followed by the
/// per-l terms in order.
struct SpectralResult {
  Model model = Model::drude;
  Quantity quantity = Quantity::free_energy;
  double thickness_nm = 0.0;
  double zero_term = 0.0;
  std::vector<double> per_l_terms;
  double total = 0.0;
  int l_used = 0;
  /// Achieved tail estimate relative to the sum scale.
  double tail_estimate = 0.0;

  double nonzero_terms() const;
  /// J/m^2 for free energy, Pa for pressure.
  double total_si() const;
  /// a^2 F or a^3 P in micro-eV.
  double scaled_micro_ev() const;
};

enum class Polarization { tm, te };

struct MediumSide {
  double eps;
  double mu;
  double kz;  // nm^-1
};

/// sqrt(k_perp^2 + mu eps xi^2 / (hbar c)^2), nm^-1.
double radial_wavenumber(double k_perp, double eps, double mu, double xi);

/// Reflection coefficient r^(2,n) of the film (medium 2) against medium n.
/// Returns 0 when numerator and denominator both vanish.
double reflection(Polarization pol, const MediumSide& film_side, const MediumSide& other_side);

/// Contribution of Matsubara index l >= 1 with eps evaluated for `model`.
double matsubara_term(const LayerStack& stack, Model model, int l, Quantity quantity,
                      const MatsubaraSettings& settings = {});

/// l = 0 term of `model`, delegated to the analytic limits.
double zero_term(const LayerStack& stack, Model model, Quantity quantity);

SpectralResult free_energy(const LayerStack& stack, Model model, const MatsubaraSettings& settings = {});
SpectralResult pressure(const LayerStack& stack, Model model, const MatsubaraSettings& settings = {});
SpectralResult evaluate(const LayerStack& stack, Model model, Quantity quantity,
                        const MatsubaraSettings& settings = {});

}  // namespace casimir
