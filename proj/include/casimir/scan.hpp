#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "casimir/lifshitz.hpp"

namespace casimir {

struct ScanRecord {
  double thickness_nm = 0.0;
  std::optional<double> F_drude, F_plasma, P_drude, P_plasma;
  /// l = 0 terms of the evaluated models.
  std::optional<double> F0_drude, F0_plasma, P0_drude, P0_plasma;
  /// Drude l = 0 closed forms; absent when a material lacks a relaxation parameter.
  std::optional<double> F_classical, P_classical;
  std::optional<double> zero_term_fraction_drude;
  std::optional<int> l_used_max;
};

/// One record per thickness. `a_values` must be strictly increasing and >= 1 nm.
/// Convergence failures are rethrown with the thickness in the message.
std::vector<ScanRecord> thickness_scan(const LayerStack& stack, const std::vector<double>& a_values,
                                       const std::vector<Model>& models, const std::vector<Quantity>& quantities,
                                       const MatsubaraSettings& settings = {});

/// n points from lo to hi, log or linear spaced.
std::vector<double> thickness_grid(double lo, double hi, int points, bool logarithmic = true);

struct CrossingReport {
  Quantity quantity = Quantity::free_energy;
  Model model = Model::drude;
  std::pair<double, double> bracket;  // final bisection interval
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Bisection to a bracket width <= tol. Throws NoCrossing when the values at
/// the bracket ends have the same sign.
CrossingReport find_sign_change(const LayerStack& stack, Model model, Quantity quantity,
                                std::pair<double, double> bracket, double tol = 0.01,
                                const MatsubaraSettings& settings = {});

/// Samples `grid` for the first sign change and bisects inside it.
/// Throws NoCrossing when the sampled values never change sign.
CrossingReport first_sign_change(const LayerStack& stack, Model model, Quantity quantity,
                                 const std::vector<double>& grid, double tol = 0.01,
                                 const MatsubaraSettings& settings = {});

/// Drude: |F - F_l0| / |F_l0|. Plasma: |F_plasma| / |F_drude,l0|.
double classical_limit_deviation(const LayerStack& stack, Model model, double a,
                                 const MatsubaraSettings& settings = {});

struct RatioReport {
  double ratio = 0.0;  // |drude| / |plasma|
  double drude = 0.0;
  double plasma = 0.0;
  int sign_drude = 0;
  int sign_plasma = 0;
  bool infinite = false;
};

RatioReport model_ratio(const LayerStack& stack, double a, Quantity quantity, const MatsubaraSettings& settings = {});

/// F_total - F_l0 (eV/nm^2).
double nonzero_terms_contribution(const LayerStack& stack, Model model, double a,
                                  const MatsubaraSettings& settings = {});

}  // namespace casimir
