#pragma once

#include "casimir/materials.hpp"
#include "casimir/stack.hpp"

namespace casimir {

/// Li_3(x) for |x| <= 1. Throws DomainError otherwise.
double polylog3(double x);

/// Zero-frequency description of one medium. Metals keep the parameter
/// that controls their xi -> 0 behaviour under the selected model.
struct ZeroFreqMedium {
  bool metal = false;
  double static_permittivity = 1.0;  // dielectrics only
  double drude_weight = 0.0;         // wp^2 / gamma in eV (Drude metals)
  double plasma_frequency = 0.0;     // eV (plasma metals)
  double mu = 1.0;
};

/// Throws DomainError when the Drude model is requested for a metal
/// without a relaxation parameter.
ZeroFreqMedium zero_frequency_medium(const MaterialResponse& m, Model model);

/// l = 0 reflection coefficients of the film against plate3 ("23") and
/// plate1 ("21"). Drude coefficients are constants; plasma coefficients
/// depend on v = 2 a k_2 through t = v - v_min.
class ZeroFreqCoefficients {
 public:
  ZeroFreqCoefficients(const LayerStack& stack, Model model);

  Model model() const { return model_; }
  /// Lower limit of v, sqrt(mu_2) * 2 a wp_2 / (hbar c); zero for Drude and dielectric films.
  double v_min() const { return v_min_; }

  double tm_23(double t = 0.0) const { return tm(film_, plate3_, t); }
  double tm_21(double t = 0.0) const { return tm(film_, plate1_, t); }
  double te_23(double t = 0.0) const { return te(film_, plate3_, t); }
  double te_21(double t = 0.0) const { return te(film_, plate1_, t); }

 private:
  // Medium in reduced plasma units: w2 = mu * (2 a wp / hbar c)^2.
  struct Side {
    ZeroFreqMedium medium;
    double omega_tilde2 = 0.0;
  };
  double kappa(const Side& s, double t) const;
  double tm(const Side& film, const Side& other, double t) const;
  double te(const Side& film, const Side& other, double t) const;

  Model model_;
  double v_min_ = 0.0;
  Side plate1_, film_, plate3_;
};

ZeroFreqCoefficients zero_coeffs(const LayerStack& stack, Model model);

/// -(kT / 16 pi a^2) [Li3(r_tm23 r_tm21) + Li3(r_te23 r_te21)], eV/nm^2.
double drude_zero_free_energy(const LayerStack& stack);
/// -(kT / 8 pi a^3) times the same bracket, eV/nm^3.
double drude_zero_pressure(const LayerStack& stack);

/// (kT / 16 pi a^2) int_{v_min} v sum ln(1 - R_23 R_21 e^-v) dv.
double plasma_zero_free_energy(const LayerStack& stack);
/// -(kT / 16 pi a^3) int_{v_min} v^2 sum R e^-v / (1 - R e^-v) dv.
double plasma_zero_pressure(const LayerStack& stack);

/// l = 0 free energy with the film replaced by an ideal metal. Under the
/// Drude model every TM coefficient of the film becomes -1; under the plasma
/// model the term vanishes.
double ideal_metal_limit(const LayerStack& stack, Model model);

}  // namespace casimir
