#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace casimir {

enum class Model { drude, plasma };

std::string_view to_string(Model m);
Model parse_model(std::string_view s);

/// Free-electron parameters, both in eV.
struct DrudeParams {
  double plasma_frequency;
  double relaxation;
};

struct PlasmaParams {
  double plasma_frequency;
};

/// Lorentz oscillators on the imaginary axis:
///   eps(i xi) = 1 + sum_j C_j w_j^2 / (w_j^2 + xi^2).
/// Frequencies are angular frequencies in rad/s.
struct OscillatorParams {
  std::vector<double> strengths;
  std::vector<double> frequencies;
};

struct OpticalSample {
  double energy_ev;
  double n;
  double k;
  double eps_imag() const { return 2.0 * n * k; }
};

/// Complex refractive index versus photon energy, strictly increasing in energy.
class OpticalDataTable {
 public:
  OpticalDataTable() = default;
  /// Throws ConfigError if empty, non-monotone or with negative n, k.
  explicit OpticalDataTable(std::vector<OpticalSample> rows);

  std::span<const OpticalSample> rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  double min_energy() const { return rows_.front().energy_ev; }
  double max_energy() const { return rows_.back().energy_ev; }

 private:
  std::vector<OpticalSample> rows_;
};

/// Parses `energy_ev,n,k` CSV text. Errors carry the offending line number.
OpticalDataTable parse_optical_csv(std::string_view text);
OpticalDataTable load_optical_csv(const std::string& path);

/// Analytic continuation of the absorptive part below and above the table.
using KramersKronigTail = std::variant<std::monostate, DrudeParams, PlasmaParams>;

/// Precomputed Kramers-Kronig transform of a table:
///   eps(i xi) = 1 + (2/pi) int_0^inf w eps''(w) / (w^2 + xi^2) dw.
/// Table data is used above `match_energy` (defaults to the table minimum);
/// below it the tail model supplies eps''. Above the table maximum eps'' is
/// continued as w^-3 from the last point.
class KramersKronigTransform {
 public:
  KramersKronigTransform(const OpticalDataTable& table, KramersKronigTail tail,
                         std::optional<double> match_energy = std::nullopt, int points_per_decade = 2000);

  double operator()(double xi) const;

  /// The three additive pieces of eps(i xi) - 1, exposed for diagnostics.
  double table_part(double xi) const;
  double low_tail_part(double xi) const;
  double high_tail_part(double xi) const;

  double match_energy() const { return match_; }

 private:
  KramersKronigTail tail_;
  double match_;
  double top_;
  double top_eps_imag_;
  std::vector<double> omega2_;    // node w^2
  std::vector<double> weighted_;  // trapezoid weight * w^2 eps''(w), integration in ln w
};

/// Convenience wrapper building a transform for a single evaluation.
double kramers_kronig(const OpticalDataTable& table, const KramersKronigTail& tail, double xi);

enum class PermittivityKind {
  drude,
  plasma,
  oscillator,
  tabulated_with_drude_tail,
  tabulated_with_plasma_tail,
  vacuum
};

std::string_view to_string(PermittivityKind k);
PermittivityKind parse_permittivity_kind(std::string_view s);

/// Dielectric and magnetic response of one medium. Immutable once built;
/// copies share the precomputed Kramers-Kronig grid.
class MaterialResponse {
 public:
  static MaterialResponse vacuum();
  static MaterialResponse drude(std::string name, DrudeParams p, double static_permeability = 1.0);
  static MaterialResponse plasma(std::string name, PlasmaParams p, double static_permeability = 1.0);
  static MaterialResponse oscillator(std::string name, OscillatorParams p);
  /// Tabulated data with Drude (or plasma) continuation to zero frequency.
  /// `tail` must be DrudeParams or PlasmaParams.
  static MaterialResponse tabulated(std::string name, OpticalDataTable table, KramersKronigTail tail,
                                    Model extrapolation, double static_permeability = 1.0,
                                    std::optional<double> match_energy = std::nullopt);

  const std::string& name() const { return name_; }
  PermittivityKind kind() const { return kind_; }
  double static_permeability() const { return mu0_; }
  std::optional<double> plasma_frequency() const { return plasma_frequency_; }
  std::optional<double> relaxation() const { return relaxation_; }
  const OscillatorParams& oscillators() const { return oscillators_; }
  const OpticalDataTable* table() const { return table_.get(); }
  bool is_metal() const;
  bool approximate() const { return approximate_; }

  MaterialResponse& mark_approximate(bool flag = true) {
    approximate_ = flag;
    return *this;
  }

  /// The same material with its low-frequency behaviour switched to `m`.
  /// Dielectrics are returned unchanged. Throws DomainError when the Drude
  /// model is requested for a material without a relaxation parameter.
  MaterialResponse with_model(Model m) const;

  /// eps(i xi) for xi in eV.
  double permittivity(double xi) const;

 private:
  MaterialResponse() = default;

  std::string name_ = "vacuum";
  PermittivityKind kind_ = PermittivityKind::vacuum;
  std::optional<double> plasma_frequency_;
  std::optional<double> relaxation_;
  OscillatorParams oscillators_;
  std::shared_ptr<const OpticalDataTable> table_;
  std::shared_ptr<const KramersKronigTransform> transform_;
  std::optional<double> match_energy_;
  double mu0_ = 1.0;
  bool approximate_ = false;
};

/// eps(i xi). Throws DomainError for xi < 0 and for xi = 0 with a plasma-type pole.
double permittivity(const MaterialResponse& material, double xi);

/// Static permeability for l = 0, unity for every l >= 1.
double permeability(const MaterialResponse& material, int matsubara_index);

/// eps(i xi_l) for l = 1..l_max at temperature T.
std::vector<double> matsubara_grid(const MaterialResponse& material, double temperature_k, int l_max);

}  // namespace casimir
