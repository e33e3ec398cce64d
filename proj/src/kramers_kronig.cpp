#include <algorithm>
#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/materials.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/units.hpp"

namespace casimir {

namespace {

// eps'' between table rows: log-log interpolation where both ends absorb,
// linear otherwise.
double interpolate_eps_imag(std::span<const OpticalSample> rows, double w) {
  auto it = std::lower_bound(rows.begin(), rows.end(), w,
                             [](const OpticalSample& r, double e) { return r.energy_ev < e; });
  if (it == rows.begin()) return it->eps_imag();
  if (it == rows.end()) return rows.back().eps_imag();
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double y0 = lo.eps_imag(), y1 = hi.eps_imag();
  if (y0 > 0.0 && y1 > 0.0) {
    const double t = std::log(w / lo.energy_ev) / std::log(hi.energy_ev / lo.energy_ev);
    return std::exp(std::log(y0) + t * std::log(y1 / y0));
  }
  const double t = (w - lo.energy_ev) / (hi.energy_ev - lo.energy_ev);
  return y0 + t * (y1 - y0);
}

// (2/pi) int_0^m wp^2 g / ((w^2 + g^2)(w^2 + xi^2)) dw
double drude_low_tail(const DrudeParams& d, double m, double xi) {
  const double g = d.relaxation;
  const double wp2 = d.plasma_frequency * d.plasma_frequency;
  const double diff = xi * xi - g * g;
  if (std::abs(diff) > 1e-3 * std::max(xi * xi, g * g)) {
    return 2.0 / units::pi * wp2 * g / diff * (std::atan(m / g) / g - std::atan(m / xi) / xi);
  }
  auto f = [&](double w) { return wp2 * g / ((w * w + g * g) * (w * w + xi * xi)); };
  const double breaks[] = {0.0, std::min(m, g), std::min(m, 10.0 * g), m};
  return 2.0 / units::pi * quad::integrate(f, std::span<const double>(breaks), {1e-13, 0.0, 4000}).value;
}

}  // namespace

KramersKronigTransform::KramersKronigTransform(const OpticalDataTable& table, KramersKronigTail tail,
                                               std::optional<double> match_energy, int points_per_decade)
    : tail_(std::move(tail)) {
  if (table.empty()) throw ConfigError("optical data table is empty");
  const auto rows = table.rows();
  match_ = match_energy.value_or(table.min_energy());
  top_ = table.max_energy();
  if (!(match_ >= table.min_energy() && match_ < top_))
    throw DomainError("matching energy must lie inside the tabulated range");
  top_eps_imag_ = rows.back().eps_imag();

  std::vector<double> nodes;
  for (const auto& r : rows)
    if (r.energy_ev > match_) nodes.push_back(r.energy_ev);
  nodes.push_back(match_);
  const double decades = std::log10(top_ / match_);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)));
  for (int i = 0; i <= n; ++i) nodes.push_back(match_ * std::pow(10.0, decades * i / n));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
              nodes.end());
  nodes.front() = match_;
  nodes.back() = top_;

  const std::size_t count = nodes.size();
  omega2_.resize(count);
  weighted_.resize(count);
  std::vector<double> u(count);
  for (std::size_t i = 0; i < count; ++i) u[i] = std::log(nodes[i]);
  for (std::size_t i = 0; i < count; ++i) {
    const double left = i > 0 ? u[i] - u[i - 1] : 0.0;
    const double right = i + 1 < count ? u[i + 1] - u[i] : 0.0;
    const double w = nodes[i];
    omega2_[i] = w * w;
    weighted_[i] = 0.5 * (left + right) * w * w * interpolate_eps_imag(rows, w);
  }
}

double KramersKronigTransform::table_part(double xi) const {
  const double xi2 = xi * xi;
  double s = 0.0;
  for (std::size_t i = 0; i < omega2_.size(); ++i) s += weighted_[i] / (omega2_[i] + xi2);
  return 2.0 / units::pi * s;
}

double KramersKronigTransform::low_tail_part(double xi) const {
  if (const auto* d = std::get_if<DrudeParams>(&tail_)) return drude_low_tail(*d, match_, xi);
  if (const auto* p = std::get_if<PlasmaParams>(&tail_))
    return p->plasma_frequency * p->plasma_frequency / (xi * xi);
  return 0.0;
}

double KramersKronigTransform::high_tail_part(double xi) const {
  if (top_eps_imag_ == 0.0) return 0.0;
  // eps'' = C w^-3 above the table: (2/pi) C int_M^inf dw / (w^2 (w^2 + xi^2))
  const double m = top_;
  const double c = top_eps_imag_ * m * m * m;
  const double x = xi / m;
  double integral;
  if (x < 1e-3) {
    const double x2 = x * x;
    integral = (1.0 / 3.0 - x2 / 5.0 + x2 * x2 / 7.0) / (m * m * m);
  } else {
    integral = (1.0 / m - std::atan(x) / xi) / (xi * xi);
  }
  return 2.0 / units::pi * c * integral;
}

double KramersKronigTransform::operator()(double xi) const {
  if (!(xi > 0.0)) throw DomainError("Kramers-Kronig evaluation requires xi > 0");
  return 1.0 + table_part(xi) + low_tail_part(xi) + high_tail_part(xi);
}

double kramers_kronig(const OpticalDataTable& table, const KramersKronigTail& tail, double xi) {
  if (!(xi > 0.0)) throw DomainError("Kramers-Kronig evaluation requires xi > 0");
  return KramersKronigTransform(table, tail)(xi);
}

}  // namespace casimir
