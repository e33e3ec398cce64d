#include "casimir/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "casimir/analytic_limits.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

std::string format_nm(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g nm", a);
  return buf;
}

}  // namespace

std::vector<double> thickness_grid(double lo, double hi, int points, bool logarithmic) {
  if (points < 1) throw DomainError("scan needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("scan range must satisfy 0 < min <= max");
  if (points == 1) return {lo};
  if (hi == lo) throw DomainError("scan range is empty");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    out[i] = logarithmic ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  out.back() = hi;
  return out;
}

std::vector<ScanRecord> thickness_scan(const LayerStack& stack, const std::vector<double>& a_values,
                                       const std::vector<Model>& models, const std::vector<Quantity>& quantities,
                                       const MatsubaraSettings& settings) {
  if (a_values.empty()) throw DomainError("scan has no thickness values");
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    if (!(a_values[i] >= 1.0)) throw DomainError("scan thicknesses must be >= 1 nm");
    if (i > 0 && !(a_values[i] > a_values[i - 1])) throw DomainError("scan thicknesses must be strictly increasing");
  }
  std::vector<ScanRecord> out;
  out.reserve(a_values.size());
  for (double a : a_values) {
    const LayerStack s = stack.with_thickness(a);
    ScanRecord rec;
    rec.thickness_nm = a;
    try {
      for (Quantity q : quantities) {
        for (Model m : models) {
          const SpectralResult r = evaluate(s, m, q, settings);
          const bool fe = q == Quantity::free_energy;
          auto& total = m == Model::drude ? (fe ? rec.F_drude : rec.P_drude) : (fe ? rec.F_plasma : rec.P_plasma);
          auto& zero = m == Model::drude ? (fe ? rec.F0_drude : rec.P0_drude) : (fe ? rec.F0_plasma : rec.P0_plasma);
          total = r.total;
          zero = r.zero_term;
          rec.l_used_max = std::max(rec.l_used_max.value_or(0), r.l_used);
        }
      }
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at a = " + format_nm(a), e.matsubara_index(), e.achieved());
    }
    try {
      rec.F_classical = drude_zero_free_energy(s);
      rec.P_classical = drude_zero_pressure(s);
    } catch (const DomainError&) {
      // no relaxation parameter: no Drude closed form
    }
    if (rec.F_drude && rec.F0_drude && *rec.F_drude != 0.0) rec.zero_term_fraction_drude = *rec.F0_drude / *rec.F_drude;
    out.push_back(rec);
  }
  return out;
}

CrossingReport find_sign_change(const LayerStack& stack, Model model, Quantity quantity,
                                std::pair<double, double> bracket, double tol, const MatsubaraSettings& settings) {
  auto [lo, hi] = bracket;
  if (lo > hi) std::swap(lo, hi);
  if (!(tol > 0.0)) throw DomainError("crossing tolerance must be positive");
  auto value = [&](double a) { return evaluate(stack.with_thickness(a), model, quantity, settings).total; };
  double f_lo = value(lo);
  const double f_hi = value(hi);
  if (sign(f_lo) == sign(f_hi) && sign(f_lo) != 0)
    throw NoCrossing(std::string(to_string(quantity)) + " (" + std::string(to_string(model)) +
                     ") has the same sign at " + format_nm(lo) + " and " + format_nm(hi));

  CrossingReport rep;
  rep.quantity = quantity;
  rep.model = model;
  rep.bracket = {lo, hi};
  if (f_lo == 0.0) {
    rep.root = lo;
    return rep;
  }
  if (f_hi == 0.0) {
    rep.root = hi;
    return rep;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = value(mid);
    ++rep.iterations;
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if (sign(f_mid) == sign(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  rep.bracket = {lo, hi};
  rep.root = 0.5 * (lo + hi);
  rep.residual = value(rep.root);
  return rep;
}

CrossingReport first_sign_change(const LayerStack& stack, Model model, Quantity quantity,
                                 const std::vector<double>& grid, double tol, const MatsubaraSettings& settings) {
  if (grid.size() < 2) throw DomainError("crossing search needs at least two thicknesses");
  double prev = evaluate(stack.with_thickness(grid[0]), model, quantity, settings).total;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = evaluate(stack.with_thickness(grid[i]), model, quantity, settings).total;
    if (sign(cur) != sign(prev) || cur == 0.0)
      return find_sign_change(stack, model, quantity, {grid[i - 1], grid[i]}, tol, settings);
    prev = cur;
  }
  throw NoCrossing(std::string(to_string(quantity)) + " (" + std::string(to_string(model)) +
                   ") keeps one sign between " + format_nm(grid.front()) + " and " + format_nm(grid.back()));
}

double classical_limit_deviation(const LayerStack& stack, Model model, double a, const MatsubaraSettings& settings) {
  const LayerStack s = stack.with_thickness(a);
  const double classical = drude_zero_free_energy(s);
  const double full = free_energy(s, model, settings).total;
  if (model == Model::drude) return std::abs(full - classical) / std::abs(classical);
  return std::abs(full) / std::abs(classical);
}

RatioReport model_ratio(const LayerStack& stack, double a, Quantity quantity, const MatsubaraSettings& settings) {
  const LayerStack s = stack.with_thickness(a);
  RatioReport r;
  r.drude = evaluate(s, Model::drude, quantity, settings).total;
  r.plasma = evaluate(s, Model::plasma, quantity, settings).total;
  r.sign_drude = sign(r.drude);
  r.sign_plasma = sign(r.plasma);
  if (r.plasma == 0.0) {
    r.infinite = true;
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = std::abs(r.drude) / std::abs(r.plasma);
  }
  return r;
}

double nonzero_terms_contribution(const LayerStack& stack, Model model, double a, const MatsubaraSettings& settings) {
  const SpectralResult r = free_energy(stack.with_thickness(a), model, settings);
  return r.total - r.zero_term;
}

}  // namespace casimir
