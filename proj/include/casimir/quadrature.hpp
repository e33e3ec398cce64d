#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

// Globally adaptive Gauss-Kronrod (7/15) integration on finite panels.
// The panel with the largest error estimate is bisected until the summed
// estimate meets max(abs_tol, rel_tol * |integral|).

namespace casimir::quad {

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-30;
  int max_panels = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr double kronrod_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

// QUADPACK qk15 error heuristic.
template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  double abs_sum = std::abs(kronrod);
  double f1[7], f2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kronrod_weights[j] * pair;
    abs_sum += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kronrod_weights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double value = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * abs_sum);
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], starting from the
/// panels delimited by consecutive breakpoints.
template <class F>
Result integrate(F&& f, std::span<const double> breaks, const Options& opt = {}) {
  std::vector<detail::Panel> panels;
  panels.reserve(breaks.size() + 64);
  auto by_error = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };

  Result res;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    panels.push_back(detail::gauss_kronrod_15(f, breaks[i], breaks[i + 1]));
    res.evaluations += 15;
  }
  std::make_heap(panels.begin(), panels.end(), by_error);

  auto totals = [&] {
    double v = 0.0, e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();
  while (!panels.empty() && error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (static_cast<int>(panels.size()) >= opt.max_panels) {
      res.converged = false;
      break;
    }
    std::pop_heap(panels.begin(), panels.end(), by_error);
    const detail::Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // panel cannot be split further
      res.converged = false;
      panels.push_back(worst);
      std::push_heap(panels.begin(), panels.end(), by_error);
      break;
    }
    panels.push_back(detail::gauss_kronrod_15(f, worst.a, mid));
    std::push_heap(panels.begin(), panels.end(), by_error);
    panels.push_back(detail::gauss_kronrod_15(f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end(), by_error);
    res.evaluations += 30;
    std::tie(value, error) = totals();
  }

  // Position-ordered reduction keeps the result independent of refinement history.
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  std::tie(res.value, res.error) = totals();
  return res;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  const double breaks[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(breaks), opt);
}

}  // namespace casimir::quad
