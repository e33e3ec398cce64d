#include <cmath>

#include "casimir/analytic_limits.hpp"
#include "casimir/errors.hpp"
#include "casimir/units.hpp"

namespace casimir {

double polylog3(double x) {
  if (!(std::abs(x) <= 1.0)) throw DomainError("polylog3 requires |x| <= 1");
  if (x == 1.0) return units::zeta3;
  if (x == -1.0) return -0.75 * units::zeta3;
  double sum = 0.0;
  double power = x;
  for (long n = 1; n < 20'000'000; ++n) {
    const double dn = static_cast<double>(n);
    const double term = power / (dn * dn * dn);
    sum += term;
    if (std::abs(term) < 1e-17) break;
    power *= x;
  }
  return sum;
}

}  // namespace casimir
