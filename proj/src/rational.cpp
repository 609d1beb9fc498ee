#include "circsynth/rational.hpp"

#include <cmath>
#include <limits>

#include "circsynth/errors.hpp"

namespace circsynth {

namespace {

void cancel_pairs(std::vector<cplx>& zeros, std::vector<cplx>& poles, double tol, std::vector<Cancellation>& log) {
  bool again = true;
  while (again) {
    again = false;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bz = 0, bp = 0;
    for (std::size_t i = 0; i < zeros.size(); ++i)
      for (std::size_t j = 0; j < poles.size(); ++j) {
        const double d = std::abs(zeros[i] - poles[j]) / std::max(1.0, std::abs(poles[j]));
        if (d < best) {
          best = d;
          bz = i;
          bp = j;
        }
      }
    if (best <= tol) {
      log.push_back({zeros[bz], poles[bp]});
      zeros.erase(zeros.begin() + static_cast<long>(bz));
      poles.erase(poles.begin() + static_cast<long>(bp));
      again = true;
    }
  }
}

}  // namespace

RationalFunction RationalFunction::from_zpk(std::vector<cplx> zeros, std::vector<cplx> poles, double gain,
                                            double tol_cancel) {
  RationalFunction g;
  if (!std::isfinite(gain)) throw NumericsError("bad-rational", "non-finite gain");
  if (gain == 0.0) zeros.clear();
  cancel_pairs(zeros, poles, tol_cancel, g.cancelled);
  g.zeros = std::move(zeros);
  g.poles = std::move(poles);
  g.gain = gain;
  g.num = gain == 0.0 ? Poly{} : poly_from_roots(g.zeros, gain);
  g.den = poly_from_roots(g.poles, 1.0);
  g.coefficient_primary = false;
  return g;
}

RationalFunction RationalFunction::from_coefficients(const Poly& num_in, const Poly& den_in, double tol_cancel) {
  const Poly num = poly_trim(num_in), den = poly_trim(den_in);
  if (degree(den) < 0) throw NumericsError("bad-rational", "zero denominator");
  if (degree(num) < 0) return from_zpk({}, poly_roots(den), 0.0, tol_cancel);
  const double gain = num.back() / den.back();
  RationalFunction g = from_zpk(poly_roots(num), poly_roots(den), gain, tol_cancel);
  if (g.cancelled.empty()) {
    g.num = num;
    g.den = den;
    g.coefficient_primary = true;
  }
  return g;
}

RationalFunction RationalFunction::constant(double k) { return from_zpk({}, {}, k); }

cplx RationalFunction::operator()(cplx s) const {
  if (coefficient_primary) return poly_eval(num, s) / poly_eval(den, s);
  cplx v = gain;
  for (const cplx& z : zeros) v *= (s - z);
  for (const cplx& p : poles) v /= (s - p);
  return v;
}

double RationalFunction::value_at_infinity() const {
  if (is_zero() || num_degree() < den_degree()) return 0.0;
  if (num_degree() == den_degree()) return gain;
  return gain > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace circsynth
