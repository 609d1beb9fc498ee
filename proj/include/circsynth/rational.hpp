#pragma once

#include <vector>

#include "circsynth/polynomial.hpp"
#include "circsynth/types.hpp"

namespace circsynth {

constexpr double kTolCancel = 1e-7;

struct Cancellation {
  cplx zero;
  cplx pole;
};

// Impedance G(s) = num(s) / den(s) = gain * prod(s - z) / prod(s - p).
struct RationalFunction {
  Poly num;
  Poly den;
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double gain = 0.0;
  std::vector<Cancellation> cancelled;
  // Evaluate from the coefficients (true) or from the factored form.
  bool coefficient_primary = false;

  // Pairs closer than tol * max(1, |p|) are cancelled and recorded.
  static RationalFunction from_zpk(std::vector<cplx> zeros, std::vector<cplx> poles, double gain,
                                   double tol_cancel = kTolCancel);
  static RationalFunction from_coefficients(const Poly& num, const Poly& den, double tol_cancel = kTolCancel);
  static RationalFunction constant(double k);

  cplx operator()(cplx s) const;
  int num_degree() const { return static_cast<int>(zeros.size()); }
  int den_degree() const { return static_cast<int>(poles.size()); }
  bool is_zero() const { return gain == 0.0; }
  bool proper() const { return is_zero() || num_degree() <= den_degree(); }
  // lim_{s->inf} G(s); +-inf when improper.
  double value_at_infinity() const;
};

}  // namespace circsynth
