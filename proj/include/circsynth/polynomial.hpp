#pragma once

#include <vector>

#include "circsynth/types.hpp"

namespace circsynth {

// Real polynomial, ascending coefficients: p(s) = c[0] + c[1] s + ...
using Poly = std::vector<double>;

int degree(const Poly& p);  // -1 for the zero polynomial
Poly poly_trim(Poly p);     // drops exact-zero leading coefficients
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double k);
cplx poly_eval(const Poly& p, cplx s);
// Monic product of (s - r) times gain; conjugate pairs give real coefficients.
Poly poly_from_roots(const std::vector<cplx>& roots, double gain = 1.0);
// Companion-matrix eigenvalues refined by Newton steps on the polynomial.
std::vector<cplx> poly_roots(const Poly& p);

}  // namespace circsynth
