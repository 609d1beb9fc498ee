#pragma once

#include "circsynth/linearize.hpp"
#include "circsynth/types.hpp"

namespace circsynth {

// G(s) = C (sI - A)^-1 B + D evaluated through a Hessenberg reduction, so each
// point costs O(n^2). Points are independent; the OpenMP kernel and the serial
// reference therefore produce identical values.
class FrequencyResponse {
 public:
  explicit FrequencyResponse(const LTISystem& sys);
  cplx at(cplx s) const;
  CVec serial(const Vec& omega) const;
  CVec parallel(const Vec& omega) const;

 private:
  Mat H_;
  Vec b_;
  RowVec c_;
  double d_ = 0.0;
};

CVec freq_response_serial(const LTISystem& sys, const Vec& omega);
CVec freq_response(const LTISystem& sys, const Vec& omega);

struct HinfEstimate {
  double value = 0.0;
  double omega = 0.0;
};

// Sampled sup_w |G(jw)| on a log grid, refined around the largest local
// maxima by golden-section search in log w; the limits w -> 0 and w -> inf
// are included when finite.
HinfEstimate hinf_sampled(const LTISystem& sys, const Vec& grid, bool parallel = true);

// Realization of a - b.
LTISystem difference(const LTISystem& a, const LTISystem& b);

}  // namespace circsynth
