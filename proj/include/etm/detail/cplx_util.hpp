#ifndef ETM_DETAIL_CPLX_UTIL_HPP
#define ETM_DETAIL_CPLX_UTIL_HPP

#include <cmath>
#include <complex>

namespace etm::detail {

// (1 - exp(-w))/w, series-protected near w = 0.
inline std::complex<double> one_minus_exp_over(std::complex<double> w) {
  if (std::abs(w) < 1e-4)
    return 1.0 - w / 2.0 + w * w / 6.0 - w * w * w / 24.0;
  return (1.0 - std::exp(-w)) / w;
}

}  // namespace etm::detail

#endif
