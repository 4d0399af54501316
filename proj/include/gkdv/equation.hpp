#pragma once

#include "gkdv/errors.hpp"

#include <cmath>

namespace gkdv {

/// u_t + u_xxx = mu (|u|^{p-1} u)_x.  mu = +1 defocusing, -1 focusing, 0 linear (Airy).
struct EquationParams {
  double p = 3.0;
  double mu = 1.0;

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent p must exceed 1");
    if (!std::isfinite(mu)) throw DomainError("mu must be finite");
  }
};

}  // namespace gkdv
