#include "ballnls/state.hpp"

#include <cmath>

namespace ballnls {

bool RadialState::finite() const {
  for (const auto& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace ballnls
