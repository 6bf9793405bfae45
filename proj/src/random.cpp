#include "maxdet/random.hpp"

#include <cmath>
#include <numbers>

namespace maxdet {

double NormalSampler::operator()(Xoshiro256& rng) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace maxdet
