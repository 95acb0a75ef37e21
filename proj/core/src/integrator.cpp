#include "adaptobs/integrator.hpp"

#include <cmath>
#include <sstream>

namespace adaptobs {

namespace {
std::string with_time(const std::string& what, double time) {
  std::ostringstream os;
  os << what << " at t=" << time;
  return os.str();
}
}  // namespace

DivergenceError::DivergenceError(const std::string& what, double time)
    : std::runtime_error(with_time(what, time)), time_(time) {}

void Rk4Workspace::resize(std::size_t n) {
  if (k1.size() == n) return;
  k1.assign(n, 0.0);
  k2.assign(n, 0.0);
  k3.assign(n, 0.0);
  k4.assign(n, 0.0);
  tmp.assign(n, 0.0);
}

void check_finite(std::span<const double> x, const char* what, double time) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DivergenceError(std::string("non-finite ") + what, time);
  }
}

}  // namespace adaptobs
