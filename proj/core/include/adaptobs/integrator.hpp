#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adaptobs {

/// Non-finite value in a propagated state. Carries the simulation time.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time);
  double time() const { return time_; }

 private:
  double time_;
};

/// Scratch buffers for rk4_step so the hot loop never allocates.
struct Rk4Workspace {
  std::vector<double> k1, k2, k3, k4, tmp;
  void resize(std::size_t n);
};

/// One classic fixed-step RK4 step of x' = f(x) in place. Inputs that vary
/// within the step (u, y) are frozen by the caller: zero-order hold.
template <class Deriv>
void rk4_step(std::span<double> x, double dt, Deriv&& f, Rk4Workspace& ws) {
  const std::size_t n = x.size();
  ws.resize(n);
  f(std::span<const double>(x), std::span<double>(ws.k1));
  for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = x[i] + 0.5 * dt * ws.k1[i];
  f(std::span<const double>(ws.tmp), std::span<double>(ws.k2));
  for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = x[i] + 0.5 * dt * ws.k2[i];
  f(std::span<const double>(ws.tmp), std::span<double>(ws.k3));
  for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = x[i] + dt * ws.k3[i];
  f(std::span<const double>(ws.tmp), std::span<double>(ws.k4));
  for (std::size_t i = 0; i < n; ++i)
    x[i] += dt / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

/// Throws DivergenceError naming `what` and `time` if any entry is NaN/Inf.
void check_finite(std::span<const double> x, const char* what, double time);

}  // namespace adaptobs
