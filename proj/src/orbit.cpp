#include "absorbing/orbit.hpp"

#include <algorithm>
#include <cmath>

#include "absorbing/errors.hpp"

namespace absorbing {

namespace {

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

Orbit build_orbit(const Game& g, const SearchGrid& grid, std::span<const double> v,
                  const OrbitOptions& opt) {
  if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  if (!(opt.delta > 0.0 && opt.delta < -1.0 / std::log(opt.epsilon))) {
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, -1/ln(epsilon))");
  }
  Orbit orbit;
  orbit.delta = opt.delta;
  const double target = 1.0 / opt.delta;
  PayoffVector u(g.num_players(), 1.0);
  std::vector<PayoffVector> forward{u};
  std::vector<DynamicsStep> steps;
  ClassifyOptions copt = opt.classify;
  copt.epsilon = opt.epsilon;
  while (orbit.mu_sum < target) {
    if (steps.size() >= opt.k_max) {
      throw Error(ErrorCode::OrbitBudgetExceeded,
                  "mu sum " + std::to_string(orbit.mu_sum) + " below 1/delta after " +
                      std::to_string(steps.size()) + " steps");
    }
    if (!steps.empty() && steps.back().f == steps.back().w) {
      steps.push_back(steps.back());
      ++orbit.fixed_point_repeats;
    } else {
      const Classification cls = classify(g, grid, u, copt);
      steps.push_back(step_f(g, cls, opt.epsilon, v, copt.tol_class));
    }
    orbit.mu_sum += steps.back().mu;
    u = steps.back().f;
    forward.push_back(u);
  }
  orbit.w.assign(forward.rbegin(), forward.rend());
  orbit.steps.assign(steps.rbegin(), steps.rend());
  return orbit;
}

double orbit_residual(const Game& g, const Orbit& orbit, std::span<const double> v,
                      double epsilon, double tol_class) {
  double worst = 0.0;
  for (std::size_t k = 0; k < orbit.k0(); ++k) {
    const auto& st = orbit.steps[k];
    worst = std::max(worst, sup_distance(st.w, orbit.w[k + 1]));
    const DynamicsStep again = step_f(g, st.cls, epsilon, v, tol_class);
    worst = std::max(worst, sup_distance(again.f, orbit.w[k]));
  }
  return worst;
}

}  // namespace absorbing
