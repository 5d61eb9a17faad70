#pragma once

// Finite orbit w^(0..K0) of the payoff dynamics, ending at (1, ..., 1).

#include <cstddef>
#include <span>
#include <vector>

#include "absorbing/dynamics.hpp"

namespace absorbing {

struct OrbitOptions {
  double epsilon = 0.1;
  double delta = 0.4;
  std::size_t k_max = 100000;
  ClassifyOptions classify;
};

struct Orbit {
  std::vector<PayoffVector> w;     // w[K0] = (1, ..., 1)
  std::vector<DynamicsStep> steps; // steps[k] maps w[k+1] to w[k]
  double delta = 0.0;
  double mu_sum = 0.0;
  std::size_t fixed_point_repeats = 0;
  std::size_t k0() const { return steps.size(); }
};

// Iterates u <- f(u) from (1, ..., 1) until the summed mu reaches 1/delta
// and stores the sequence reversed. An exact fixed point is repeated
// without reclassification. Throws InvalidArgument unless
// 0 < delta < -1/ln(epsilon), and OrbitBudgetExceeded past k_max steps.
Orbit build_orbit(const Game& g, const SearchGrid& grid, std::span<const double> v,
                  const OrbitOptions& opt);

// max_k ||w^(k) - f(w^(k+1))||_inf with f re-evaluated from the stored witnesses.
double orbit_residual(const Game& g, const Orbit& orbit, std::span<const double> v,
                      double epsilon, double tol_class);

}  // namespace absorbing
