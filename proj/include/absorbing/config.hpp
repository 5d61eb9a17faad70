#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "json.hpp"

namespace absorbing {

struct RunConfig {
  double epsilon = 0.1;
  std::optional<double> delta;  // default -0.8 / ln(epsilon)
  double mesh = 0.05;
  double tol_class = 1e-6;
  double tol_v = 1e-6;
  double eps_nash = 1e-6;
  std::uint64_t seed = 1;
  std::size_t episodes = 100000;
  std::size_t k_max = 100000;
  std::size_t restarts = 64;

  double delta_value() const;
  // Throws InvalidArgument unless 0 < epsilon < 1 and 0 < delta < -1/ln(epsilon).
  void validate() const;
};

nlohmann::json config_to_json(const RunConfig& c);

// Threads used by Monte Carlo simulation; 0 selects the hardware count.
void set_worker_count(std::size_t n);
std::size_t worker_count();

}  // namespace absorbing
