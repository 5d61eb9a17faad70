#include "absorbing/config.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <string>

#include "absorbing/errors.hpp"

namespace absorbing {

double RunConfig::delta_value() const {
  return delta ? *delta : -0.8 / std::log(epsilon);
}

void RunConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  const double d = delta_value();
  const double cap = -1.0 / std::log(epsilon);
  if (!(d > 0.0 && d < cap)) {
    throw Error(ErrorCode::InvalidArgument,
                "delta must lie in (0, " + std::to_string(cap) + ") for this epsilon");
  }
  if (!(mesh > 0.0 && mesh <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mesh must lie in (0, 1]");
  if (!(tol_class > 0.0) || !(tol_v > 0.0) || !(eps_nash > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
  if (k_max == 0 || restarts == 0) {
    throw Error(ErrorCode::InvalidArgument, "k_max and restarts must be positive");
  }
}

nlohmann::json config_to_json(const RunConfig& c) {
  return {{"epsilon", c.epsilon},     {"delta", c.delta_value()}, {"mesh", c.mesh},
          {"tol_class", c.tol_class}, {"tol_v", c.tol_v},         {"eps_nash", c.eps_nash},
          {"seed", c.seed},           {"episodes", c.episodes},   {"k_max", c.k_max},
          {"restarts", c.restarts}};
}

namespace {
std::atomic<std::size_t> g_workers{0};
}

void set_worker_count(std::size_t n) { g_workers = n; }

std::size_t worker_count() {
  const std::size_t n = g_workers.load();
  return n != 0 ? n : std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace absorbing
