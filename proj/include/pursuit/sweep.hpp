#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pursuit {

struct SweepGrid {
  std::vector<double> lambdas{0.7, 0.8, 0.9, 0.95};
  std::vector<int> counts{3, 4, 6, 8, 12};
  int trials = 10;
  std::uint64_t seed = 1;
  double ring_radius = 10.0;  // pursuers start within +-20% of this
  double d_c = 1.0;
  double evader_speed = 1.0;
  double dt = 0.05;
  double horizon = 100.0;
};

struct SweepCell {
  double lambda = 0.0;
  int n = 0;
  int trials = 0;
  int captured = 0;
  double mean_t_c = 0.0;  // over captured trials, 0 if none

  double capture_rate() const {
    return trials ? static_cast<double>(captured) / trials : 0.0;
  }
  friend bool operator==(const SweepCell &, const SweepCell &) = default;
};

// Every trial draws its own start from (seed, cell, trial), so the result
// does not depend on the worker count.
std::vector<SweepCell> run_sweep(const SweepGrid &grid, unsigned workers);

std::string sweep_table(const std::vector<SweepCell> &cells);

}  // namespace pursuit
