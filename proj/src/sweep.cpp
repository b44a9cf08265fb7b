#include "pursuit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "pursuit/engine.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit {

namespace {

struct TrialResult {
  bool captured = false;
  double t_c = 0.0;
};

TrialResult run_trial(const SweepGrid &grid, double lambda, int n,
                      std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> radius(0.8 * grid.ring_radius,
                                                1.2 * grid.ring_radius);
  ScenarioDoc doc;
  doc.name = "sweep";
  doc.evader.max_speed = grid.evader_speed;
  doc.evader.strategy = EvaderStrategy::kFlee;
  doc.d_c = grid.d_c;
  doc.sim.dt = grid.dt;
  doc.sim.horizon = grid.horizon;
  for (int i = 0; i < n; ++i) {
    const double a = angle(rng);
    const double r = radius(rng);
    doc.pursuers.push_back(
        {i + 1, {r * std::cos(a), r * std::sin(a)}, lambda * grid.evader_speed});
  }
  const SimTrace tr = run(doc);
  return {tr.verdict.kind == VerdictKind::kCaptured, tr.verdict.t_c};
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepGrid &grid, unsigned workers) {
  const std::size_t cells = grid.lambdas.size() * grid.counts.size();
  const std::size_t jobs = cells * static_cast<std::size_t>(grid.trials);
  std::vector<TrialResult> results(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t cell = j / grid.trials;
      const double lambda = grid.lambdas[cell / grid.counts.size()];
      const int n = grid.counts[cell % grid.counts.size()];
      results[j] = run_trial(grid, lambda, n, mix(grid.seed ^ mix(j)));
    }
  };
  workers = std::max(1u, workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread &t : pool) t.join();

  std::vector<SweepCell> out;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SweepCell c;
    c.lambda = grid.lambdas[cell / grid.counts.size()];
    c.n = grid.counts[cell % grid.counts.size()];
    c.trials = grid.trials;
    double total = 0.0;
    for (int k = 0; k < grid.trials; ++k) {
      const TrialResult &r = results[cell * grid.trials + k];
      if (r.captured) {
        ++c.captured;
        total += r.t_c;
      }
    }
    c.mean_t_c = c.captured ? total / c.captured : 0.0;
    out.push_back(c);
  }
  return out;
}

std::string sweep_table(const std::vector<SweepCell> &cells) {
  std::string out = "lambda,n,trials,captured,capture_rate,mean_t_c\n";
  char buf[160];
  for (const SweepCell &c : cells) {
    std::snprintf(buf, sizeof buf, "%.9g,%d,%d,%d,%.9g,%.9g\n", c.lambda, c.n,
                  c.trials, c.captured, c.capture_rate(), c.mean_t_c);
    out += buf;
  }
  return out;
}

}  // namespace pursuit
