#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pursuit/geometry.hpp"
#include "pursuit/vec2.hpp"

namespace pursuit {

struct PursuerSpec {
  int id = 0;
  double max_speed = 0.0;    // V_i
  double speed_ratio = 0.0;  // V_i / V_e, in (0, 1)
};

// Per-pursuer, per-tick control quantities.
struct ControlState {
  double alpha_rate = 0.0;  // signed angular rate around the evader
  double beta = 0.0;        // trade-off angle in [0, pi/2)
  double delta = 0.0;       // surrounding factor
  double gamma = 0.0;       // hunting factor
  double k = 1.0;           // surrounding coefficient
  double h = 0.0;           // hunting coefficient
  Vec2 v_surround;
  Vec2 v_hunt;
  Vec2 v_correction;  // distance maintenance / collision term, sp5 only
  Vec2 v_total;
  bool fallback = false;  // k was pinned to 1

  friend bool operator==(const ControlState &, const ControlState &) = default;
};

// What a pursuer knows about its two ring neighbors.
struct RingNeighborhood {
  double eps_prev = 0.0;  // coverage angle shared with the clockwise neighbor
  double eps_next = 0.0;  // coverage angle shared with the ccw neighbor
  double r_prev = 0.0;
  double r_next = 0.0;
  double theta_prev = 0.0;
  double theta_next = 0.0;
};

struct Gains {
  double k = 1.0;
  double h = 0.0;
  bool fallback = false;
};

double encirclement_rate(double eps_next, double eps_prev, double k);

// (pi/2) * (1 - exp(-delta * gamma)); always strictly below pi/2.
double tradeoff_beta(double delta, double gamma);

double surrounding_factor(double eps_next, double eps_prev, double theta_next,
                          double theta_prev);

double hunting_factor(double r, double r_prev, double r_next);

Gains gains_from_beta(double beta, double max_speed, double r, double eps_next,
                      double eps_prev);

ControlState pursuit_velocity(const PolarCoord &polar,
                              const RingNeighborhood &ring,
                              const PursuerSpec &spec);

// Coverage-angle consensus matrix: eps' = -M eps on the pursuer ring.
class ConsensusMatrix {
 public:
  explicit ConsensusMatrix(std::span<const double> gains);

  const Eigen::MatrixXd &entries() const { return entries_; }
  const std::vector<double> &gains() const { return gains_; }
  int size() const { return static_cast<int>(gains_.size()); }

  // Eigenvalues in ascending order.
  Eigen::VectorXd spectrum() const;

 private:
  std::vector<double> gains_;
  Eigen::MatrixXd entries_;
};

ConsensusMatrix consensus_matrix(std::span<const double> gains);

struct EpsilonSample {
  double t = 0.0;
  std::vector<double> eps;
};

// Fixed-step RK4 integration of the coverage-angle flow. Samples are
// recorded every step including t = 0.
std::vector<EpsilonSample> integrate_epsilon_flow(std::span<const double> eps0,
                                                  std::span<const double> gains,
                                                  double dt, double horizon);

}  // namespace pursuit
