#include "pursuit/control.hpp"

#include <algorithm>
#include <cmath>

#include "pursuit/error.hpp"

namespace pursuit {

namespace {

// log base 3 of 2.
const double kHuntingExponent = std::log(2.0) / std::log(3.0);

}  // namespace

double encirclement_rate(double eps_next, double eps_prev, double k) {
  return k * (eps_next - eps_prev);
}

double tradeoff_beta(double delta, double gamma) {
  const double beta = 0.5 * kPi * (1.0 - std::exp(-delta * gamma));
  // delta, gamma <= 1 keeps this well below pi/2; guard anyway.
  return std::min(beta, std::nextafter(0.5 * kPi, 0.0));
}

double surrounding_factor(double eps_next, double eps_prev, double theta_next,
                          double theta_prev) {
  const double denom = 4.0 * kPi - theta_next + theta_prev;
  const double delta = 2.0 * std::abs(eps_next - eps_prev) / denom;
  return std::clamp(delta, 0.0, 1.0);
}

double hunting_factor(double r, double r_prev, double r_next) {
  const double total = r + r_prev + r_next;
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kDegeneratePosition,
                "hunting factor with all radii zero");
  }
  return std::sin(kPi * std::pow(r / total, kHuntingExponent));
}

Gains gains_from_beta(double beta, double max_speed, double r, double eps_next,
                      double eps_prev) {
  if (!(r > 0.0)) {
    throw Error(ErrorKind::kDegeneratePosition, "gains at zero radius");
  }
  Gains g;
  g.h = max_speed * std::cos(beta) / r;
  const double gap = std::abs(eps_next - eps_prev);
  if (gap == 0.0 || beta == 0.0) {
    g.k = 1.0;
    g.fallback = true;
  } else {
    g.k = max_speed * std::sin(beta) / (r * gap);
  }
  return g;
}

ControlState pursuit_velocity(const PolarCoord &polar,
                              const RingNeighborhood &ring,
                              const PursuerSpec &spec) {
  if (!(polar.r > 0.0)) {
    throw Error(ErrorKind::kDegeneratePosition,
                "pursuit velocity at zero radius");
  }
  ControlState s;
  s.delta = surrounding_factor(ring.eps_next, ring.eps_prev, ring.theta_next,
                               ring.theta_prev);
  s.gamma = hunting_factor(polar.r, ring.r_prev, ring.r_next);
  s.beta = tradeoff_beta(s.delta, s.gamma);
  const Gains g = gains_from_beta(s.beta, spec.max_speed, polar.r,
                                  ring.eps_next, ring.eps_prev);
  s.k = g.k;
  s.h = g.h;
  s.fallback = g.fallback;
  s.alpha_rate = encirclement_rate(ring.eps_next, ring.eps_prev, s.k);

  const Vec2 radial = unit_from_angle(polar.alpha);
  const Vec2 tangential{-radial.y, radial.x};
  s.v_surround = (s.alpha_rate * polar.r) * tangential;
  s.v_hunt = (-s.h * polar.r) * radial;
  s.v_total = s.v_surround + s.v_hunt;
  return s;
}

ConsensusMatrix::ConsensusMatrix(std::span<const double> gains)
    : gains_(gains.begin(), gains.end()) {
  const int n = static_cast<int>(gains_.size());
  if (n < 2) {
    throw Error(ErrorKind::kRingUndefined,
                "consensus matrix needs at least two gains");
  }
  for (double k : gains_) {
    if (!(k > 0.0)) {
      throw Error(ErrorKind::kInvalidGain, "surrounding gains must be > 0");
    }
  }
  entries_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int next = (i + 1) % n;
    const int prev = (i + n - 1) % n;
    entries_(i, i) += gains_[i] + gains_[next];
    entries_(i, next) -= gains_[next];
    entries_(i, prev) -= gains_[i];
  }
}

Eigen::VectorXd ConsensusMatrix::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

ConsensusMatrix consensus_matrix(std::span<const double> gains) {
  return ConsensusMatrix(gains);
}

std::vector<EpsilonSample> integrate_epsilon_flow(std::span<const double> eps0,
                                                  std::span<const double> gains,
                                                  double dt, double horizon) {
  if (eps0.size() != gains.size()) {
    throw Error(ErrorKind::kValidation,
                "coverage vector and gain vector differ in length");
  }
  if (!(dt > 0.0) || !(horizon >= 0.0)) {
    throw Error(ErrorKind::kValidation, "flow needs dt > 0 and horizon >= 0");
  }
  const ConsensusMatrix m(gains);
  const Eigen::MatrixXd &a = m.entries();
  Eigen::VectorXd eps =
      Eigen::Map<const Eigen::VectorXd>(eps0.data(), eps0.size());

  const auto steps = static_cast<long>(std::llround(horizon / dt));
  std::vector<EpsilonSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  auto record = [&](long step) {
    out.push_back({static_cast<double>(step) * dt,
                   std::vector<double>(eps.data(), eps.data() + eps.size())});
  };
  record(0);
  for (long step = 1; step <= steps; ++step) {
    const Eigen::VectorXd k1 = -a * eps;
    const Eigen::VectorXd k2 = -a * (eps + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = -a * (eps + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = -a * (eps + dt * k3);
    eps += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(step);
  }
  return out;
}

}  // namespace pursuit
