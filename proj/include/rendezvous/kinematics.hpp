#pragma once

#include <Eigen/Dense>

#include <vector>

namespace rendezvous {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Planar unicycle: inertial position (m) and unwrapped heading (rad).
struct UnicycleState {
  Vec2 x = Vec2::Zero();
  double theta = 0.0;
};

/// Ordered ensemble; agent k corresponds to graph node k.
struct SwarmState {
  std::vector<UnicycleState> agents;

  int size() const noexcept { return static_cast<int>(agents.size()); }
  std::vector<Vec2> positions() const;
  std::vector<double> headings() const;
};

struct ControlInput {
  double u = 0.0;      // linear speed, m/s
  double omega = 0.0;  // angular speed, rad/s
};

struct UnicycleRate {
  Vec2 xdot = Vec2::Zero();
  double theta_dot = 0.0;
};

Mat2 rotation_from_angle(double theta);

/// [[0, -w], [w, 0]]
Mat2 skew(double omega);

/// Coordinates of inertial vector v in the body frame with heading theta.
Vec2 body_frame(const Vec2& v, double theta);

/// xdot = u R(theta) e1, theta_dot = omega.
UnicycleRate unicycle_derivative(const UnicycleState& s, const ControlInput& c);

/// x_ij = x_j - x_i. Throws Error{IndexOutOfRange}.
Vec2 relative_displacement(const SwarmState& s, int i, int j);

/// Wraps to (-pi, pi].
double wrap_angle(double theta);

}  // namespace rendezvous
