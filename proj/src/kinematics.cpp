#include "rendezvous/kinematics.hpp"

#include "rendezvous/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rendezvous {

std::vector<Vec2> SwarmState::positions() const {
  std::vector<Vec2> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.x);
  return out;
}

std::vector<double> SwarmState::headings() const {
  std::vector<double> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.theta);
  return out;
}

Mat2 rotation_from_angle(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat2 skew(double omega) {
  Mat2 m;
  m << 0.0, -omega, omega, 0.0;
  return m;
}

Vec2 body_frame(const Vec2& v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x() + s * v.y(), -s * v.x() + c * v.y()};
}

UnicycleRate unicycle_derivative(const UnicycleState& s, const ControlInput& c) {
  return {Vec2(c.u * std::cos(s.theta), c.u * std::sin(s.theta)), c.omega};
}

Vec2 relative_displacement(const SwarmState& s, int i, int j) {
  if (i < 0 || j < 0 || i >= s.size() || j >= s.size())
    throw Error(ErrorCode::IndexOutOfRange,
                "agent index out of range: " + std::to_string(i) + ", " + std::to_string(j));
  return s.agents[j].x - s.agents[i].x;
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(theta, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

}  // namespace rendezvous
