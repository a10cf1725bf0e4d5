#include "rendezvous/control.hpp"

#include "rendezvous/errors.hpp"

#include <cmath>

namespace rendezvous {

void ControllerParams::validate() const {
  if (!std::isfinite(k1) || k1 < 0.0)
    throw Error(ErrorCode::Schema, "control.k1 must be a finite non-negative number");
}

std::vector<BodyMeasurement> sense(int i, const SwarmState& s, const DiGraph& g) {
  auto nb = g.neighbors(i);
  auto w = g.neighbor_weights(i);
  std::vector<BodyMeasurement> y;
  y.reserve(nb.size());
  const double theta = s.agents.at(i).theta;
  for (std::size_t k = 0; k < nb.size(); ++k)
    y.push_back({w[k], body_frame(relative_displacement(s, i, nb[k]), theta)});
  return y;
}

Vec2 consensus_field(int i, std::span<const Vec2> positions, const DiGraph& g) {
  auto nb = g.neighbors(i);
  auto w = g.neighbor_weights(i);
  Vec2 f = Vec2::Zero();
  for (std::size_t k = 0; k < nb.size(); ++k) f += w[k] * (positions[nb[k]] - positions[i]);
  return f;
}

Vec2 consensus_field(int i, const SwarmState& s, const DiGraph& g) {
  auto nb = g.neighbors(i);
  auto w = g.neighbor_weights(i);
  Vec2 f = Vec2::Zero();
  for (std::size_t k = 0; k < nb.size(); ++k) f += w[k] * relative_displacement(s, i, nb[k]);
  return f;
}

Vec2 g_field(int i, const SwarmState& s, const DiGraph& g) {
  const Vec2 f = consensus_field(i, s, g);
  return f.norm() * f;
}

ControlInput ccp_feedback(std::span<const BodyMeasurement> y, double k1) {
  Vec2 f = Vec2::Zero();
  for (const auto& m : y) f += m.weight * m.displacement;
  return {f.norm() * f.x(), -k1 * f.y()};
}

ControlInput ccp_feedback(int i, const SwarmState& s, const DiGraph& g,
                          const ControllerParams& p) {
  const auto y = sense(i, s, g);
  return ccp_feedback(y, p.k1);
}

std::vector<Vec2> single_integrator_velocities(std::span<const Vec2> positions,
                                               const DiGraph& g) {
  std::vector<Vec2> v(positions.size());
  for (int i = 0; i < g.size(); ++i) v[i] = consensus_field(i, positions, g);
  return v;
}

}  // namespace rendezvous
