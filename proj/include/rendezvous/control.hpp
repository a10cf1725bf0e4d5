#pragma once

#include "rendezvous/digraph.hpp"
#include "rendezvous/kinematics.hpp"

#include <span>
#include <vector>

namespace rendezvous {

struct ControllerParams {
  double k1 = 1.0;  // turn-rate gain

  void validate() const;  // throws Error{Schema} unless k1 >= 0 and finite
};

/// One entry of y_i^i: the gain a_ij and the displacement x_ij expressed in
/// robot i's own body frame. This is everything robot i is allowed to see.
struct BodyMeasurement {
  double weight = 0.0;
  Vec2 displacement = Vec2::Zero();
};

/// Measurements robot i would take of its neighbors.
std::vector<BodyMeasurement> sense(int i, const SwarmState& s, const DiGraph& g);

/// f_i = sum_j a_ij x_ij in the inertial frame; zero for N_i empty.
Vec2 consensus_field(int i, const SwarmState& s, const DiGraph& g);
Vec2 consensus_field(int i, std::span<const Vec2> positions, const DiGraph& g);

/// g_i = |f_i| f_i.
Vec2 g_field(int i, const SwarmState& s, const DiGraph& g);

/// The rendezvous feedback computed from body-frame measurements only:
///   u = |f^i| (f^i . e1),  omega = -k1 (f^i . e2),  f^i = sum a_ij x_ij^i.
ControlInput ccp_feedback(std::span<const BodyMeasurement> y, double k1);

/// Convenience: sense() followed by the local law above.
ControlInput ccp_feedback(int i, const SwarmState& s, const DiGraph& g,
                          const ControllerParams& p);

/// Outer-loop reference model xdot_i = f_i for every agent.
std::vector<Vec2> single_integrator_velocities(std::span<const Vec2> positions,
                                               const DiGraph& g);

}  // namespace rendezvous
