#pragma once

#include "rendezvous/control.hpp"
#include "rendezvous/digraph.hpp"
#include "rendezvous/kinematics.hpp"
#include "rendezvous/sim.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rendezvous {

/// X_i = f_i / A_i (X_i = 0 when N_i is empty) and xbar = sum_i x_i.
struct ChiCoordinates {
  std::vector<Vec2> X;
  Vec2 xbar = Vec2::Zero();
};

ChiCoordinates chi_transform(const SwarmState& s, const DiGraph& g);

/// Consensus and speed-reference fields written in chi coordinates,
/// inertial and body-frame:
///   f = A X,  g = A^2 |X| X,  f_body = R^T f,  g_body = R^T g.
struct HattedFields {
  Vec2 f = Vec2::Zero();
  Vec2 g = Vec2::Zero();
  Vec2 f_body = Vec2::Zero();
  Vec2 g_body = Vec2::Zero();
};

HattedFields hatted_fields(const Vec2& X_i, double theta_i, double A_i);

/// B-restricted matrix with b_ij = a_ij / A_i^2:
///   M_ii = -sum_{k in N_i cap B} b_ik,  M_ij = b_ij for j in N_i cap B.
/// Rows and columns follow the order of `B`.
Eigen::MatrixXd restricted_matrix(const DiGraph& g, std::span<const int> B);

/// Positive left null vector of restricted_matrix(g, B), assembled one
/// strongly connected block at a time, each block scaled so its smallest
/// entry is 1. Entries follow the order of `B`.
/// Throws Error{NoPositiveLeftNullVector} when B has edges between its
/// strongly connected blocks or a block has no positive left null vector.
std::vector<double> compute_gamma(const DiGraph& g, std::span<const int> B);

/// |gamma^T M| (Euclidean).
double gamma_residual(const DiGraph& g, std::span<const int> B, std::span<const double> gamma);

/// sup over the unit V-sphere and all headings of sum_{i in B} |f_body_i . e1|,
/// in closed form sqrt(sum A_i^2 / gamma_i).
double compute_alpha_star(const DiGraph& g, std::span<const int> B, std::span<const double> gamma);

/// Randomized lower estimate of alpha_star: Gaussian X_B with every heading
/// aligned to its X_i. Never exceeds the closed form.
double sampled_alpha_star(const DiGraph& g, std::span<const int> B,
                          std::span<const double> gamma, std::size_t samples,
                          std::uint64_t seed);

struct CertificateGains {
  std::vector<double> gamma;  // parallel to B
  double alpha_star = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;  // fitted decay rate, filled in by trajectory checks
};

/// gamma from compute_gamma, alpha_star in closed form, alpha = factor * alpha_star.
/// When alpha_star is zero, alpha falls back to `factor`.
CertificateGains make_certificate_gains(const DiGraph& g, std::span<const int> B,
                                        double alpha_factor = 3.0);

struct LyapunovSample {
  double V = 0.0;
  double W_tran = 0.0;
  double W_rot = 0.0;
  double W = 0.0;
  std::vector<HattedFields> fields;  // parallel to B
};

/// V = sum gamma_i |X_i|^2, W_tran = sqrt(V), W_rot = sum f_body_i . e1,
/// W = alpha W_tran + W_rot. X and theta are indexed by node.
LyapunovSample lyapunov_sample(std::span<const Vec2> X, std::span<const double> theta,
                               const DiGraph& g, std::span<const int> B,
                               const CertificateGains& gains);
LyapunovSample lyapunov_sample(const SwarmState& s, const DiGraph& g, std::span<const int> B,
                               const CertificateGains& gains);

/// mu_i = X_i / sqrt(V) for i in B; empty when V is zero.
std::vector<Vec2> mu(std::span<const Vec2> X, std::span<const int> B,
                     std::span<const double> gamma);

/// Split of the chi-coordinate rate of an agent i in B into
///   a: depends on X_B only,  b, c: misalignment terms,  d: driven by A.
struct XdotTerms {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  Vec2 c = Vec2::Zero();
  Vec2 d = Vec2::Zero();

  Vec2 sum() const { return a + b + c + d; }
};

/// Entries parallel to B. Requires A and B disjoint with A and A u B both
/// isolated; throws Error{LayerMismatch} otherwise.
std::vector<XdotTerms> xdot_decomposition(const SwarmState& s, const DiGraph& g,
                                          std::span<const int> A, std::span<const int> B,
                                          const ControllerParams& p);

/// Closed-loop chi rate for every node:
///   Xdot_i = sum_j a_ij (u_j R_j e1 - u_i R_i e1) / A_i.
std::vector<Vec2> closed_loop_xdot(const SwarmState& s, const DiGraph& g,
                                   const ControllerParams& p);

/// The degree-three bound on sum_{i in B} dV/dX_i . a_i(X_B):
///   sum_i gamma_i sum_{j in N_i cap B} b_ij (-2/3|f_i|^3 + 2|f_j| f_j.f_i - 4/3|f_j|^3)
///   - 2 sum_i gamma_i sum_{j in N_i cap A} b_ij |f_i|^3
/// with f_i = A_i X_i. X is indexed by node, gamma parallel to B.
double compute_r(std::span<const Vec2> X, const DiGraph& g, std::span<const int> A,
                 std::span<const int> B, std::span<const double> gamma);

struct WdotSample {
  double t = 0.0;
  double W = 0.0;
  double dWdt = 0.0;
  double V = 0.0;
};

/// Central differences of W over consecutive trajectory samples.
std::vector<WdotSample> wdot_along_trajectory(const Trajectory& traj, const DiGraph& g,
                                              std::span<const int> B,
                                              const CertificateGains& gains);

struct DecaySummary {
  std::size_t checked = 0;     // samples with V above the floor
  std::size_t violations = 0;  // checked samples with dW/dt >= 0
  double max_ratio = 0.0;      // max (dW/dt)/V over checked samples
  double v_floor = 0.0;
  std::optional<WdotSample> worst;

  bool holds() const { return violations == 0; }
  double sigma_estimate() const { return checked > 0 && max_ratio < 0.0 ? -max_ratio : 0.0; }
};

/// Checks dW/dt < 0 on samples with V > floor_factor * V(t0).
DecaySummary summarize_decay(std::span<const WdotSample> samples, double v0,
                             double floor_factor = 1e-9);

/// Streaming form of wdot_along_trajectory for use as a run() observer.
/// Keeps every `keep_every`-th difference sample plus the running summary.
class WdotMonitor {
 public:
  WdotMonitor(const DiGraph& g, NodeSet B, CertificateGains gains, std::size_t keep_every = 1,
              double floor_factor = 1e-9);

  void observe(double t, const SwarmState& s);

  const std::vector<WdotSample>& kept() const noexcept { return kept_; }
  const DecaySummary& summary() const noexcept { return summary_; }
  double initial_v() const noexcept { return v0_; }

 private:
  struct Point {
    double t, W, V;
  };

  const DiGraph* graph_;
  NodeSet B_;
  CertificateGains gains_;
  std::size_t keep_every_;
  double floor_factor_;
  std::vector<Point> window_;
  std::size_t index_ = 0;
  double v0_ = -1.0;
  std::vector<WdotSample> kept_;
  DecaySummary summary_;
};

}  // namespace rendezvous
