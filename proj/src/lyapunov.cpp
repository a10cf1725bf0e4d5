#include "rendezvous/lyapunov.hpp"

#include "rendezvous/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rendezvous {

namespace {

std::vector<char> membership(int n, std::span<const int> nodes) {
  std::vector<char> in(n, 0);
  for (int v : nodes) {
    if (v < 0 || v >= n) throw Error(ErrorCode::IndexOutOfRange, "node set index out of range");
    in[v] = 1;
  }
  return in;
}

Vec2 e1_of(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace

ChiCoordinates chi_transform(const SwarmState& s, const DiGraph& g) {
  ChiCoordinates chi;
  chi.X.resize(s.agents.size(), Vec2::Zero());
  for (int i = 0; i < s.size(); ++i) {
    const double A = g.out_weight(i);
    if (A > 0.0) chi.X[i] = consensus_field(i, s, g) / A;
    chi.xbar += s.agents[i].x;
  }
  return chi;
}

HattedFields hatted_fields(const Vec2& X_i, double theta_i, double A_i) {
  HattedFields h;
  h.f = A_i * X_i;
  h.g = A_i * A_i * X_i.norm() * X_i;
  h.f_body = body_frame(h.f, theta_i);
  h.g_body = body_frame(h.g, theta_i);
  return h;
}

Eigen::MatrixXd restricted_matrix(const DiGraph& g, std::span<const int> B) {
  const auto m = static_cast<Eigen::Index>(B.size());
  std::vector<int> local(g.size(), -1);
  for (Eigen::Index k = 0; k < m; ++k) local.at(B[k]) = static_cast<int>(k);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const int i = B[r];
    const double A = g.out_weight(i);
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const int c = local[nb[k]];
      if (c < 0) continue;
      const double b = w[k] / (A * A);
      M(r, c) += b;
      M(r, r) -= b;
    }
  }
  return M;
}

std::vector<double> compute_gamma(const DiGraph& g, std::span<const int> B) {
  std::vector<int> nodes(B.begin(), B.end());
  const DiGraph sub = induced_subgraph(g, nodes);
  const Condensation blocks = strongly_connected_components(sub);
  if (!blocks.dag_edges.empty()) {
    std::ostringstream msg;
    msg << "node set has edges between its strongly connected blocks (e.g. "
        << sub.label(blocks.components[blocks.dag_edges.front().first].front()) << " block → "
        << sub.label(blocks.components[blocks.dag_edges.front().second].front()) << " block)";
    throw Error(ErrorCode::NoPositiveLeftNullVector, msg.str());
  }

  std::vector<double> gamma(B.size(), 1.0);
  for (const auto& block : blocks.components) {
    if (block.size() == 1) continue;
    std::vector<int> members;
    for (int local : block) members.push_back(B[local]);
    const Eigen::MatrixXd M = restricted_matrix(g, members);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.transpose(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const auto k = sv.size();
    const double scale = std::max(sv(0), 1e-300);
    if (k >= 2 && sv(k - 2) <= 1e-9 * scale)
      throw Error(ErrorCode::NoPositiveLeftNullVector, "left null space is not one-dimensional");
    Eigen::VectorXd v = svd.matrixV().col(k - 1);
    if (v.sum() < 0.0) v = -v;
    const double vmin = v.minCoeff();
    if (!(vmin > 0.0))
      throw Error(ErrorCode::NoPositiveLeftNullVector, "left null vector is not positive");
    for (std::size_t idx = 0; idx < block.size(); ++idx) gamma[block[idx]] = v(idx) / vmin;
  }
  return gamma;
}

double gamma_residual(const DiGraph& g, std::span<const int> B, std::span<const double> gamma) {
  const Eigen::MatrixXd M = restricted_matrix(g, B);
  Eigen::VectorXd gv(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t k = 0; k < gamma.size(); ++k) gv(k) = gamma[k];
  return (gv.transpose() * M).norm();
}

double compute_alpha_star(const DiGraph& g, std::span<const int> B,
                          std::span<const double> gamma) {
  double acc = 0.0;
  for (std::size_t k = 0; k < B.size(); ++k) {
    const double A = g.out_weight(B[k]);
    acc += A * A / gamma[k];
  }
  return std::sqrt(acc);
}

double sampled_alpha_star(const DiGraph& g, std::span<const int> B,
                          std::span<const double> gamma, std::size_t samples,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double V = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < B.size(); ++k) {
      const Vec2 X(normal(rng), normal(rng));
      V += gamma[k] * X.squaredNorm();
      // Heading aligned with X_i maximizes |R^T (A X) . e1|.
      const double theta = std::atan2(X.y(), X.x());
      acc += std::abs(hatted_fields(X, theta, g.out_weight(B[k])).f_body.x());
    }
    if (V > 0.0) best = std::max(best, acc / std::sqrt(V));
  }
  return best;
}

CertificateGains make_certificate_gains(const DiGraph& g, std::span<const int> B,
                                        double alpha_factor) {
  CertificateGains gains;
  gains.gamma = compute_gamma(g, B);
  gains.alpha_star = compute_alpha_star(g, B, gains.gamma);
  gains.alpha = gains.alpha_star > 0.0 ? alpha_factor * gains.alpha_star : alpha_factor;
  return gains;
}

LyapunovSample lyapunov_sample(std::span<const Vec2> X, std::span<const double> theta,
                               const DiGraph& g, std::span<const int> B,
                               const CertificateGains& gains) {
  LyapunovSample out;
  out.fields.reserve(B.size());
  for (std::size_t k = 0; k < B.size(); ++k) {
    const int i = B[k];
    const auto h = hatted_fields(X[i], theta[i], g.out_weight(i));
    out.V += gains.gamma[k] * X[i].squaredNorm();
    out.W_rot += h.f_body.x();
    out.fields.push_back(h);
  }
  out.W_tran = std::sqrt(out.V);
  out.W = gains.alpha * out.W_tran + out.W_rot;
  return out;
}

LyapunovSample lyapunov_sample(const SwarmState& s, const DiGraph& g, std::span<const int> B,
                               const CertificateGains& gains) {
  const auto chi = chi_transform(s, g);
  const auto theta = s.headings();
  return lyapunov_sample(chi.X, theta, g, B, gains);
}

std::vector<Vec2> mu(std::span<const Vec2> X, std::span<const int> B,
                     std::span<const double> gamma) {
  double V = 0.0;
  for (std::size_t k = 0; k < B.size(); ++k) V += gamma[k] * X[B[k]].squaredNorm();
  if (!(V > 0.0)) return {};
  const double root = std::sqrt(V);
  std::vector<Vec2> out;
  for (int i : B) out.push_back(X[i] / root);
  return out;
}

std::vector<XdotTerms> xdot_decomposition(const SwarmState& s, const DiGraph& g,
                                          std::span<const int> A, std::span<const int> B,
                                          const ControllerParams& /*p*/) {
  const int n = g.size();
  const auto inA = membership(n, A);
  const auto inB = membership(n, B);
  for (int v : B)
    if (inA[v]) throw Error(ErrorCode::LayerMismatch, "node sets A and B overlap");
  std::vector<int> AB(A.begin(), A.end());
  AB.insert(AB.end(), B.begin(), B.end());
  if (!is_isolated(A, g)) throw Error(ErrorCode::LayerMismatch, "node set A is not isolated");
  if (!is_isolated(AB, g))
    throw Error(ErrorCode::LayerMismatch, "node set A u B is not isolated");

  const auto chi = chi_transform(s, g);
  std::vector<HattedFields> hat(n);
  for (int v = 0; v < n; ++v) hat[v] = hatted_fields(chi.X[v], s.agents[v].theta, g.out_weight(v));

  auto misalignment = [](const Vec2& g_body) {  // (g.e1) e1 - g
    return Vec2(0.0, -g_body.y());
  };

  std::vector<XdotTerms> out(B.size());
  for (std::size_t k = 0; k < B.size(); ++k) {
    const int i = B[k];
    const double Ai = g.out_weight(i);
    if (!(Ai > 0.0)) continue;
    const Mat2 Ri = rotation_from_angle(s.agents[i].theta);
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    XdotTerms t;
    for (std::size_t q = 0; q < nb.size(); ++q) {
      const int j = nb[q];
      const double aij = w[q];
      if (inB[j]) {
        const Mat2 Rj = rotation_from_angle(s.agents[j].theta);
        t.a += aij * (hat[j].g - hat[i].g);
        t.b += aij * (Rj * misalignment(hat[j].g_body) - Ri * misalignment(hat[i].g_body));
      } else {
        t.a -= aij * hat[i].g;
        t.c -= aij * (Ri * misalignment(hat[i].g_body));
        t.d += aij * hat[j].g_body.x() * e1_of(s.agents[j].theta);
      }
    }
    t.a /= Ai;
    t.b /= Ai;
    t.c /= Ai;
    t.d /= Ai;
    out[k] = t;
  }
  return out;
}

std::vector<Vec2> closed_loop_xdot(const SwarmState& s, const DiGraph& g,
                                   const ControllerParams& p) {
  const auto rates = closed_loop_rates(s, g, p, ControllerKind::Ccp);
  std::vector<Vec2> out(s.agents.size(), Vec2::Zero());
  for (int i = 0; i < s.size(); ++i) {
    const double Ai = g.out_weight(i);
    if (!(Ai > 0.0)) continue;
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    for (std::size_t q = 0; q < nb.size(); ++q)
      out[i] += w[q] * (rates[nb[q]].xdot - rates[i].xdot);
    out[i] /= Ai;
  }
  return out;
}

double compute_r(std::span<const Vec2> X, const DiGraph& g, std::span<const int> A,
                 std::span<const int> B, std::span<const double> gamma) {
  const int n = g.size();
  const auto inA = membership(n, A);
  const auto inB = membership(n, B);
  double r = 0.0;
  for (std::size_t k = 0; k < B.size(); ++k) {
    const int i = B[k];
    const double Ai = g.out_weight(i);
    if (!(Ai > 0.0)) continue;
    const Vec2 fi = Ai * X[i];
    const double ni = fi.norm();
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    double acc = 0.0;
    for (std::size_t q = 0; q < nb.size(); ++q) {
      const int j = nb[q];
      const double bij = w[q] / (Ai * Ai);
      if (inB[j]) {
        const Vec2 fj = g.out_weight(j) * X[j];
        const double nj = fj.norm();
        acc += bij * (-2.0 / 3.0 * ni * ni * ni + 2.0 * nj * fj.dot(fi) -
                      4.0 / 3.0 * nj * nj * nj);
      } else if (inA[j]) {
        acc -= 2.0 * bij * ni * ni * ni;
      }
    }
    r += gamma[k] * acc;
  }
  return r;
}

namespace {

double lyapunov_w(const SwarmState& s, const DiGraph& g, std::span<const int> B,
                  const CertificateGains& gains, double& V) {
  const auto sample = lyapunov_sample(s, g, B, gains);
  V = sample.V;
  return sample.W;
}

}  // namespace

std::vector<WdotSample> wdot_along_trajectory(const Trajectory& traj, const DiGraph& g,
                                              std::span<const int> B,
                                              const CertificateGains& gains) {
  const std::size_t m = traj.size();
  std::vector<double> W(m), V(m);
  for (std::size_t k = 0; k < m; ++k) W[k] = lyapunov_w(traj.states[k], g, B, gains, V[k]);
  std::vector<WdotSample> out;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double h = traj.times[k + 1] - traj.times[k - 1];
    out.push_back({traj.times[k], W[k], (W[k + 1] - W[k - 1]) / h, V[k]});
  }
  return out;
}

DecaySummary summarize_decay(std::span<const WdotSample> samples, double v0,
                             double floor_factor) {
  DecaySummary sum;
  sum.v_floor = floor_factor * v0;
  bool first = true;
  for (const auto& s : samples) {
    if (!(s.V > sum.v_floor) || !(s.V > 0.0)) continue;
    ++sum.checked;
    const double ratio = s.dWdt / s.V;
    if (s.dWdt >= 0.0) ++sum.violations;
    if (first || ratio > sum.max_ratio) {
      sum.max_ratio = ratio;
      sum.worst = s;
      first = false;
    }
  }
  return sum;
}

WdotMonitor::WdotMonitor(const DiGraph& g, NodeSet B, CertificateGains gains,
                         std::size_t keep_every, double floor_factor)
    : graph_(&g),
      B_(std::move(B)),
      gains_(std::move(gains)),
      keep_every_(std::max<std::size_t>(1, keep_every)),
      floor_factor_(floor_factor) {}

void WdotMonitor::observe(double t, const SwarmState& s) {
  double V = 0.0;
  const double W = lyapunov_w(s, *graph_, B_, gains_, V);
  if (v0_ < 0.0) {
    v0_ = V;
    summary_.v_floor = floor_factor_ * v0_;
  }
  window_.push_back({t, W, V});
  if (window_.size() > 3) window_.erase(window_.begin());
  if (window_.size() < 3) return;

  const auto& prev = window_[0];
  const auto& mid = window_[1];
  const auto& next = window_[2];
  const WdotSample sample{mid.t, mid.W, (next.W - prev.W) / (next.t - prev.t), mid.V};

  if (index_++ % keep_every_ == 0) kept_.push_back(sample);
  if (sample.V > summary_.v_floor && sample.V > 0.0) {
    const double ratio = sample.dWdt / sample.V;
    if (sample.dWdt >= 0.0) ++summary_.violations;
    if (summary_.checked == 0 || ratio > summary_.max_ratio) {
      summary_.max_ratio = ratio;
      summary_.worst = sample;
    }
    ++summary_.checked;
  }
}

}  // namespace rendezvous
