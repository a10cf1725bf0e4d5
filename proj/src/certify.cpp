#include "rendezvous/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace rendezvous {

namespace {

std::vector<Vec2> random_chi(int n, std::span<const int> nodes, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Vec2> X(n, Vec2::Zero());
  for (int v : nodes) X[v] = Vec2(normal(rng), normal(rng));
  return X;
}

}  // namespace

CertifyReport certify(const Scenario& scenario, const CertifyOptions& options) {
  scenario.validate();
  const DiGraph& g = scenario.graph;
  const int n = g.size();
  CertifyReport report;
  report.residual_tolerance = options.gamma_residual_tolerance;

  const auto condensation = strongly_connected_components(g);
  report.has_reverse_spanning_tree = condensation.root.has_value();
  if (!report.has_reverse_spanning_tree) {
    report.failure = "sensor graph has no reverse directed spanning tree";
    return report;
  }
  const auto layers = layer_sets(condensation);
  report.root_layer = layers.layers.front();

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

  for (int k = 0; k <= layers.depth(); ++k) {
    LayerCertificate lc;
    lc.layer = k;
    if (k > 0) lc.A = layers.cumulative[k - 1];
    lc.B = layers.layers[k];
    lc.gamma = compute_gamma(g, lc.B);
    lc.gamma_residual = gamma_residual(g, lc.B, lc.gamma);
    lc.alpha_star = compute_alpha_star(g, lc.B, lc.gamma);
    for (std::size_t s = 0; s < options.r_samples; ++s) {
      const auto X = random_chi(n, lc.B, rng);
      const double r = compute_r(X, g, lc.A, lc.B, lc.gamma);
      double max_f = 0.0, cube = 0.0;
      for (int i : lc.B) {
        const double f = g.out_weight(i) * X[i].norm();
        max_f = std::max(max_f, f);
        cube += f * f * f;
      }
      ++lc.r_samples;
      if (r > 0.0) ++lc.r_positive;
      if (max_f > options.signal_floor && !(r < 0.0)) ++lc.r_zero_with_signal;
      if (cube > 0.0) {
        const double ratio = r / cube;
        lc.r_max_normalized = s == 0 ? ratio : std::max(lc.r_max_normalized, ratio);
      }
    }
    report.layers.push_back(std::move(lc));
  }

  const auto& B = report.root_layer;
  report.gains = make_certificate_gains(g, B, options.alpha_factor);
  report.alpha_star_sampled =
      sampled_alpha_star(g, B, report.gains.gamma, options.alpha_samples, options.seed + 1);
  const double closed = report.gains.alpha_star;
  report.alpha_star_consistent =
      report.alpha_star_sampled <= closed * (1.0 + 1e-12) &&
      report.alpha_star_sampled >= (1.0 - options.alpha_sample_tolerance) * closed;

  std::vector<double> theta(n, 0.0);
  for (std::size_t s = 0; s < options.bound_samples; ++s) {
    const auto X = random_chi(n, B, rng);
    for (int i : B) theta[i] = angle(rng);
    const auto ls = lyapunov_sample(X, theta, g, B, report.gains);
    ++report.bound_samples;
    const double root = std::sqrt(ls.V);
    const bool ok = ls.V > 1e-12 ? (closed * root < ls.W && ls.W < 2.0 * report.gains.alpha * root)
                                 : ls.W >= 0.0;
    if (!ok) ++report.bound_violations;
  }

  const std::size_t total_steps =
      static_cast<std::size_t>(std::llround(scenario.t_end / scenario.dt));
  const std::size_t keep =
      std::max<std::size_t>(1, total_steps / std::max<std::size_t>(1, options.max_report_samples));
  WdotMonitor monitor(g, B, report.gains, keep, options.v_floor_factor);
  Scenario sc = scenario;
  sc.controller = ControllerKind::Ccp;
  sc.record_interval = sc.t_end;
  run(sc, [&](double t, const SwarmState& s) { monitor.observe(t, s); });
  report.decay = monitor.summary();
  report.samples = monitor.kept();
  report.initial_v = monitor.initial_v();
  report.gains.sigma = report.decay.sigma_estimate();

  std::ostringstream why;
  for (const auto& lc : report.layers) {
    if (lc.gamma_residual >= options.gamma_residual_tolerance) {
      why << "layer " << lc.layer << ": gamma residual " << lc.gamma_residual;
      break;
    }
    if (lc.r_positive > 0 || lc.r_zero_with_signal > 0) {
      why << "layer " << lc.layer << ": r not negative on " << lc.r_positive + lc.r_zero_with_signal
          << " samples";
      break;
    }
  }
  if (why.str().empty()) {
    if (!report.alpha_star_consistent)
      why << "alpha_star sampling " << report.alpha_star_sampled << " inconsistent with closed form "
          << closed;
    else if (report.bound_violations > 0)
      why << "W bounds violated on " << report.bound_violations << " samples";
    else if (!report.decay.holds())
      why << "dW/dt >= 0 on " << report.decay.violations << " of " << report.decay.checked
          << " samples";
  }
  report.failure = why.str();
  return report;
}

}  // namespace rendezvous
