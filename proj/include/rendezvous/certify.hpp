#pragma once

#include "rendezvous/lyapunov.hpp"
#include "rendezvous/sim.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rendezvous {

struct CertifyOptions {
  double alpha_factor = 3.0;               // alpha = factor * alpha_star
  std::size_t alpha_samples = 100000;      // sampled-supremum cross-check
  double alpha_sample_tolerance = 0.05;    // sampled >= (1 - tol) * closed form
  std::size_t bound_samples = 10000;
  std::size_t r_samples = 10000;
  double signal_floor = 1e-6;              // r must be < 0 once max |f_i| exceeds this
  double gamma_residual_tolerance = 1e-10;
  double v_floor_factor = 1e-9;
  std::size_t max_report_samples = 1000;
  std::uint64_t seed = 0;
};

struct LayerCertificate {
  int layer = 0;
  NodeSet A;  // Lbar_{k-1}
  NodeSet B;  // L_k
  std::vector<double> gamma;
  double gamma_residual = 0.0;
  double alpha_star = 0.0;
  std::size_t r_samples = 0;
  std::size_t r_positive = 0;         // samples with r > 0
  std::size_t r_zero_with_signal = 0; // r == 0 although some |f_i| > floor
  double r_max_normalized = 0.0;      // max of r / sum |f_i|^3 over samples

  bool passed(double residual_tol) const {
    return gamma_residual < residual_tol && r_positive == 0 && r_zero_with_signal == 0;
  }
};

struct CertifyReport {
  bool has_reverse_spanning_tree = false;
  NodeSet root_layer;
  CertificateGains gains;  // for the root layer, sigma filled from the run
  double alpha_star_sampled = 0.0;
  bool alpha_star_consistent = false;
  std::size_t bound_samples = 0;
  std::size_t bound_violations = 0;
  std::vector<LayerCertificate> layers;
  DecaySummary decay;
  std::vector<WdotSample> samples;
  double initial_v = 0.0;
  double residual_tolerance = 1e-10;
  std::string failure;  // first failing check, empty when everything passes

  bool passed() const { return failure.empty(); }
};

/// Runs every numerical certificate for `scenario`: per-layer gamma and the
/// sign of r, alpha_star closed form versus sampling, the two-sided
/// bounds on W, and dW/dt < 0 along the simulated run for the root layer
/// (where the A-driven term vanishes).
CertifyReport certify(const Scenario& scenario, const CertifyOptions& options = {});

}  // namespace rendezvous
