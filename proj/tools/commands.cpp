#include "commands.hpp"

#include "rendezvous/certify.hpp"
#include "rendezvous/errors.hpp"
#include "rendezvous/io.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <functional>
#include <ostream>

namespace rendezvous::cli {

using nlohmann::json;

namespace {

std::filesystem::path base_dir(const Options& opts) {
  return opts.out_dir.value_or(std::filesystem::current_path());
}

int exit_code_for(const Error& e) {
  if (e.code() == ErrorCode::NonFiniteState) return kNonFiniteState;
  if (e.is_graph_error()) return kGraphError;
  return kSchemaError;
}

// Loads the scenario and runs `body`, mapping library errors onto exit codes.
int guarded(const std::filesystem::path& path, const Options& opts, std::ostream& err,
            const std::function<int(ScenarioFile&)>& body) {
  try {
    auto file = load_scenario(path, base_dir(opts));
    return body(file);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    spdlog::debug("{} ({})", e.what(), to_string(e.code()));
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kSchemaError;
  }
}

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

std::ofstream open_output(const std::filesystem::path& p) {
  ensure_parent(p);
  std::ofstream os(p);
  if (!os) throw std::filesystem::filesystem_error("cannot write output", p, std::error_code());
  return os;
}

json labels_of(const DiGraph& g, std::span<const int> nodes) {
  json arr = json::array();
  for (int v : nodes) arr.push_back(g.label(v));
  return arr;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

int cmd_run(const std::filesystem::path& scenario, const Options& opts, std::ostream& out,
            std::ostream& err) {
  return guarded(scenario, opts, err, [&](ScenarioFile& file) {
    auto& sc = file.scenario;
    if (!opts.k1.empty()) sc.params.k1 = opts.k1.front();
    const bool tree = has_reverse_spanning_tree(sc.graph).exists;
    if (!tree) spdlog::warn("sensor graph has no reverse directed spanning tree; no convergence guarantee");
    spdlog::info("running {} agents, dt={}, t_end={}, k1={}", sc.graph.size(), sc.dt, sc.t_end,
                 sc.params.k1);

    const auto traj = run(sc);

    {
      auto os = open_output(file.outputs.csv);
      write_trajectory_csv(os, traj, sc.graph);
    }
    {
      auto os = open_output(file.outputs.svg);
      write_trajectory_svg(os, traj, sc.graph);
    }
    json report = {
        {"converged", traj.converged},
        {"settle_time", nullable(traj.settle_time)},
        {"final_diameter", traj.diameters.back()},
        {"initial_diameter", traj.diameters.front()},
        {"max_diameter", traj.max_diameter},
        {"t_final", traj.times.back()},
        {"steps", traj.steps},
        {"has_reverse_spanning_tree", tree},
        {"controller", to_string(sc.controller)},
        {"k1", sc.params.k1},
    };
    if (!tree) report["warning"] = "no convergence guarantee";
    {
      auto os = open_output(file.outputs.report);
      os << report.dump(2) << '\n';
    }
    if (opts.json) {
      out << report.dump(2) << '\n';
    } else {
      out << "converged: " << (traj.converged ? "true" : "false") << '\n';
      if (traj.settle_time) out << "settle_time: " << format_double(*traj.settle_time) << '\n';
      out << "final_diameter: " << format_double(traj.diameters.back()) << '\n'
          << "has_reverse_spanning_tree: " << (tree ? "true" : "false") << '\n'
          << "wrote " << file.outputs.csv.string() << ", " << file.outputs.svg.string() << ", "
          << file.outputs.report.string() << '\n';
    }
    return kOk;
  });
}

int cmd_analyze_graph(const std::filesystem::path& scenario, const Options& opts,
                      std::ostream& out, std::ostream& err) {
  return guarded(scenario, opts, err, [&](ScenarioFile& file) {
    const auto& g = file.scenario.graph;
    const auto c = strongly_connected_components(g);
    const auto tree = has_reverse_spanning_tree(g);
    const auto L = weighted_laplacian(g);
    const int rank = numeric_rank(L);

    json doc;
    doc["n"] = g.size();
    json comps = json::array();
    for (const auto& comp : c.components) comps.push_back(labels_of(g, comp));
    doc["components"] = comps;
    json edges = json::array();
    for (const auto& [a, b] : c.dag_edges) edges.push_back({a, b});
    doc["condensation_edges"] = edges;
    doc["root_component"] = c.root ? json(*c.root) : json(nullptr);
    doc["has_reverse_spanning_tree"] = tree.exists;
    doc["root_node"] = tree.root ? json(g.label(*tree.root)) : json(nullptr);
    doc["laplacian_rank"] = rank;
    doc["acyclic"] = is_acyclic(c);
    if (c.root) {
      const auto layers = layer_sets(c);
      json ls = json::array();
      for (const auto& layer : layers.layers) ls.push_back(labels_of(g, layer));
      doc["layers"] = ls;
    } else {
      doc["layers"] = nullptr;
    }

    if (opts.json) {
      out << doc.dump(2) << '\n';
      return kOk;
    }
    auto set_str = [&](std::span<const int> nodes) {
      std::string s = "{";
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(g.label(nodes[k]));
      }
      return s + "}";
    };
    out << "nodes: " << g.size() << '\n';
    out << "strongly connected components: " << c.size() << '\n';
    for (int k = 0; k < c.size(); ++k) out << "  C" << k << " = " << set_str(c.components[k]) << '\n';
    out << "condensation edges:";
    if (c.dag_edges.empty()) out << " (none)";
    for (const auto& [a, b] : c.dag_edges) out << " C" << a << "->C" << b;
    out << '\n';
    out << "root component: " << (c.root ? "C" + std::to_string(*c.root) : std::string("none"))
        << '\n';
    if (c.root) {
      const auto layers = layer_sets(c);
      for (int k = 0; k <= layers.depth(); ++k)
        out << "  L" << k << " = " << set_str(layers.layers[k]) << '\n';
    }
    out << "reverse spanning tree: " << (tree.exists ? "true" : "false");
    if (tree.root) out << " (root node " << g.label(*tree.root) << ")";
    out << '\n' << "laplacian rank: " << rank << " of " << g.size() << '\n';
    return kOk;
  });
}

int cmd_certify(const std::filesystem::path& scenario, const Options& opts, std::ostream& out,
                std::ostream& err) {
  return guarded(scenario, opts, err, [&](ScenarioFile& file) {
    auto& sc = file.scenario;
    if (!opts.k1.empty()) sc.params.k1 = opts.k1.front();
    CertifyOptions co;
    co.seed = opts.seed.value_or(sc.seed);
    spdlog::info("certifying with k1={} over t_end={}", sc.params.k1, sc.t_end);
    const auto rep = certify(sc, co);
    const auto& g = sc.graph;

    json doc;
    doc["passed"] = rep.passed();
    doc["k1"] = sc.params.k1;
    doc["has_reverse_spanning_tree"] = rep.has_reverse_spanning_tree;
    if (!rep.passed()) doc["failure"] = rep.failure;
    doc["root_layer"] = labels_of(g, rep.root_layer);
    doc["gamma"] = rep.gains.gamma;
    doc["alpha_star"] = rep.gains.alpha_star;
    doc["alpha_star_sampled"] = rep.alpha_star_sampled;
    doc["alpha"] = rep.gains.alpha;
    doc["sigma_estimate"] = rep.gains.sigma;
    doc["w_bounds"] = {{"samples", rep.bound_samples}, {"violations", rep.bound_violations}};
    json layers = json::array();
    for (const auto& lc : rep.layers) {
      layers.push_back({{"layer", lc.layer},
                        {"A", labels_of(g, lc.A)},
                        {"B", labels_of(g, lc.B)},
                        {"gamma", lc.gamma},
                        {"gamma_residual", lc.gamma_residual},
                        {"alpha_star", lc.alpha_star},
                        {"r_samples", lc.r_samples},
                        {"r_positive", lc.r_positive},
                        {"r_zero_with_signal", lc.r_zero_with_signal},
                        {"r_max_normalized", lc.r_max_normalized}});
    }
    doc["layers"] = layers;
    doc["decay"] = {{"checked", rep.decay.checked},
                    {"violations", rep.decay.violations},
                    {"max_ratio", rep.decay.max_ratio},
                    {"v_floor", rep.decay.v_floor}};
    if (rep.decay.worst && !rep.decay.holds()) {
      const auto& w = *rep.decay.worst;
      doc["worst_violation"] = {{"t", w.t}, {"V", w.V}, {"W", w.W}, {"dWdt", w.dWdt}};
    }
    json samples = json::array();
    for (const auto& s : rep.samples)
      samples.push_back({{"t", s.t}, {"V", s.V}, {"W", s.W}, {"dWdt", s.dWdt}});
    doc["samples"] = samples;

    {
      auto os = open_output(file.outputs.report);
      os << doc.dump(2) << '\n';
    }
    if (opts.json) {
      out << doc.dump(2) << '\n';
    } else {
      out << "root layer gamma:";
      for (double v : rep.gains.gamma) out << ' ' << format_double(v);
      out << '\n'
          << "alpha_star: " << format_double(rep.gains.alpha_star)
          << " (sampled " << format_double(rep.alpha_star_sampled) << ")\n"
          << "alpha: " << format_double(rep.gains.alpha) << '\n'
          << "dW/dt checks: " << rep.decay.checked << " samples, " << rep.decay.violations
          << " violations, max (dW/dt)/V = " << format_double(rep.decay.max_ratio) << '\n'
          << "sigma_estimate: " << format_double(rep.gains.sigma) << '\n';
      if (rep.passed()) {
        out << "certificate: PASS\n";
      } else {
        out << "certificate: FAIL (" << rep.failure << ")\n";
        if (rep.decay.worst && !rep.decay.holds()) {
          const auto& w = *rep.decay.worst;
          out << "worst sample: t=" << format_double(w.t) << " V=" << format_double(w.V)
              << " dW/dt=" << format_double(w.dWdt) << '\n';
        }
      }
    }
    return rep.passed() ? kOk : kCertificateFailed;
  });
}

int cmd_sweep(const std::filesystem::path& scenario, const Options& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(scenario, opts, err, [&](ScenarioFile& file) {
    const auto& sc = file.scenario;
    std::vector<double> grid = opts.k1.empty() ? std::vector<double>{0.01, 0.1, 1.0, 10.0} : opts.k1;
    for (double k : grid)
      if (!(k >= 0.0)) throw Error(ErrorCode::Schema, "--k1: values must be >= 0");
    const int trials = opts.trials.value_or(20);
    if (trials < 1) throw Error(ErrorCode::Schema, "--trials: must be >= 1");
    const auto seed = opts.seed.value_or(sc.seed);
    spdlog::info("sweeping {} k1 values x {} trials (seed {})", grid.size(), trials, seed);

    const auto table = k1_sweep(sc, grid, trials, seed);
    {
      auto os = open_output(file.outputs.sweep_csv);
      write_sweep_csv(os, table);
    }
    if (opts.json) {
      json rows = json::array();
      for (const auto& r : table.rows)
        rows.push_back({{"k1", r.k1},
                        {"trials", r.trials},
                        {"successes", r.successes},
                        {"success_rate", r.success_rate},
                        {"mean_settle_time", nullable(r.mean_settle_time)}});
      out << json{{"rows", rows}, {"threshold", nullable(table.threshold)}}.dump(2) << '\n';
    } else {
      write_sweep_csv(out, table);
      out << "empirical threshold: "
          << (table.threshold ? format_double(*table.threshold) : std::string("none")) << '\n';
    }
    return kOk;
  });
}

}  // namespace rendezvous::cli
