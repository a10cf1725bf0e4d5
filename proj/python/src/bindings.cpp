#include "rendezvous/certify.hpp"
#include "rendezvous/digraph.hpp"
#include "rendezvous/errors.hpp"
#include "rendezvous/io.hpp"
#include "rendezvous/lyapunov.hpp"
#include "rendezvous/sim.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <tuple>

namespace py = pybind11;
using namespace rendezvous;

namespace {

// Python uses display labels (1-based by default) for nodes, like the CLI.
NodeSet to_indices(const DiGraph& g, const std::vector<int>& labels) {
  NodeSet out;
  for (int l : labels) {
    const auto& all = g.labels();
    auto it = std::find(all.begin(), all.end(), l);
    if (it == all.end()) throw Error(ErrorCode::IndexOutOfRange, "unknown node " + std::to_string(l));
    out.push_back(static_cast<int>(it - all.begin()));
  }
  return out;
}

std::vector<int> to_labels(const DiGraph& g, const NodeSet& nodes) {
  std::vector<int> out;
  for (int v : nodes) out.push_back(g.label(v));
  return out;
}

std::vector<std::vector<int>> to_labels(const DiGraph& g, const std::vector<NodeSet>& sets) {
  std::vector<std::vector<int>> out;
  for (const auto& s : sets) out.push_back(to_labels(g, s));
  return out;
}

// (n, 3) array of x, y, theta.
SwarmState state_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("state must have shape (n, 3)");
  auto r = a.unchecked<2>();
  SwarmState s;
  for (py::ssize_t i = 0; i < r.shape(0); ++i) s.agents.push_back({Vec2(r(i, 0), r(i, 1)), r(i, 2)});
  return s;
}

py::array_t<double> state_to_array(const SwarmState& s) {
  py::array_t<double> a({static_cast<py::ssize_t>(s.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (int i = 0; i < s.size(); ++i) {
    w(i, 0) = s.agents[i].x.x();
    w(i, 1) = s.agents[i].x.y();
    w(i, 2) = s.agents[i].theta;
  }
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unicycle rendezvous core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<DiGraph>(m, "DiGraph")
      .def_property_readonly("n", &DiGraph::size)
      .def_property_readonly("labels", &DiGraph::labels)
      .def_property_readonly("edges",
                             [](const DiGraph& g) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& e : g.edges())
                                 out.emplace_back(g.label(e.from), g.label(e.to), e.weight);
                               return out;
                             })
      .def("neighbors",
           [](const DiGraph& g, int label) {
             const int i = to_indices(g, {label})[0];
             return to_labels(g, NodeSet(g.neighbors(i).begin(), g.neighbors(i).end()));
           })
      .def("out_weight", [](const DiGraph& g, int label) { return g.out_weight(to_indices(g, {label})[0]); });

  m.def(
      "build_digraph",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges, std::vector<int> labels) {
        if (labels.empty())
          for (int i = 1; i <= n; ++i) labels.push_back(i);
        if (static_cast<int>(labels.size()) != n) throw py::value_error("labels must have n entries");
        std::vector<WeightedEdge> out;
        for (const auto& [from, to, w] : edges) {
          auto index = [&](int l) {
            auto it = std::find(labels.begin(), labels.end(), l);
            if (it == labels.end())
              throw Error(ErrorCode::IndexOutOfRange, "edge endpoint " + std::to_string(l) + " out of range");
            return static_cast<int>(it - labels.begin());
          };
          out.push_back({index(from), index(to), w});
        }
        return build_digraph(n, out, labels);
      },
      py::arg("n"), py::arg("edges"), py::arg("labels") = std::vector<int>{},
      "Build a sensor digraph from (from, to, weight) triples using 1-based labels.");

  m.def("weighted_laplacian", &weighted_laplacian);
  m.def(
      "has_reverse_spanning_tree",
      [](const DiGraph& g) -> std::pair<bool, std::optional<int>> {
        const auto r = has_reverse_spanning_tree(g);
        return {r.exists, r.root ? std::optional<int>(g.label(*r.root)) : std::nullopt};
      },
      "Returns (exists, root label).");

  py::class_<Condensation>(m, "Condensation")
      .def_readonly("dag_edges", &Condensation::dag_edges)
      .def_readonly("root", &Condensation::root)
      .def_property_readonly("size", &Condensation::size);
  py::class_<LayerDecomposition>(m, "LayerDecomposition")
      .def_property_readonly("depth", &LayerDecomposition::depth);

  m.def(
      "strongly_connected_components",
      [](const DiGraph& g) { return to_labels(g, strongly_connected_components(g).components); },
      "Components as lists of labels, ordered by smallest member.");
  m.def(
      "layer_sets",
      [](const DiGraph& g) {
        const auto d = layer_sets(strongly_connected_components(g));
        return std::make_pair(to_labels(g, d.layers), to_labels(g, d.cumulative));
      },
      "Returns (layers, cumulative layers) as label lists.");

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("graph", &Scenario::graph)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("t_end", &Scenario::t_end)
      .def_readwrite("rendezvous_tol", &Scenario::rendezvous_tol)
      .def_readwrite("record_interval", &Scenario::record_interval)
      .def_readwrite("seed", &Scenario::seed)
      .def_property(
          "k1", [](const Scenario& s) { return s.params.k1; },
          [](Scenario& s, double k1) { s.params.k1 = k1; })
      .def_property(
          "controller", [](const Scenario& s) { return std::string(to_string(s.controller)); },
          [](Scenario& s, const std::string& name) { s.controller = controller_from_string(name); })
      .def_property(
          "initial", [](const Scenario& s) { return state_to_array(s.initial); },
          [](Scenario& s, const py::array_t<double>& a) { s.initial = state_from_array(a); });

  m.def(
      "make_scenario",
      [](const DiGraph& g, const py::array_t<double>& initial, double k1, double dt, double t_end,
         double tol, const std::string& controller) {
        Scenario sc;
        sc.graph = g;
        sc.initial = state_from_array(initial);
        sc.params.k1 = k1;
        sc.dt = dt;
        sc.t_end = t_end;
        sc.rendezvous_tol = tol;
        sc.controller = controller_from_string(controller);
        sc.validate();
        return sc;
      },
      py::arg("graph"), py::arg("initial"), py::arg("k1") = 1.0, py::arg("dt") = 1e-3,
      py::arg("t_end") = 10.0, py::arg("tol") = 0.01, py::arg("controller") = "ccp");
  m.def(
      "load_scenario",
      [](const std::filesystem::path& p) { return load_scenario(p, p.parent_path()).scenario; },
      py::arg("path"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("diameters", &Trajectory::diameters)
      .def_readonly("converged", &Trajectory::converged)
      .def_readonly("settle_time", &Trajectory::settle_time)
      .def_readonly("has_reverse_spanning_tree", &Trajectory::has_reverse_spanning_tree)
      .def_readonly("steps", &Trajectory::steps)
      .def_readonly("max_diameter", &Trajectory::max_diameter)
      .def_property_readonly("states",
                             [](const Trajectory& t) {
                               py::array_t<double> a({static_cast<py::ssize_t>(t.states.size()),
                                                      static_cast<py::ssize_t>(t.states.empty() ? 0 : t.states[0].size()),
                                                      py::ssize_t{3}});
                               auto w = a.mutable_unchecked<3>();
                               for (std::size_t k = 0; k < t.states.size(); ++k)
                                 for (int i = 0; i < t.states[k].size(); ++i) {
                                   w(k, i, 0) = t.states[k].agents[i].x.x();
                                   w(k, i, 1) = t.states[k].agents[i].x.y();
                                   w(k, i, 2) = t.states[k].agents[i].theta;
                                 }
                               return a;
                             })
      .def("__len__", &Trajectory::size);

  m.def(
      "run", [](const Scenario& sc) { return run(sc); }, py::arg("scenario"),
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "diameter", [](const py::array_t<double>& s) { return diameter(state_from_array(s)); },
      py::arg("state"));
  m.def(
      "random_initial_state",
      [](int n, std::uint64_t seed, double half_width) {
        return state_to_array(random_initial_state(n, seed, half_width));
      },
      py::arg("n"), py::arg("seed"), py::arg("half_width") = 50.0);
  m.def(
      "consensus_field",
      [](int label, const py::array_t<double>& s, const DiGraph& g) {
        return Eigen::Vector2d(consensus_field(to_indices(g, {label})[0], state_from_array(s), g));
      },
      py::arg("label"), py::arg("state"), py::arg("graph"));

  m.def(
      "chi_transform",
      [](const py::array_t<double>& s, const DiGraph& g) {
        const auto chi = chi_transform(state_from_array(s), g);
        Eigen::MatrixXd X(chi.X.size(), 2);
        for (std::size_t i = 0; i < chi.X.size(); ++i) X.row(i) = chi.X[i].transpose();
        return std::make_pair(X, Eigen::Vector2d(chi.xbar));
      },
      py::arg("state"), py::arg("graph"), "Returns (X as (n, 2), xbar).");
  m.def(
      "compute_gamma",
      [](const DiGraph& g, const std::vector<int>& B) { return compute_gamma(g, to_indices(g, B)); },
      py::arg("graph"), py::arg("B"));
  m.def(
      "compute_alpha_star",
      [](const DiGraph& g, const std::vector<int>& B, const std::vector<double>& gamma) {
        return compute_alpha_star(g, to_indices(g, B), gamma);
      },
      py::arg("graph"), py::arg("B"), py::arg("gamma"));

  py::class_<SweepTable>(m, "SweepTable")
      .def_readonly("threshold", &SweepTable::threshold)
      .def_property_readonly("rows", [](const SweepTable& t) {
        py::list rows;
        for (const auto& r : t.rows)
          rows.append(py::dict(py::arg("k1") = r.k1, py::arg("trials") = r.trials,
                               py::arg("successes") = r.successes,
                               py::arg("success_rate") = r.success_rate,
                               py::arg("mean_settle_time") = r.mean_settle_time));
        return rows;
      });
  m.def(
      "k1_sweep",
      [](const Scenario& sc, const std::vector<double>& grid, int trials, std::uint64_t seed) {
        py::gil_scoped_release release;
        return k1_sweep(sc, grid, trials, seed);
      },
      py::arg("scenario"), py::arg("k1_grid"), py::arg("trials"), py::arg("seed") = 0);

  py::class_<CertifyReport>(m, "CertifyReport")
      .def_property_readonly("passed", &CertifyReport::passed)
      .def_readonly("failure", &CertifyReport::failure)
      .def_readonly("has_reverse_spanning_tree", &CertifyReport::has_reverse_spanning_tree)
      .def_property_readonly("gamma", [](const CertifyReport& r) { return r.gains.gamma; })
      .def_property_readonly("alpha_star", [](const CertifyReport& r) { return r.gains.alpha_star; })
      .def_property_readonly("alpha", [](const CertifyReport& r) { return r.gains.alpha; })
      .def_property_readonly("sigma_estimate", [](const CertifyReport& r) { return r.decay.sigma_estimate(); })
      .def_property_readonly("decay_violations", [](const CertifyReport& r) { return r.decay.violations; });
  m.def(
      "certify",
      [](const Scenario& sc, std::uint64_t seed) {
        CertifyOptions opts;
        opts.seed = seed;
        py::gil_scoped_release release;
        return certify(sc, opts);
      },
      py::arg("scenario"), py::arg("seed") = 0);
}
