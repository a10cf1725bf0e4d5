#include "rendezvous/io.hpp"

#include "rendezvous/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

namespace rendezvous {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Schema, field + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) schema_error(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(join(path, key), "expected a finite number");
  return d;
}

double optional_number(const json& obj, const std::string& key, const std::string& path,
                       double fallback) {
  if (!obj.contains(key)) return fallback;
  return require_number(obj, key, path);
}

int require_int(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) schema_error(join(path, key), "expected an integer");
  return v.get<int>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

double parse_angle(const json& value, const std::string& field) {
  if (value.is_number()) {
    const double d = value.get<double>();
    if (!std::isfinite(d)) schema_error(field, "expected a finite angle");
    return d;
  }
  if (!value.is_string()) schema_error(field, "expected a number or a string like \"k*pi/m\"");
  const std::string text = value.get<std::string>();
  static const std::regex pi_form(
      R"(^\s*([+-])?\s*(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$)");
  static const std::regex plain(R"(^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, pi_form)) {
    const double sign = m[1].matched && m[1].str() == "-" ? -1.0 : 1.0;
    const double k = m[2].matched ? std::stod(m[2].str()) : 1.0;
    const double d = m[3].matched ? std::stod(m[3].str()) : 1.0;
    if (d == 0.0) schema_error(field, "zero denominator in \"" + text + "\"");
    return sign * k * std::numbers::pi / d;
  }
  if (std::regex_match(text, plain)) return std::stod(text);
  schema_error(field, "cannot parse angle \"" + text + "\"");
}

ScenarioFile parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) schema_error("(root)", "expected an object");

  // Schema pass: every field is checked before the graph is built.
  const auto& graph = require(doc, "graph", "");
  const int n = require_int(graph, "n", "graph");
  if (n < 1) schema_error("graph.n", "must be >= 1");

  std::vector<int> labels;
  if (graph.contains("labels")) {
    const auto& arr = graph["labels"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
      schema_error("graph.labels", "expected an array of n integers");
    std::set<int> seen;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      if (!arr[k].is_number_integer())
        schema_error("graph.labels[" + std::to_string(k) + "]", "expected an integer");
      labels.push_back(arr[k].get<int>());
      if (!seen.insert(labels.back()).second)
        schema_error("graph.labels[" + std::to_string(k) + "]", "duplicate label");
    }
  } else {
    for (int i = 1; i <= n; ++i) labels.push_back(i);
  }
  std::map<int, int> index_of;
  for (int k = 0; k < n; ++k) index_of[labels[k]] = k;

  const auto& edges_json = require(graph, "edges", "graph");
  if (!edges_json.is_array()) schema_error("graph.edges", "expected an array");
  std::vector<WeightedEdge> edges;
  for (std::size_t k = 0; k < edges_json.size(); ++k) {
    const std::string path = "graph.edges[" + std::to_string(k) + "]";
    const auto& e = edges_json[k];
    const int from = require_int(e, "from", path);
    const int to = require_int(e, "to", path);
    const double w = require_number(e, "weight", path);
    auto fi = index_of.find(from);
    auto ti = index_of.find(to);
    if (fi == index_of.end())
      throw Error(ErrorCode::IndexOutOfRange, path + ".from: unknown node " + std::to_string(from));
    if (ti == index_of.end())
      throw Error(ErrorCode::IndexOutOfRange, path + ".to: unknown node " + std::to_string(to));
    edges.push_back({fi->second, ti->second, w});
  }

  const auto& agents = require(doc, "agents", "");
  if (!agents.is_array()) schema_error("agents", "expected an array");
  if (static_cast<int>(agents.size()) != n)
    schema_error("agents", "expected " + std::to_string(n) + " agents, got " +
                               std::to_string(agents.size()));
  SwarmState initial;
  initial.agents.resize(n);
  std::vector<char> placed(n, 0);
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const std::string path = "agents[" + std::to_string(k) + "]";
    const auto& a = agents[k];
    int slot = static_cast<int>(k);
    if (a.is_object() && a.contains("id")) {
      const int id = require_int(a, "id", path);
      auto it = index_of.find(id);
      if (it == index_of.end()) schema_error(path + ".id", "unknown agent " + std::to_string(id));
      slot = it->second;
    }
    if (placed[slot]) schema_error(path, "agent " + std::to_string(labels[slot]) + " listed twice");
    placed[slot] = 1;
    const double x = require_number(a, "x", path);
    const double y = require_number(a, "y", path);
    const double theta = parse_angle(require(a, "theta", path), path + ".theta");
    initial.agents[slot] = {Vec2(x, y), theta};
  }

  const auto& control = require(doc, "control", "");
  const double k1 = require_number(control, "k1", "control");
  if (k1 < 0.0) schema_error("control.k1", "must be >= 0");
  ControllerKind kind = ControllerKind::Ccp;
  if (control.contains("controller")) {
    if (!control["controller"].is_string()) schema_error("control.controller", "expected a string");
    kind = controller_from_string(control["controller"].get<std::string>());
  }

  const auto& sim = require(doc, "sim", "");
  const double dt = require_number(sim, "dt", "sim");
  const double t_end = require_number(sim, "t_end", "sim");
  const double tol = require_number(sim, "tol", "sim");
  std::uint64_t seed = 0;
  if (sim.contains("seed")) {
    if (!sim["seed"].is_number_unsigned()) schema_error("sim.seed", "expected a non-negative integer");
    seed = sim["seed"].get<std::uint64_t>();
  }
  const double record_interval = optional_number(sim, "record_interval", "sim", 0.0);

  OutputPaths out;
  out.csv = base_dir / "trajectory.csv";
  out.svg = base_dir / "trajectory.svg";
  out.report = base_dir / "report.json";
  out.sweep_csv = base_dir / "sweep.csv";
  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    if (!o.is_object()) schema_error("outputs", "expected an object");
    auto path_field = [&](const char* key, std::filesystem::path& dst) {
      if (!o.contains(key)) return;
      if (!o[key].is_string()) schema_error(std::string("outputs.") + key, "expected a string");
      dst = resolve(base_dir, o[key].get<std::string>());
    };
    path_field("csv_path", out.csv);
    path_field("svg_path", out.svg);
    path_field("report_path", out.report);
    path_field("sweep_csv_path", out.sweep_csv);
  }

  ScenarioFile file;
  file.scenario.graph = build_digraph(n, edges, labels);
  file.scenario.initial = std::move(initial);
  file.scenario.params.k1 = k1;
  file.scenario.controller = kind;
  file.scenario.dt = dt;
  file.scenario.t_end = t_end;
  file.scenario.rendezvous_tol = tol;
  file.scenario.seed = seed;
  file.scenario.record_interval = record_interval;
  file.scenario.validate();
  file.outputs = std::move(out);
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path,
                           const std::filesystem::path& base_dir) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Schema, path.string() + ": cannot open file");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, path.string() + ": invalid JSON: " + e.what());
  }
  return parse_scenario(doc, base_dir);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const DiGraph& g) {
  os << "t,agent,x,y,theta,u,omega,diameter\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& s = traj.states[k];
    for (int i = 0; i < s.size(); ++i) {
      const auto& a = s.agents[i];
      const auto& c = traj.inputs[k][i];
      os << format_double(traj.times[k]) << ',' << g.label(i) << ',' << format_double(a.x.x())
         << ',' << format_double(a.x.y()) << ',' << format_double(wrap_angle(a.theta)) << ','
         << format_double(c.u) << ',' << format_double(c.omega) << ','
         << format_double(traj.diameters[k]) << '\n';
    }
  }
}

void write_trajectory_svg(std::ostream& os, const Trajectory& traj, const DiGraph& g) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const int n = g.size();
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : traj.states)
    for (const auto& a : s.agents) {
      if (first) {
        xmin = xmax = a.x.x();
        ymin = ymax = a.x.y();
        first = false;
      }
      xmin = std::min(xmin, a.x.x());
      xmax = std::max(xmax, a.x.x());
      ymin = std::min(ymin, a.x.y());
      ymax = std::max(ymax, a.x.y());
    }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double plot = 600.0, margin = 40.0, legend_w = 220.0;
  const double scale = plot / span;
  auto px = [&](const Vec2& p) {
    return std::pair{margin + (p.x() - xmin) * scale, margin + plot - (p.y() - ymin) * scale};
  };

  const double width = plot + 2 * margin + legend_w;
  const double height = plot + 2 * margin;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";

  for (int i = 0; i < n; ++i) {
    const char* color = palette[i % 10];
    os << "<polyline id=\"agent-" << g.label(i) << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t m = traj.states.size();
    const std::size_t stride = std::max<std::size_t>(1, m / 4000);
    for (std::size_t k = 0; k < m; k += stride) {
      auto [x, y] = px(traj.states[k].agents[i].x);
      os << x << ',' << y << ' ';
    }
    if (m > 0 && (m - 1) % stride != 0) {
      auto [x, y] = px(traj.states.back().agents[i].x);
      os << x << ',' << y;
    }
    os << "\"/>\n";
    if (!traj.states.empty()) {
      auto [sx, sy] = px(traj.states.front().agents[i].x);
      auto [ex, ey] = px(traj.states.back().agents[i].x);
      os << "<circle cx=\"" << sx << "\" cy=\"" << sy << "\" r=\"4\" fill=\"" << color
         << "\"/>\n";
      os << "<rect x=\"" << ex - 3 << "\" y=\"" << ey - 3 << "\" width=\"6\" height=\"6\" fill=\""
         << color << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
      os << "<text x=\"" << sx + 6 << "\" y=\"" << sy - 6
         << "\" font-family=\"sans-serif\" font-size=\"12\">" << g.label(i) << "</text>\n";
    }
  }

  const double lx = plot + 2 * margin;
  double ly = margin;
  os << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << lx << "\" y=\"" << ly << "\" font-weight=\"bold\">agents</text>\n";
  for (int i = 0; i < n; ++i) {
    ly += 16;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 20 << "\" y2=\""
       << ly - 4 << "\" stroke=\"" << palette[i % 10] << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << lx + 26 << "\" y=\"" << ly << "\">" << g.label(i) << "</text>\n";
  }
  ly += 24;
  os << "<text x=\"" << lx << "\" y=\"" << ly
     << "\" font-weight=\"bold\">sensor graph (i senses j)</text>\n";
  for (const auto& e : g.edges()) {
    ly += 16;
    os << "<text x=\"" << lx << "\" y=\"" << ly << "\">" << g.label(e.from) << " &#8594; "
       << g.label(e.to) << "  a=" << e.weight << "</text>\n";
  }
  ly += 24;
  os << "<text x=\"" << lx << "\" y=\"" << ly << "\">circle: start, square: end</text>\n";
  os << "</g>\n</svg>\n";
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << "k1,trials,successes,success_rate,mean_settle_time\n";
  for (const auto& row : table.rows) {
    os << format_double(row.k1) << ',' << row.trials << ',' << row.successes << ','
       << format_double(row.success_rate) << ','
       << (row.mean_settle_time ? format_double(*row.mean_settle_time) : std::string("nan"))
       << '\n';
  }
}

}  // namespace rendezvous
