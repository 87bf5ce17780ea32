#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "graphscan/errors.hpp"
#include "graphscan/graph.hpp"
#include "graphscan/simulation.hpp"

namespace graphscan {

// Experiment config files are flat "key = value" lines; '#' starts a comment.
//
//   preset     = bbt-fig1 | lattice-fig1 | kron-fig1   (applied first)
//   family     = bbt | lattice | kron
//   depth      = tree depth                       (bbt)
//   side       = lattice side p                   (lattice)
//   periodic   = true | false                     (lattice)
//   base       = two-triangles | <edge-list path> (kron)
//   levels     = number of scales                 (kron)
//   bbt_root   = depth-2 subtree root, 3..6       (bbt cluster)
//   kron_half  = comma-separated base vertices    (kron cluster)
//   mu, delta, sigma
//   rho        = <c> | <c>/n | <c>/sqrt(n)
//   reps_null, reps_alt, seed
//   detectors  = comma-separated subset of sss,energy,edge,glr_exact,glr_unconstrained
//   connected  = true | false                     (glr_exact connectivity)

inline const std::map<std::string, std::string>& experiment_presets() {
  static const std::map<std::string, std::string> presets = {
      {"bbt-fig1",
       "family = bbt\ndepth = 7\nbbt_root = 3\nmu = 0\ndelta = 0.8\nsigma = 1\nrho = 4/n\n"
       "reps_null = 500\nreps_alt = 500\nseed = 1\ndetectors = sss,energy,edge,glr_unconstrained\n"},
      {"lattice-fig1",
       "family = lattice\nside = 16\nperiodic = false\nmu = 0\ndelta = 0.8\nsigma = 1\nrho = 4/sqrt(n)\n"
       "reps_null = 500\nreps_alt = 500\nseed = 1\ndetectors = sss,energy,edge,glr_unconstrained\n"},
      {"kron-fig1",
       "family = kron\nbase = two-triangles\nlevels = 2\nmu = 0\ndelta = 0.8\nsigma = 1\nrho = 4/n\n"
       "reps_null = 500\nreps_alt = 500\nseed = 1\ndetectors = sss,energy,edge,glr_unconstrained\n"},
  };
  return presets;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw FormatError(key + ": expected true or false, got '" + s + "'");
}

inline Index graph_size_of(const GraphSpec& spec) {
  if (const auto* b = std::get_if<BbtSpec>(&spec)) return (Index{1} << (b->depth + 1)) - 1;
  if (const auto* l = std::get_if<LatticeSpec>(&spec)) return l->side * l->side;
  const auto& k = std::get<KronSpec>(spec);
  Index n = 1;
  for (int i = 0; i < k.levels; ++i) n *= k.base.size();
  return n;
}

}  // namespace detail

/// Key/value lines collected from presets, files and overrides; later
/// assignments win.
class ConfigBuilder {
 public:
  void apply_preset(const std::string& name) {
    const auto& presets = experiment_presets();
    const auto it = presets.find(name);
    if (it == presets.end()) throw InvalidArgument("unknown preset '" + name + "'");
    apply_text(it->second, "preset " + name);
  }

  void apply_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw FormatError(source + " line " + std::to_string(lineno) + ": expected 'key = value'");
      }
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key == "preset") {
        apply_preset(value);
      } else {
        set(key, value);
      }
    }
  }

  void apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_text(buf.str(), path);
  }

  void set(const std::string& key, const std::string& value) {
    static const char* known[] = {"family", "depth", "side", "periodic", "base", "levels", "bbt_root", "kron_half",
                                  "mu", "delta", "sigma", "rho", "reps_null", "reps_alt", "seed", "detectors",
                                  "connected"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw FormatError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    const std::string family = get("family", "bbt");
    if (family == "bbt") {
      cfg.graph = BbtSpec{static_cast<int>(number("depth", 7))};
    } else if (family == "lattice") {
      cfg.graph = LatticeSpec{static_cast<Index>(number("side", 16)), detail::parse_bool(get("periodic", "false"), "periodic")};
    } else if (family == "kron") {
      KronSpec k;
      k.levels = static_cast<int>(number("levels", 2));
      k.base_label = get("base", "two-triangles");
      k.base = k.base_label == "two-triangles" ? two_triangles() : load_edge_list(k.base_label);
      cfg.graph = std::move(k);
    } else {
      throw FormatError("family: expected bbt, lattice or kron, got '" + family + "'");
    }
    cfg.cluster.bbt_root = static_cast<Index>(number("bbt_root", 3));
    for (const auto& v : detail::split_list(get("kron_half", ""))) {
      cfg.cluster.kron_half.push_back(parse_index(v, "kron_half"));
    }
    cfg.mu = number("mu", 0.0);
    cfg.delta = number("delta", 0.8);
    cfg.sigma = number("sigma", 1.0);
    cfg.rho = resolve_rho(get("rho", "4/n"), detail::graph_size_of(cfg.graph));
    cfg.reps_null = static_cast<Index>(number("reps_null", 500));
    cfg.reps_alt = static_cast<Index>(number("reps_alt", 500));
    cfg.seed = std::stoull(get("seed", "1"));
    cfg.detectors.clear();
    for (const auto& d : detail::split_list(get("detectors", "sss,energy,edge,glr_unconstrained"))) {
      cfg.detectors.push_back(parse_detector_kind(d));
    }
    cfg.require_connected = detail::parse_bool(get("connected", "false"), "connected");
    cfg.validate();
    return cfg;
  }

  /// "<c>", "<c>/n" or "<c>/sqrt(n)".
  static double resolve_rho(const std::string& text, Index n) {
    const double nd = static_cast<double>(n);
    auto coefficient = [&](std::size_t len) { return parse_double(text.substr(0, text.size() - len), "rho"); };
    const std::string per_sqrt = "/sqrt(n)";
    const std::string per_n = "/n";
    if (text.size() > per_sqrt.size() && text.compare(text.size() - per_sqrt.size(), per_sqrt.size(), per_sqrt) == 0) {
      return coefficient(per_sqrt.size()) / std::sqrt(nd);
    }
    if (text.size() > per_n.size() && text.compare(text.size() - per_n.size(), per_n.size(), per_n) == 0) {
      return coefficient(per_n.size()) / nd;
    }
    return parse_double(text, "rho");
  }

 private:
  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, key);
  }

  std::map<std::string, std::string> values_;
};

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Resolved configuration in the same "key = value" form as config files.
inline void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BbtSpec>) {
          out << "family = bbt\ndepth = " << s.depth << '\n' << "bbt_root = " << cfg.cluster.bbt_root << '\n';
        } else if constexpr (std::is_same_v<T, LatticeSpec>) {
          out << "family = lattice\nside = " << s.side << "\nperiodic = " << (s.periodic ? "true" : "false") << '\n';
        } else {
          out << "family = kron\nbase = " << s.base_label << "\nlevels = " << s.levels << '\n';
          if (!cfg.cluster.kron_half.empty()) {
            out << "kron_half = ";
            for (std::size_t i = 0; i < cfg.cluster.kron_half.size(); ++i) {
              out << (i ? "," : "") << cfg.cluster.kron_half[i];
            }
            out << '\n';
          }
        }
      },
      cfg.graph);
  out << "mu = " << fmt17(cfg.mu) << "\ndelta = " << fmt17(cfg.delta) << "\nsigma = " << fmt17(cfg.sigma)
      << "\nrho = " << fmt17(cfg.rho) << "\nreps_null = " << cfg.reps_null << "\nreps_alt = " << cfg.reps_alt
      << "\nseed = " << cfg.seed << "\ndetectors = ";
  for (std::size_t i = 0; i < cfg.detectors.size(); ++i) out << (i ? "," : "") << to_string(cfg.detectors[i]);
  out << "\nconnected = " << (cfg.require_connected ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------------------
// Reports

inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,size,power\n";
  for (const auto& p : curve.points) out << fmt17(p.threshold) << ',' << fmt17(p.size) << ',' << fmt17(p.power) << '\n';
}

struct NamedCurve {
  std::string name;
  RocCurve curve;
};

/// Power-versus-size plot: 640x480 viewport, 10% margins, one polyline per
/// curve over the unit square, with a legend.
inline void write_roc_svg(std::ostream& out, const std::vector<NamedCurve>& curves, const std::string& title = "") {
  constexpr double width = 640, height = 480;
  constexpr double left = 0.1 * width, right = 0.9 * width, top = 0.1 * height, bottom = 0.9 * height;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto px = [&](double s) { return left + s * (right - left); };
  auto py = [&](double p) { return bottom - p * (bottom - top); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n"
      << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left) << "\" height=\""
      << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(1)) << "\" y2=\"" << num(py(1))
      << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(bottom + 16) << "\" font-size=\"11\" text-anchor=\"middle\">"
        << num(t) << "</text>\n"
        << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(t) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
        << num(t) << "</text>\n";
  }
  out << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(bottom + 36)
      << "\" font-size=\"13\" text-anchor=\"middle\">size (false alarm rate)</text>\n"
      << "<text x=\"16\" y=\"" << num(0.5 * (top + bottom)) << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << num(0.5 * (top + bottom)) << ")\">power</text>\n";
  if (!title.empty()) {
    out << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(top - 14)
        << "\" font-size=\"14\" text-anchor=\"middle\">" << title << "</text>\n";
  }

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i].curve;
    std::vector<std::pair<double, double>> pts;
    double top_power = 0.0;
    double top_threshold = -HUGE_VAL;
    for (const auto& p : c.points) {
      pts.emplace_back(p.size, p.power);
      if (p.threshold > top_threshold) {
        top_threshold = p.threshold;
        top_power = p.power;
      }
    }
    pts.emplace_back(0.0, top_power);
    pts.emplace_back(1.0, 1.0);
    std::stable_sort(pts.begin(), pts.end());
    out << "<polyline fill=\"none\" stroke=\"" << palette[i % 6] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < pts.size(); ++j) out << (j ? " " : "") << num(px(pts[j].first)) << ',' << num(py(pts[j].second));
    out << "\"/>\n";
    const double ly = top + 18 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << num(right - 150) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(right - 125) << "\" y2=\""
        << num(ly) << "\" stroke=\"" << palette[i % 6] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(right - 118) << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">" << curves[i].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace graphscan
