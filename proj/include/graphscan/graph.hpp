#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphscan/errors.hpp"

namespace graphscan {

using Index = std::size_t;

struct Edge {
  Index u;
  Index v;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted undirected simple graph. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  Graph(Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ == 0) throw InvalidArgument("graph must have at least one vertex");
    std::set<std::pair<Index, Index>> seen;
    for (const auto& e : edges_) {
      if (e.u >= n_ || e.v >= n_) {
        throw InvalidArgument("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") has a vertex id out of range for n=" + std::to_string(n_));
      }
      if (e.u == e.v) throw InvalidArgument("self-loop at vertex " + std::to_string(e.u));
      if (!(e.w > 0.0) || !std::isfinite(e.w)) {
        throw InvalidArgument("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") has non-positive weight");
      }
      auto key = std::minmax(e.u, e.v);
      if (!seen.insert({key.first, key.second}).second) {
        throw InvalidArgument("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      }
    }
    adjacency_.assign(n_, {});
    for (Index i = 0; i < edges_.size(); ++i) {
      adjacency_[edges_[i].u].push_back(i);
      adjacency_[edges_[i].v].push_back(i);
    }
  }

  Index size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Indices into edges() of the edges incident to v.
  const std::vector<Index>& incident(Index v) const { return adjacency_.at(v); }

  Index other_end(Index edge_index, Index v) const {
    const auto& e = edges_[edge_index];
    return e.u == v ? e.v : e.u;
  }

  /// Weighted degree, summed in edge-list order.
  double degree(Index v) const {
    double d = 0.0;
    for (Index i : adjacency_.at(v)) d += edges_[i].w;
    return d;
  }

  bool connected() const {
    std::vector<bool> mask(n_, true);
    return induces_connected(mask);
  }

  /// True if the vertices flagged in `mask` induce a connected subgraph.
  /// An empty mask counts as disconnected.
  bool induces_connected(const std::vector<bool>& mask) const {
    Index start = n_;
    Index count = 0;
    for (Index v = 0; v < n_; ++v) {
      if (mask[v]) {
        if (start == n_) start = v;
        ++count;
      }
    }
    if (count == 0) return false;
    std::vector<bool> seen(n_, false);
    std::vector<Index> stack{start};
    seen[start] = true;
    Index reached = 1;
    while (!stack.empty()) {
      Index v = stack.back();
      stack.pop_back();
      for (Index ei : adjacency_[v]) {
        Index w = other_end(ei, v);
        if (mask[w] && !seen[w]) {
          seen[w] = true;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == count;
  }

  /// Copy with every edge weight multiplied by `factor`.
  Graph scaled(double factor) const {
    std::vector<Edge> out = edges_;
    for (auto& e : out) e.w *= factor;
    return Graph(n_, std::move(out));
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
};

inline Graph build_graph(Index n, std::vector<Edge> edges) { return Graph(n, std::move(edges)); }

/// Nonempty proper vertex subset.
class Cluster {
 public:
  Cluster(Index n, std::vector<Index> members) : n_(n), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (members_.empty()) throw InvalidArgument("cluster is empty");
    if (members_.back() >= n_) throw InvalidArgument("cluster member out of range");
    if (members_.size() >= n_) throw InvalidArgument("cluster covers every vertex");
    mask_.assign(n_, false);
    for (Index v : members_) mask_[v] = true;
  }

  Index graph_size() const { return n_; }
  Index size() const { return members_.size(); }
  Index complement_size() const { return n_ - members_.size(); }
  const std::vector<Index>& members() const { return members_; }
  const std::vector<bool>& mask() const { return mask_; }
  bool contains(Index v) const { return mask_.at(v); }

  Eigen::VectorXd indicator() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (Index v : members_) x[static_cast<Eigen::Index>(v)] = 1.0;
    return x;
  }

 private:
  Index n_;
  std::vector<Index> members_;
  std::vector<bool> mask_;
};

/// L = D - W.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    lap(u, v) -= e.w;
    lap(v, u) -= e.w;
  }
  for (Index v = 0; v < g.size(); ++v) {
    lap(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) = g.degree(v);
  }
  return lap;
}

/// Total weight of edges with exactly one endpoint in the mask.
inline double boundary_weight(const Graph& g, const std::vector<bool>& mask) {
  double total = 0.0;
  for (const auto& e : g.edges()) {
    if (mask[e.u] != mask[e.v]) total += e.w;
  }
  return total;
}

/// s(C) = n * w(dC) / (|C| |C^c|). Class membership is s(C) <= rho.
inline double cut_sparsity(const Graph& g, const Cluster& c) {
  if (c.graph_size() != g.size()) throw InvalidArgument("cluster and graph sizes differ");
  const double n = static_cast<double>(g.size());
  return n * boundary_weight(g, c.mask()) /
         (static_cast<double>(c.size()) * static_cast<double>(c.complement_size()));
}

// ---------------------------------------------------------------------------
// Generators

/// Balanced binary tree of the given depth, level-order numbering (root 0,
/// children of v at 2v+1 and 2v+2).
inline Graph gen_bbt(int depth) {
  if (depth < 1) throw InvalidArgument("tree depth must be at least 1");
  const Index n = (Index{1} << (depth + 1)) - 1;
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (Index v = 1; v < n; ++v) edges.push_back({(v - 1) / 2, v, 1.0});
  return Graph(n, std::move(edges));
}

/// p x p grid (or torus when periodic), row-major numbering v = row * p + col.
inline Graph gen_lattice(Index p, bool periodic) {
  if (!periodic && p < 2) throw InvalidArgument("lattice side must be at least 2");
  if (periodic && p < 3) throw InvalidArgument("periodic lattice side must be at least 3");
  std::vector<Edge> edges;
  for (Index r = 0; r < p; ++r) {
    for (Index c = 0; c < p; ++c) {
      const Index v = r * p + c;
      if (c + 1 < p) {
        edges.push_back({v, v + 1, 1.0});
      } else if (periodic) {
        edges.push_back({v, r * p, 1.0});
      }
      if (r + 1 < p) {
        edges.push_back({v, v + p, 1.0});
      } else if (periodic) {
        edges.push_back({v, c, 1.0});
      }
    }
  }
  return Graph(p * p, std::move(edges));
}

/// Product graph on index pairs (i1, i2) -> i1 * n2 + i2. Edges join pairs
/// that agree in one coordinate and are adjacent in the other factor, with
/// that factor's weight. Its Laplacian is L1 (x) I + I (x) L2.
inline Graph kronecker_product(const Graph& g1, const Graph& g2) {
  const Index n1 = g1.size();
  const Index n2 = g2.size();
  std::vector<Edge> edges;
  edges.reserve(n1 * g2.edges().size() + n2 * g1.edges().size());
  for (Index i1 = 0; i1 < n1; ++i1) {
    for (const auto& e : g2.edges()) edges.push_back({i1 * n2 + e.u, i1 * n2 + e.v, e.w});
  }
  for (const auto& e : g1.edges()) {
    for (Index i2 = 0; i2 < n2; ++i2) edges.push_back({e.u * n2 + i2, e.v * n2 + i2, e.w});
  }
  return Graph(n1 * n2, std::move(edges));
}

/// (1/p^(l-1)) H (x) ... (x) (1/p) H (x) H. The leading (coarsest) factor
/// carries the smallest weights, so the coarsest index of vertex v is
/// v / p^(l-1).
inline Graph gen_kron_multiscale(const Graph& base, int levels) {
  if (levels < 1) throw InvalidArgument("kronecker levels must be at least 1");
  if (!base.connected()) throw InvalidArgument("kronecker base graph must be connected");
  const double p = static_cast<double>(base.size());
  Graph out = base.scaled(1.0 / std::pow(p, levels - 1));
  for (int j = levels - 2; j >= 0; --j) {
    out = kronecker_product(out, j == 0 ? base : base.scaled(1.0 / std::pow(p, j)));
  }
  return out;
}

inline Graph complete_graph(Index n) {
  std::vector<Edge> edges;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v) edges.push_back({u, v, 1.0});
  return Graph(n, std::move(edges));
}

inline Graph path_graph(Index n) {
  std::vector<Edge> edges;
  for (Index v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, 1.0});
  return Graph(n, std::move(edges));
}

/// Two triangles {0,1,2} and {3,4,5} joined by the edge (2,3).
inline Graph two_triangles() {
  return Graph(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}, {2, 3, 1.0}});
}

// ---------------------------------------------------------------------------
// Edge-list file: "n=<count>" then "u\tv\tw" lines. Weights are written in
// shortest round-trip form so read(write(g)) == g bit-for-bit.

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(what + ": cannot parse number '" + std::string(s) + "'");
  }
  return x;
}

inline Index parse_index(std::string_view s, const std::string& what) {
  Index x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(what + ": cannot parse vertex id '" + std::string(s) + "'");
  }
  return x;
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n=" << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.u << '\t' << e.v << '\t' << format_double(e.w) << '\n';
}

inline Graph read_edge_list(std::istream& in, const std::string& source = "edge list") {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("n=", 0) != 0) throw FormatError(source + ": first line must be 'n=<count>'");
  const Index n = parse_index(std::string_view(line).substr(2), source + " header");
  std::vector<Edge> edges;
  Index lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + " line " + std::to_string(lineno);
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw FormatError(where + ": expected 'u<TAB>v<TAB>w'");
    std::string_view sv(line);
    edges.push_back({parse_index(sv.substr(0, t1), where), parse_index(sv.substr(t1 + 1, t2 - t1 - 1), where),
                     parse_double(sv.substr(t2 + 1), where)});
  }
  try {
    return Graph(n, std::move(edges));
  } catch (const InvalidArgument& e) {
    throw FormatError(source + ": " + e.what());
  }
}

inline void save_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_edge_list(out, g);
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_edge_list(in, path);
}

}  // namespace graphscan
