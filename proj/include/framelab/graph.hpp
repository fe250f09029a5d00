#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/matrix.hpp"

namespace framelab {

/// Undirected edge between 0-indexed vertices, stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;

/// Simple undirected graph on vertices 0..n-1.
///
/// Edge lists at the text/JSON boundary are 1-indexed; everything inside
/// the library is 0-indexed. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Throws InputError on self-loops or out-of-range endpoints. Duplicate
  /// edges (in either orientation) collapse to one.
  Graph(std::size_t n, const std::vector<Edge>& edges) : n_(n) {
    if (n == 0) throw InputError("graph must have at least one vertex");
    std::set<Edge> unique;
    for (auto [u, v] : edges) {
      if (u >= n || v >= n)
        throw InputError("vertex index out of range: {" + std::to_string(u + 1) + "," +
                         std::to_string(v + 1) + "} with n = " + std::to_string(n));
      if (u == v) throw InputError("self-loop at vertex " + std::to_string(u + 1));
      unique.insert(std::minmax(u, v));
    }
    edges_.assign(unique.begin(), unique.end());
    components_ = compute_components();
  }

  std::size_t vertex_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Maximal connected vertex sets, ordered by smallest member, each ascending.
  const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }
  std::size_t component_count() const noexcept { return components_.size(); }
  bool connected() const noexcept { return components_.size() == 1; }

  /// Index into components() of the component holding vertex v.
  std::size_t component_of(std::size_t v) const { return component_index_.at(v); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::vector<std::size_t>> compute_components() {
    std::vector<std::size_t> parent(n_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto [u, v] : edges_) {
      auto ru = find(u), rv = find(v);
      if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
    }
    std::vector<std::vector<std::size_t>> comps;
    component_index_.assign(n_, 0);
    std::vector<std::size_t> slot(n_, n_);
    // Vertices are visited in ascending order, so components come out sorted
    // by their smallest vertex and each member list is ascending.
    for (std::size_t v = 0; v < n_; ++v) {
      auto root = find(v);
      if (slot[root] == n_) {
        slot[root] = comps.size();
        comps.emplace_back();
      }
      comps[slot[root]].push_back(v);
      component_index_[v] = slot[root];
    }
    return comps;
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> components_;
  std::vector<std::size_t> component_index_;
};

/// Adjacency, degree and Laplacian matrices of a graph, in exact integers.
struct LaplacianBundle {
  IntMatrix adjacency;
  IntMatrix degree;
  IntMatrix laplacian;
};

inline LaplacianBundle laplacian_bundle(const Graph& g) {
  const auto n = g.vertex_count();
  LaplacianBundle b{IntMatrix(n, n), IntMatrix(n, n), IntMatrix(n, n)};
  for (auto [u, v] : g.edges()) {
    b.adjacency(u, v) = b.adjacency(v, u) = 1;
    ++b.degree(u, u);
    ++b.degree(v, v);
  }
  b.laplacian = b.degree - b.adjacency;
  return b;
}

inline Matrix laplacian_matrix(const Graph& g) { return laplacian_bundle(g).laplacian.cast<double>(); }

/// Relabels g2's vertices to follow g1's.
inline Graph disjoint_union(const Graph& g1, const Graph& g2) {
  std::vector<Edge> edges = g1.edges();
  const auto shift = g1.vertex_count();
  for (auto [u, v] : g2.edges()) edges.emplace_back(u + shift, v + shift);
  return Graph(g1.vertex_count() + g2.vertex_count(), edges);
}

enum class GraphFamily { path, cycle, complete, star, empty };

inline std::string to_string(GraphFamily f) {
  switch (f) {
    case GraphFamily::path: return "path";
    case GraphFamily::cycle: return "cycle";
    case GraphFamily::complete: return "complete";
    case GraphFamily::star: return "star";
    case GraphFamily::empty: return "empty";
  }
  return "?";
}

inline GraphFamily parse_family(std::string_view name) {
  if (name == "path") return GraphFamily::path;
  if (name == "cycle") return GraphFamily::cycle;
  if (name == "complete") return GraphFamily::complete;
  if (name == "star") return GraphFamily::star;
  if (name == "empty") return GraphFamily::empty;
  throw InputError("unknown graph family '" + std::string(name) + "'");
}

/// Standard named graphs. The star's centre is vertex 1.
inline Graph generate(GraphFamily family, std::size_t n) {
  const std::size_t minimum = family == GraphFamily::cycle ? 3 : 1;
  if (n < minimum)
    throw InputError(to_string(family) + " graph needs n >= " + std::to_string(minimum));
  std::vector<Edge> edges;
  switch (family) {
    case GraphFamily::path:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphFamily::cycle:
      for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      break;
    case GraphFamily::complete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case GraphFamily::star:
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case GraphFamily::empty:
      break;
  }
  return Graph(n, edges);
}

namespace detail {

inline std::size_t parse_index(std::string_view tok, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw InputError("line " + std::to_string(line_no) + ": unparsable token '" + std::string(tok) + "'");
  return value;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses the edge-list text format: the first non-comment line holds n,
/// each following line "u v" with 1-indexed endpoints. Text after '#' is a
/// comment; blank lines are skipped.
inline Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (!have_n) {
      if (toks.size() != 1) throw InputError("line " + std::to_string(line_no) + ": expected vertex count");
      n = detail::parse_index(toks[0], line_no);
      if (n == 0) throw InputError("vertex count must be positive");
      have_n = true;
      continue;
    }
    if (toks.size() != 2)
      throw InputError("line " + std::to_string(line_no) + ": expected 'u v'");
    auto u = detail::parse_index(toks[0], line_no);
    auto v = detail::parse_index(toks[1], line_no);
    if (u < 1 || v < 1 || u > n || v > n)
      throw InputError("line " + std::to_string(line_no) + ": vertex index out of range");
    if (u == v) throw InputError("line " + std::to_string(line_no) + ": self-loop at vertex " + std::to_string(u));
    edges.emplace_back(u - 1, v - 1);
  }
  if (!have_n) throw InputError("edge list is missing the vertex count");
  return Graph(n, edges);
}

/// Inverse of parse_edge_list.
inline std::string to_edge_list(const Graph& g) {
  std::string out = std::to_string(g.vertex_count()) + "\n";
  for (auto [u, v] : g.edges()) out += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  return out;
}

/// Generator mini-language: "family:n" or "union:spec,spec,...".
inline Graph parse_generator_spec(std::string_view spec) {
  constexpr std::string_view union_prefix = "union:";
  if (spec.starts_with(union_prefix)) {
    auto rest = spec.substr(union_prefix.size());
    std::optional<Graph> acc;
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      auto part = rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (part.empty()) throw InputError("empty member in union spec");
      Graph g = parse_generator_spec(part);
      acc = acc ? disjoint_union(*acc, g) : g;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!acc) throw InputError("union spec has no members");
    return *acc;
  }
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InputError("generator spec must look like family:n");
  auto count = spec.substr(colon + 1);
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
  if (ec != std::errc{} || ptr != count.data() + count.size() || count.empty())
    throw InputError("bad vertex count in generator spec '" + std::string(spec) + "'");
  return generate(parse_family(spec.substr(0, colon)), n);
}

}  // namespace framelab
