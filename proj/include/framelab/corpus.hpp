#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "framelab/graph.hpp"

namespace framelab {

struct CorpusEntry {
  std::string label;
  Graph graph;
};

/// Connected graph on n vertices: a random recursive spanning tree plus each
/// remaining pair with probability p. Deterministic per seed.
inline Graph random_connected(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) edges.emplace_back(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng), v);
  std::bernoulli_distribution extra(p);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (extra(rng)) edges.emplace_back(u, v);
  return Graph(n, edges);
}

/// The built-in test corpus: paths, cycles, complete graphs and stars up to
/// 8 vertices, ten seeded random connected graphs, every unordered pair
/// (with repetition) of {P2, P3, K3, star4} as a disjoint union, and
/// P2 ⊔ P2 ⊔ K3. Entries above max_n are dropped.
inline std::vector<CorpusEntry> builtin_corpus(std::size_t max_n = 8) {
  std::vector<CorpusEntry> out;
  auto add = [&](std::string label, Graph g) {
    if (g.vertex_count() <= max_n) out.push_back({std::move(label), std::move(g)});
  };
  for (std::size_t n = 2; n <= 8; ++n) add("path:" + std::to_string(n), generate(GraphFamily::path, n));
  for (std::size_t n = 3; n <= 8; ++n) add("cycle:" + std::to_string(n), generate(GraphFamily::cycle, n));
  for (std::size_t n = 3; n <= 8; ++n) add("complete:" + std::to_string(n), generate(GraphFamily::complete, n));
  for (std::size_t n = 4; n <= 8; ++n) add("star:" + std::to_string(n), generate(GraphFamily::star, n));
  for (std::uint64_t s = 1; s <= 10; ++s) {
    std::mt19937_64 rng(s);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 8)(rng);
    add("random:" + std::to_string(s) + ":" + std::to_string(n), random_connected(n, 0.3, s * 7919));
  }
  const std::vector<std::string> parts{"path:2", "path:3", "complete:3", "star:4"};
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i; j < parts.size(); ++j) {
      const std::string spec = "union:" + parts[i] + "," + parts[j];
      add(spec, parse_generator_spec(spec));
    }
  add("union:path:2,path:2,complete:3", parse_generator_spec("union:path:2,path:2,complete:3"));
  return out;
}

}  // namespace framelab
