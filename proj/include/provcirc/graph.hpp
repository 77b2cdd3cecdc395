#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "provcirc/datalog.hpp"

namespace provcirc {

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::string label;
  /// Provenance variable of the edge fact `label(src,dst)`.
  FactVar var = 0;
};

/// Directed multigraph with named vertices and labeled, variable-carrying edges.
class Graph {
 public:
  /// Returns the id of `name`, adding the vertex if needed.
  std::size_t vertex(std::string_view name);
  [[nodiscard]] std::optional<std::size_t> find_vertex(std::string_view name) const;
  [[nodiscard]] const std::string& name(std::size_t v) const { return names_.at(v); }

  std::size_t add_edge(std::size_t src, std::size_t dst, std::string label, FactVar var);

  [[nodiscard]] std::size_t num_vertices() const { return names_.size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_.at(e); }
  [[nodiscard]] const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_.at(v); }
  [[nodiscard]] const std::vector<std::size_t>& in_edges(std::size_t v) const { return in_.at(v); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// A graph together with the database of its edge facts; edge variables are
/// the fact variables of that database.
struct GraphInstance {
  Graph graph;
  Database db;

  /// Adds the fact `label(src,dst)` and the matching edge; duplicate facts are
  /// not added twice.
  void add_edge(std::string_view src, std::string_view dst, std::string_view label,
                std::optional<std::string> weight = std::nullopt);
};

/// Labeled-graph TSV: `src dst label [weight]` per line; `#` starts a comment.
GraphInstance parse_graph(std::string_view text);

/// One edge per binary fact of `db`, restricted to `labels` when non-empty.
Graph graph_from_database(const Database& db, const std::vector<std::string>& labels = {});

/// Level of every vertex in the weakly connected component of `s`, with
/// level(s) = 0 and level(dst) = level(src) + 1 on every edge; nullopt elsewhere.
/// NotLayered when no such assignment exists.
std::vector<std::optional<long>> layer_levels(const Graph& g, std::size_t s);

// ---------------------------------------------------------------------------
// Generators (vertex names v0..v{n-1}; label E unless stated)

/// All n(n-1) edges i→j with i ≠ j.
GraphInstance complete_digraph(std::size_t n);
/// Vertex s, `layers` layers of `width` vertices named L{layer}_{i}, vertex t;
/// all edges between consecutive levels.
GraphInstance layered_graph(std::size_t width, std::size_t layers);
/// Each ordered pair (i ≠ j) becomes an edge with probability p; weights 0..max_weight.
GraphInstance random_graph(std::size_t n, double p, std::uint64_t seed, unsigned max_weight = 9);

}  // namespace provcirc
