#include "provcirc/graph.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "provcirc/error.hpp"

namespace provcirc {

std::size_t Graph::vertex(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  std::size_t id = names_.size();
  names_.emplace_back(name);
  ids_.emplace(std::string(name), id);
  out_.emplace_back();
  in_.emplace_back();
  return id;
}

std::optional<std::size_t> Graph::find_vertex(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t Graph::add_edge(std::size_t src, std::size_t dst, std::string label, FactVar var) {
  if (src >= names_.size() || dst >= names_.size()) fail(ErrorCode::InvalidArgument, "edge endpoint out of range");
  std::size_t id = edges_.size();
  edges_.push_back({src, dst, std::move(label), var});
  out_[src].push_back(id);
  in_[dst].push_back(id);
  return id;
}

void GraphInstance::add_edge(std::string_view src, std::string_view dst, std::string_view label,
                             std::optional<std::string> weight) {
  std::size_t before = db.size();
  FactVar var = db.add(GroundAtom{std::string(label), {std::string(src), std::string(dst)}}, std::move(weight));
  std::size_t s = graph.vertex(src);
  std::size_t d = graph.vertex(dst);
  if (db.size() != before) graph.add_edge(s, d, std::string(label), var);
}

GraphInstance parse_graph(std::string_view text) {
  GraphInstance inst;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream cols(line);
    std::vector<std::string> parts;
    std::string part;
    while (cols >> part) parts.push_back(part);
    if (parts.empty()) continue;
    if (parts.size() != 3 && parts.size() != 4) {
      fail(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": expected `src dst label [weight]`");
    }
    std::optional<std::string> weight;
    if (parts.size() == 4) weight = parts[3];
    inst.add_edge(parts[0], parts[1], parts[2], std::move(weight));
  }
  return inst;
}

Graph graph_from_database(const Database& db, const std::vector<std::string>& labels) {
  Graph g;
  for (const auto& c : db.constants()) g.vertex(c);
  for (const auto& f : db.facts()) {
    if (f.atom.args.size() != 2) continue;
    if (!labels.empty() && std::find(labels.begin(), labels.end(), f.atom.predicate) == labels.end()) continue;
    g.add_edge(g.vertex(f.atom.args[0]), g.vertex(f.atom.args[1]), f.atom.predicate, f.var);
  }
  return g;
}

std::vector<std::optional<long>> layer_levels(const Graph& g, std::size_t s) {
  std::vector<std::optional<long>> level(g.num_vertices());
  level.at(s) = 0;
  std::vector<std::size_t> queue{s};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t v = queue[head];
    auto visit = [&](std::size_t w, long want) {
      if (!level[w]) {
        level[w] = want;
        queue.push_back(w);
      } else if (*level[w] != want) {
        fail(ErrorCode::NotLayered, "vertex " + g.name(w) + " sits on two different levels");
      }
    };
    for (std::size_t e : g.out_edges(v)) visit(g.edge(e).dst, *level[v] + 1);
    for (std::size_t e : g.in_edges(v)) visit(g.edge(e).src, *level[v] - 1);
  }
  return level;
}

GraphInstance complete_digraph(std::size_t n) {
  GraphInstance inst;
  for (std::size_t i = 0; i < n; ++i) inst.graph.vertex("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) inst.add_edge("v" + std::to_string(i), "v" + std::to_string(j), "E", "1");
  return inst;
}

GraphInstance layered_graph(std::size_t width, std::size_t layers) {
  GraphInstance inst;
  auto name = [](std::size_t layer, std::size_t i) { return "L" + std::to_string(layer) + "_" + std::to_string(i); };
  inst.graph.vertex("s");
  for (std::size_t l = 1; l <= layers; ++l)
    for (std::size_t i = 0; i < width; ++i) inst.graph.vertex(name(l, i));
  inst.graph.vertex("t");
  if (layers == 0) {
    inst.add_edge("s", "t", "E", "1");
    return inst;
  }
  for (std::size_t i = 0; i < width; ++i) inst.add_edge("s", name(1, i), "E", "1");
  for (std::size_t l = 1; l < layers; ++l)
    for (std::size_t i = 0; i < width; ++i)
      for (std::size_t j = 0; j < width; ++j) inst.add_edge(name(l, i), name(l + 1, j), "E", "1");
  for (std::size_t i = 0; i < width; ++i) inst.add_edge(name(layers, i), "t", "E", "1");
  return inst;
}

GraphInstance random_graph(std::size_t n, double p, std::uint64_t seed, unsigned max_weight) {
  GraphInstance inst;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<unsigned> weight(0, max_weight);
  for (std::size_t i = 0; i < n; ++i) inst.graph.vertex("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (coin(rng) < p) {
        inst.add_edge("v" + std::to_string(i), "v" + std::to_string(j), "E", std::to_string(weight(rng)));
      }
    }
  }
  return inst;
}

}  // namespace provcirc
