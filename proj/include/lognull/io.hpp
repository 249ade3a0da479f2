#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lognull/errors.hpp"
#include "lognull/graph.hpp"

namespace lognull {

namespace detail {

/// Splits a line into exactly two whitespace-separated tokens. Returns false
/// for blank and '#' comment lines; throws on anything else malformed.
inline bool two_tokens(const std::string& line, std::size_t line_no, std::string& a, std::string& b) {
  std::istringstream in(line);
  if (!(in >> a)) return false;
  if (a[0] == '#') return false;
  std::string extra;
  if (!(in >> b)) throw ParseError(line_no, "expected two tokens, got one");
  if (in >> extra) throw ParseError(line_no, "expected two tokens, got more");
  return true;
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

}  // namespace detail

/// Reads a simple undirected graph from a two-column edge list. Labels map to
/// dense ids in order of first appearance; self-loops and repeated edges are
/// rejected.
inline Graph load_edge_list(std::istream& in) {
  std::unordered_map<std::string, Vertex> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  std::set<std::pair<Vertex, Vertex>> seen;
  auto id_of = [&](const std::string& label) {
    auto [it, inserted] = ids.try_emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };
  std::string line, a, b;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!detail::two_tokens(line, line_no, a, b)) continue;
    if (a == b) throw ValidationError("line " + std::to_string(line_no) + ": self-loop at " + a);
    Vertex u = id_of(a), v = id_of(b);
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second)
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate edge " + a + " " + b);
    edges.push_back({u, v, 1.0});
  }
  Graph g = Graph::from_edges(labels.size(), std::move(edges));
  g.set_labels(std::move(labels));
  return g;
}

inline Graph load_edge_list(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return load_edge_list(in);
}

/// Raw (vertex label, community label) pairs of a partition file, in file order.
inline std::vector<std::pair<std::string, std::string>> read_partition_labels(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line, a, b;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no)
    if (detail::two_tokens(line, line_no, a, b)) rows.emplace_back(a, b);
  return rows;
}

/// Builds a partition from labelled rows against a list of vertex labels.
/// Every vertex must appear exactly once and no unknown vertex may appear.
inline Partition partition_from_labels(const std::vector<std::pair<std::string, std::string>>& rows,
                                       const std::vector<std::string>& vertex_labels) {
  std::unordered_map<std::string, Vertex> ids;
  for (Vertex v = 0; v < vertex_labels.size(); ++v) ids.emplace(vertex_labels[v], v);
  std::unordered_map<std::string, Community> communities;
  constexpr auto unset = static_cast<Community>(-1);
  std::vector<Community> assignment(vertex_labels.size(), unset);
  for (const auto& [vertex, community] : rows) {
    auto it = ids.find(vertex);
    if (it == ids.end()) throw ValidationError("unknown vertex " + vertex);
    if (assignment[it->second] != unset) throw ValidationError("duplicate vertex " + vertex);
    assignment[it->second] = communities.try_emplace(community, communities.size()).first->second;
  }
  for (Vertex v = 0; v < assignment.size(); ++v)
    if (assignment[v] == unset) throw ValidationError("missing vertex " + vertex_labels[v]);
  return Partition(std::move(assignment));
}

inline std::vector<std::string> vertex_labels(const Graph& graph) {
  std::vector<std::string> out(graph.vertex_count());
  for (Vertex v = 0; v < out.size(); ++v) out[v] = graph.label(v);
  return out;
}

inline Partition load_partition(std::istream& in, const Graph& graph) {
  return partition_from_labels(read_partition_labels(in), vertex_labels(graph));
}

inline Partition load_partition(const std::string& path, const Graph& graph) {
  auto in = detail::open_or_throw(path);
  return load_partition(in, graph);
}

inline void write_edge_list(std::ostream& out, const Graph& graph) {
  for (const auto& e : graph.edges()) out << graph.label(e.u) << ' ' << graph.label(e.v) << '\n';
}

inline void write_partition(std::ostream& out, const Graph& graph, const Partition& partition) {
  require_cover(graph, partition);
  for (Vertex v = 0; v < graph.vertex_count(); ++v) out << graph.label(v) << ' ' << partition[v] << '\n';
}

}  // namespace lognull
