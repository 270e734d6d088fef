#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "maxhom/rational.hpp"

namespace maxhom {

struct Graph {
  std::vector<std::string> vertices;
  std::set<std::pair<int, int>> edges;  // stored with u <= v
  std::map<std::pair<int, int>, Rational> edge_weights;  // absent = 1
  std::map<int, Rational> vertex_weights;                // absent = 1
  bool allow_loops = false;

  int n() const { return static_cast<int>(vertices.size()); }
  int m() const { return static_cast<int>(edges.size()); }
  int vertex(const std::string& id) const;
  bool has_edge(int u, int v) const;
  void add_edge(int u, int v);
  void set_edge_weight(int u, int v, const Rational& w);
  Rational edge_weight(int u, int v) const;
  Rational vertex_weight(int v) const;
  Rational total_edge_weight() const;
  Rational total_vertex_weight() const;
  std::vector<std::vector<int>> adjacency() const;  // loops excluded
  void validate() const;
};

Graph make_graph(std::vector<std::string> vertices);
Graph make_graph(int n, const std::string& prefix = "v");

// Connected components as sorted index lists, ordered by least vertex.
std::vector<std::vector<int>> components(const Graph& g);

// Induced subgraph on kept vertices (sorted index list); weights carried.
Graph induced_subgraph(const Graph& g, const std::vector<int>& keep);
// Same vertex set, listed edges removed.
Graph remove_edges(const Graph& g, const std::set<std::pair<int, int>>& gone);

enum class GraphParam { Size, CC, TW, TD };

struct ParamResult {
  long long value = 0;
  bool exact = true;  // false: heuristic upper bound (cap exceeded)
};

// size = |V|; cc = largest component order; tw/td computed exactly per
// component up to the caps, heuristic upper bounds (flagged) beyond them.
ParamResult graph_parameter(const Graph& g, GraphParam p, int tw_cap = 12, int td_cap = 10);

struct TreeDecomposition {
  std::vector<std::vector<int>> bags;          // sorted vertex lists
  std::vector<std::pair<int, int>> tree_edges; // tree on bag indices
  int width() const;
};

enum class TDMethod { Exact, MinFill, MinDegree };

// Exact method enforces the per-component cap; heuristics run at any size.
TreeDecomposition tree_decomposition(const Graph& g, TDMethod method, int exact_cap = 12);

// Coverage of vertices and edges, connected bag subtrees, tree shape.
bool td_valid(const Graph& g, const TreeDecomposition& t, std::string* why = nullptr);

// Exact treewidth of a connected graph with <= cap vertices.
int treewidth_exact_connected(const Graph& g, int cap = 12);

// BFS layers by distance from root; fails on disconnected graphs.
std::vector<std::vector<int>> bfs_layers(const Graph& g, int root);
// Layers by distance to the nearest of several roots (one per component).
std::vector<std::vector<int>> bfs_layers(const Graph& g, const std::vector<int>& roots);

struct DegeneracyOrientation {
  std::vector<int> removal_order;
  int degeneracy = 0;
  // Arcs (tail, head): each edge points at its earlier-removed endpoint, so
  // in-degrees are bounded by the degeneracy.
  std::vector<std::pair<int, int>> arcs;
};
DegeneracyOrientation degeneracy_orientation(const Graph& g);

// Shortest cycle length; nullopt for forests.
std::optional<long long> girth(const Graph& g);

// Exact treedepth of a graph with per-component order <= cap.
int treedepth_exact(const Graph& g, int cap = 10);

} // namespace maxhom
