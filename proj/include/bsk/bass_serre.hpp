#pragma once

#include <optional>
#include <vector>

#include "bsk/gog.hpp"

namespace bsk {

// Finite window of the Bass-Serre tree: coset vertices within R tree edges of
// the base whose ShortLex-least representatives spell at most L letters
// (stable letters count 1, tree traversals 0).
struct TreeWindow {
  const GraphOfGroups* gog = nullptr;
  int R = 0, L = 1;

  struct V {
    PathWord rep;       // ShortLex-least representative found, ends at gamma_vertex
    int gamma_vertex = 0;
    int parent = -1;    // window index
    int parent_edge = -1;
    int depth = 0;
  };
  struct E {
    int a = -1, b = -1;       // window vertex ids, a = parent side
    int gamma_edge = -1;
    bool fwd = true;          // traversed from -> to when expanding a
    GroupElement rep_r;       // coset representative in the a-side vertex group
    GroupElement s_child;     // attachment syllable in the b-side vertex group
  };
  std::vector<V> verts;
  std::vector<E> edges;
  // adjacency: per vertex, incident edge indices
  std::vector<std::vector<int>> adj;
  // (gamma_vertex, depth) -> window vertex ids, for coset lookup
  std::map<std::pair<int, int>, std::vector<int>> buckets;

  // window lookup of a coset p*G_v; -1 when absent
  int find_coset(const PathWord& p) const;
  // partial action of g on a window vertex
  std::optional<int> act_vertex(const PathWord& g, int idx) const;
  // unique tree path between two window vertices (edge indices)
  std::vector<int> tree_geodesic(int a, int b) const;
};

TreeWindow build_tree_window(const GraphOfGroups& g, int R, int L);

struct StabilizerDescriptor {
  PathWord rep;       // g with stabilizer g G_v g^-1
  int gamma_vertex;
};
StabilizerDescriptor vertex_stabilizer(const TreeWindow& w, int idx);
// does x stabilize the window vertex?
bool stabilizes_vertex(const TreeWindow& w, const PathWord& x, int idx);

// ShortLex transversal of the subgroup "sub" in the vertex group, up to length
// maxlen; cached per call site by the callers.
std::vector<GroupElement> coset_transversal(const GroupRef& vg, const Subgroup& sub, int maxlen);

// A tamely generated subgroup: selected window cosets with vertex-subgroup
// generators, plus connecting elements of G.
struct TamePresentation {
  std::string id;
  struct Selected {
    std::string rep_text;   // G-word selecting the coset (empty = base)
    std::string vertex_id;
    std::vector<std::string> gen_texts;  // words in the vertex group
  };
  std::vector<Selected> selected;
  std::vector<std::string> connecting_texts;
};

struct ResolvedSelection {
  int window_vertex = -1;
  std::vector<GroupElement> gens;  // subgroup of G_v (window-vertex coordinates)
  Subgroup sub;
};

struct ResolvedTame {
  std::string id;
  std::vector<ResolvedSelection> selected;
  std::vector<PathWord> connecting;
  std::vector<PathWord> h_generators;  // conjugated vertex gens + connecting elements
};

ResolvedTame resolve_tame(const GraphOfGroups& g, const TreeWindow& w, const TamePresentation& tp);

struct InducedSplitting {
  std::vector<int> th_vertices;             // window vertex ids of the T_H window
  std::vector<int> th_edges;                // window edge ids
  std::vector<int> vertex_class;            // per th_vertices position: orbit class id
  std::vector<int> edge_class;              // per th_edges position: orbit class id
  int vertex_orbits = 0, edge_orbits = 0;
  int nontrivial_stabilizer_orbits = 0;
  // generators of the induced edge groups (per edge orbit representative)
  std::vector<std::vector<GroupElement>> edge_group_gens;
};

InducedSplitting minimal_subtree_and_splitting(const GraphOfGroups& g, const TreeWindow& w,
                                               const ResolvedTame& h);

}  // namespace bsk
