#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsk/group.hpp"

namespace bsk {

// Folded core graph of a finitely generated subgroup of a free group.
// out[v][s] / in_[v][s] hold at most one edge per label on each side.
struct CoreGraph {
  GroupRef group;
  int base = 0;
  std::vector<std::vector<int>> out;  // out[v][sym] = head vertex or -1
  std::vector<std::vector<int>> in_;  // in_[v][sym] = tail vertex or -1

  int vertex_count() const { return static_cast<int>(out.size()); }
  int edge_count() const;
  int rank() const { return edge_count() - vertex_count() + 1; }
  bool is_trivial() const { return vertex_count() == 1 && edge_count() == 0; }

  bool contains(const GroupElement& w) const;
  // trace from a vertex; returns final vertex or -1 when the path leaves the graph
  int trace(int from, const std::vector<Letter>& letters) const;

  // ShortLex-least word from base to each vertex (BFS with sorted edge order).
  std::vector<std::vector<Letter>> path_words() const;
  // Free basis of the subgroup: one loop per non-tree edge, at the base.
  std::vector<GroupElement> loop_basis() const;
  // Loop basis at an arbitrary vertex (conjugated by the path word).
  std::vector<GroupElement> loop_basis_at(int v) const;

  bool contains_whole_group() const;  // every ambient generator is a loop at base
  std::string to_dot(const std::string& name) const;
};

CoreGraph core_graph(const GroupRef& group, const std::vector<GroupElement>& generators);

// Component of the label-respecting fiber product of two core graphs.
struct PullbackComponent {
  std::vector<std::pair<int, int>> vertices;  // (vertex in c1, vertex in c2)
  int repr_a = 0, repr_b = 0;                 // representative vertex pair
  GroupElement coset;                         // g with loop subgroup conj = H cap K^g
  int rank = 0;
  std::vector<GroupElement> loop_gens;        // loops at (repr_a, repr_b), spelled in the ambient group
  bool contains_base_pair = false;            // contains (base1, base2)
  bool full_on_second = false;                // loop subgroup equals the whole second factor conjugate
  bool full_on_first = false;
};

// All components of the fiber product with free rank >= 1 (nontrivial intersection).
std::vector<PullbackComponent> pullback(const CoreGraph& c1, const CoreGraph& c2);

// Loop generators (at the start pair) of the fiber-product component through
// (a0, b0); computes A^{w(a0)} cap B^{w(b0)} generators spelled in the ambient group.
std::vector<GroupElement> product_component_loops(const CoreGraph& c1, const CoreGraph& c2,
                                                  int a0, int b0);

struct MalnormalVerdict {
  bool malnormal = true;
  int i = -1, j = -1;
  std::optional<GroupElement> witness;
};

// Almost malnormal collection check; in free groups finite means trivial.
MalnormalVerdict is_malnormal_collection(const std::vector<CoreGraph>& subgroups);

struct TotalVerdict {
  bool total = true;
  int peripheral = -1;
  std::optional<GroupElement> witness;  // double coset with proper infinite intersection
};

TotalVerdict is_total(const CoreGraph& h, const std::vector<CoreGraph>& peripherals);

// Decorated folding: computes the image core of a free-group homomorphism given
// on basis symbols, carries preimage words, and decides injectivity by rank
// bookkeeping (a relation collision or a rank drop means the map is not mono).
struct DecoratedCore {
  GroupRef domain;  // free or infinite-cyclic abelian edge group presented by symbols
  CoreGraph core;
  // per directed edge of core (v, sym): decoration word in domain letters
  std::vector<std::vector<std::vector<Letter>>> dec;  // dec[v][sym] for edge v --sym--> out[v][sym]
  bool mono = false;
  bool relation_collision = false;

  bool contains(const GroupElement& w) const { return core.contains(w); }
  // preimage word in domain letters; w must lie in the image
  std::vector<Letter> preimage(const GroupElement& w) const;
};

DecoratedCore decorated_core(const GroupRef& domain, const GroupRef& ambient,
                             const std::vector<GroupElement>& images);

}  // namespace bsk
