#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsk/group.hpp"
#include "bsk/stallings.hpp"

namespace bsk {

// Subgroup of a vertex group with decision machinery appropriate to its kind.
struct Subgroup {
  GroupRef group;
  std::vector<GroupElement> gens;
  std::optional<CoreGraph> core;   // free vertex group
  std::optional<ZLattice> lat;     // abelian (includes torsion relation rows)
  std::vector<int> elems;          // finite (sorted table indices)

  static Subgroup make(const GroupRef& g, std::vector<GroupElement> gens);
  bool contains(const GroupElement& x) const;
  bool is_trivial_subgroup() const;
  bool is_whole_group() const;
  bool is_infinite() const;
};

// Conjugate of a subgroup by an element of the same vertex group.
Subgroup conjugate_subgroup(const Subgroup& s, const GroupElement& by);
// Intersection of two subgroups of one vertex group (exact per kind).
Subgroup intersect_subgroups(const Subgroup& a, const Subgroup& b);

struct MalnormalCollectionVerdict {
  bool ok = true;
  int i = -1, j = -1;
  std::string witness;
  bool bounded_only = false;  // finite/abelian shortcuts never are; reserved
};
MalnormalCollectionVerdict malnormal_collection(const std::vector<Subgroup>& subs);

struct TotalityVerdict {
  bool ok = true;
  int peripheral = -1;
  std::string witness;
};
TotalityVerdict subgroup_total(const Subgroup& h, const std::vector<Subgroup>& peripherals);

struct PeripheralDecl {
  std::string id;
  std::vector<GroupElement> gens;
  Subgroup sub;
};

struct VertexData {
  std::string id;
  GroupRef group;
  std::vector<PeripheralDecl> peripherals;
  int peripheral_index(const std::string& pid) const;
};

// One end of an edge: the injection of the edge group into the endpoint vertex
// group, with membership/preimage machinery chosen by the kind pair.
struct EdgeEnd {
  int vertex = -1;
  std::string container_id;
  int container = -1;                       // peripheral index at the vertex
  GroupRef edge_group_ref;
  std::vector<GroupElement> image_gens;     // images of the edge-group symbols
  Subgroup image;                           // image subgroup machinery
  std::optional<DecoratedCore> dcore;       // infinite edge group into free vertex
  std::optional<ZLattice> image_lattice;    // abelian vertex: columns = image vectors
  // finite edge group: element maps in both directions
  std::map<std::string, std::string> to_vertex;  // edge elem key -> vertex elem key
  std::map<std::string, std::string> to_edge;
  std::vector<std::pair<GroupElement, GroupElement>> elem_pairs;  // (edge elem, vertex elem)

  bool mono = false;
  bool contains(const GroupElement& g) const;         // g in the image
  GroupElement preimage(const GroupElement& g) const; // edge-group element mapping to g
  GroupElement push(const GroupElement& edge_elem) const;  // image of an edge element
};

struct EdgeData {
  std::string id;
  GroupRef group;
  EdgeEnd from, to;
  bool in_tree = false;
  std::string stable_letter;
};

struct PathWord;

struct GraphOfGroups {
  std::vector<VertexData> vertices;
  std::vector<EdgeData> edges;
  int base_vertex = 0;

  // built by prepare()
  std::map<std::string, std::tuple<int, int, int>> symtab;  // name -> (kind, a, b)
  std::vector<PathWord> tree_paths;

  int vertex_index(const std::string& id) const;
  int edge_index(const std::string& id) const;
  const EdgeEnd& end(int edge, bool from_side) const {
    return from_side ? edges[edge].from : edges[edge].to;
  }
};

// Finishes construction: builds subgroup machinery, injection oracles, and the
// global symbol table. Call once after filling in the raw fields.
void prepare(GraphOfGroups& g);

// ---- validation ----

struct EndCheck {
  bool mono = false;
  bool in_container = false;
  bool maximal_in_container = false;
  std::string detail;
};
struct EdgeCheck {
  EndCheck from, to;
};
struct VertexCheck {
  MalnormalCollectionVerdict peripherals_malnormal;
  MalnormalCollectionVerdict edge_family_malnormal;   // {G_e : e attached}
  std::vector<std::pair<std::string, TotalityVerdict>> edge_totality;  // per attached edge-end
};
struct ValidationReport {
  bool structure_ok = true;     // connectivity, spanning tree, containers exist
  std::vector<std::string> structure_errors;
  std::vector<EdgeCheck> edge_checks;
  std::vector<VertexCheck> vertex_checks;
  bool ok() const;
};

ValidationReport validate(const GraphOfGroups& g);

// ---- path words (groupoid elements; Britton/AFP reduction) ----

struct Trav {
  int edge = -1;
  bool fwd = true;  // forward = from -> to
  bool operator==(const Trav& o) const { return edge == o.edge && fwd == o.fwd; }
};

// Alternating syllable/traversal sequence along a path in the graph.
// sylls.size() == travs.size() + 1; sylls[i] lives at the i-th path vertex.
struct PathWord {
  int start = 0;
  std::vector<GroupElement> sylls;
  std::vector<Trav> travs;

  int end_vertex(const GraphOfGroups& g) const;
  bool is_syllable() const { return travs.empty(); }
  bool is_identity() const { return travs.empty() && sylls.size() == 1 && sylls[0].is_identity(); }
};

PathWord pw_identity(const GraphOfGroups& g, int vertex);
PathWord pw_syllable(const GraphOfGroups& g, int vertex, GroupElement e);
PathWord pw_reduce(const GraphOfGroups& g, const PathWord& p);            // Britton reduction
PathWord pw_concat(const GraphOfGroups& g, const PathWord& a, const PathWord& b);
PathWord pw_inverse(const GraphOfGroups& g, const PathWord& a);
bool pw_equal(const GraphOfGroups& g, const PathWord& a, const PathWord& b);
// p, q paths from base to the same vertex v: is p G_v == q G_v?
bool same_coset(const GraphOfGroups& g, const PathWord& p, const PathWord& q);
int pw_length(const GraphOfGroups& g, const PathWord& p);  // letters + stable letters
int pw_cmp_shortlex(const GraphOfGroups& g, const PathWord& a, const PathWord& b);
std::string pw_str(const GraphOfGroups& g, const PathWord& p);
// #traversals of the reduced form = tree distance moved
inline int pw_depth(const PathWord& p) { return static_cast<int>(p.travs.size()); }
bool pw_infinite_order(const GraphOfGroups& g, const PathWord& p);

// Spanning-tree path from the base vertex to v (identity syllables).
PathWord tree_path(const GraphOfGroups& g, int v);

// Parses a word in the spanning-tree presentation of G: tokens are vertex-group
// symbols (globally unique) and stable letters, each with optional ^exp.
PathWord parse_gword(const GraphOfGroups& g, const std::string& text);

// Britton-reduced form of a raw path word (word problem: empty iff trivial).
PathWord normal_form(const GraphOfGroups& g, const PathWord& raw);

// Lemma-fg vertex generator extraction: edge-group images at v plus all
// v-syllables of the normal forms of the global generators.
std::vector<GroupElement> vertex_generators(const GraphOfGroups& g,
                                            const std::vector<PathWord>& global_gens, int v);

}  // namespace bsk
