#include "bsk/gog.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace bsk {

// ---------------- Subgroup ----------------

Subgroup Subgroup::make(const GroupRef& g, std::vector<GroupElement> gens) {
  Subgroup s;
  s.group = g;
  s.gens = std::move(gens);
  for (auto& e : s.gens)
    if (e.group != g) fail(Err::group_mismatch, "subgroup generator from another group");
  switch (g->kind) {
    case GroupKind::free_group:
      s.core = core_graph(g, s.gens);
      break;
    case GroupKind::abelian: {
      std::vector<std::vector<std::int64_t>> rows;
      for (auto& e : s.gens) rows.push_back(e.vec);
      for (auto& t : torsion_rows(g)) rows.push_back(t);
      s.lat = ZLattice::from_rows(g->rank(), rows);
      break;
    }
    case GroupKind::finite:
      s.elems = finite_subgroup(g, s.gens);
      break;
  }
  return s;
}

bool Subgroup::contains(const GroupElement& x) const {
  if (x.group != group) fail(Err::group_mismatch, "membership across groups");
  switch (group->kind) {
    case GroupKind::free_group: return core->contains(x);
    case GroupKind::abelian: return lat->contains(x.vec);
    case GroupKind::finite: return std::binary_search(elems.begin(), elems.end(), x.findex);
  }
  return false;
}

bool Subgroup::is_trivial_subgroup() const {
  switch (group->kind) {
    case GroupKind::free_group: return core->is_trivial();
    case GroupKind::abelian: {
      // free part must vanish and all torsion residues trivial
      for (size_t i = 0; i < lat->rows.size(); ++i) {
        const auto& r = lat->rows[i];
        for (int c = 0; c < group->free_rank; ++c)
          if (r[c] != 0) return false;
        for (size_t t = 0; t < group->torsion.size(); ++t) {
          std::int64_t v = r[group->free_rank + t] % group->torsion[t];
          if (v != 0) return false;
        }
      }
      return true;
    }
    case GroupKind::finite: return elems.size() == 1;
  }
  return false;
}

bool Subgroup::is_whole_group() const {
  switch (group->kind) {
    case GroupKind::free_group: return core->contains_whole_group();
    case GroupKind::abelian: {
      for (int i = 0; i < group->rank(); ++i) {
        std::vector<std::int64_t> e(group->rank(), 0);
        e[i] = 1;
        if (!lat->contains(e)) return false;
      }
      return true;
    }
    case GroupKind::finite: return static_cast<int>(elems.size()) == group->order();
  }
  return false;
}

bool Subgroup::is_infinite() const {
  switch (group->kind) {
    case GroupKind::free_group: return !core->is_trivial();
    case GroupKind::abelian: {
      for (const auto& r : lat->rows)
        for (int c = 0; c < group->free_rank; ++c)
          if (r[c] != 0) return true;
      return false;
    }
    case GroupKind::finite: return false;
  }
  return false;
}

Subgroup conjugate_subgroup(const Subgroup& s, const GroupElement& by) {
  std::vector<GroupElement> gens;
  GroupElement byi = invert(by);
  for (const auto& g : s.gens) gens.push_back(multiply(multiply(by, g), byi));
  return Subgroup::make(s.group, gens);
}

Subgroup intersect_subgroups(const Subgroup& a, const Subgroup& b) {
  if (a.group != b.group) fail(Err::group_mismatch, "intersection across groups");
  const GroupRef& g = a.group;
  switch (g->kind) {
    case GroupKind::free_group: {
      auto gens = product_component_loops(*a.core, *b.core, a.core->base, b.core->base);
      return Subgroup::make(g, gens);
    }
    case GroupKind::abelian: {
      // kernel of (x, y) -> x*A - y*B gives the intersection of the row lattices
      std::vector<std::vector<std::int64_t>> cols;
      for (const auto& r : a.lat->rows) cols.push_back(r);
      for (const auto& r : b.lat->rows) {
        auto n = r;
        for (auto& v : n) v = -v;
        cols.push_back(n);
      }
      auto ker = integer_kernel(g->rank(), cols);
      std::vector<GroupElement> gens;
      for (const auto& k : ker) {
        std::vector<std::int64_t> v(g->rank(), 0);
        for (size_t i = 0; i < a.lat->rows.size(); ++i)
          for (int c = 0; c < g->rank(); ++c) v[c] += k[i] * a.lat->rows[i][c];
        GroupElement e = identity_element(g);
        e.vec = v;
        // normalize torsion
        for (size_t t = 0; t < g->torsion.size(); ++t) {
          auto& c = e.vec[g->free_rank + t];
          c %= g->torsion[t];
          if (c < 0) c += g->torsion[t];
        }
        if (!e.is_identity()) gens.push_back(e);
      }
      return Subgroup::make(g, gens);
    }
    case GroupKind::finite: {
      std::vector<GroupElement> gens;
      for (int x : a.elems)
        if (std::binary_search(b.elems.begin(), b.elems.end(), x)) {
          GroupElement e = identity_element(g);
          e.findex = x;
          gens.push_back(e);
        }
      return Subgroup::make(g, gens);
    }
  }
  fail(Err::bad_input, "unreachable");
}

MalnormalCollectionVerdict malnormal_collection(const std::vector<Subgroup>& subs) {
  MalnormalCollectionVerdict v;
  if (subs.empty()) return v;
  const GroupRef& g = subs[0].group;
  switch (g->kind) {
    case GroupKind::free_group: {
      std::vector<CoreGraph> cores;
      for (const auto& s : subs) cores.push_back(*s.core);
      auto mv = is_malnormal_collection(cores);
      v.ok = mv.malnormal;
      v.i = mv.i;
      v.j = mv.j;
      if (mv.witness) v.witness = to_string(*mv.witness);
      return v;
    }
    case GroupKind::abelian: {
      for (size_t i = 0; i < subs.size(); ++i) {
        if (subs[i].is_infinite() && !subs[i].is_whole_group()) {
          v.ok = false;
          v.i = v.j = static_cast<int>(i);
          for (int c = 0; c < g->rank(); ++c) {
            std::vector<std::int64_t> e(g->rank(), 0);
            e[c] = 1;
            if (!subs[i].lat->contains(e)) {
              v.witness = g->symbols[c];
              break;
            }
          }
          return v;
        }
        for (size_t j = i + 1; j < subs.size(); ++j) {
          auto inter = intersect_subgroups(subs[i], subs[j]);
          if (inter.is_infinite()) {
            v.ok = false;
            v.i = static_cast<int>(i);
            v.j = static_cast<int>(j);
            v.witness = "1";
            return v;
          }
        }
      }
      return v;
    }
    case GroupKind::finite:
      return v;  // all intersections finite
  }
  return v;
}

TotalityVerdict subgroup_total(const Subgroup& h, const std::vector<Subgroup>& peripherals) {
  TotalityVerdict v;
  if (peripherals.empty()) return v;
  const GroupRef& g = h.group;
  switch (g->kind) {
    case GroupKind::free_group: {
      std::vector<CoreGraph> cores;
      for (const auto& p : peripherals) cores.push_back(*p.core);
      auto tv = is_total(*h.core, cores);
      v.ok = tv.total;
      v.peripheral = tv.peripheral;
      if (tv.witness) v.witness = to_string(*tv.witness);
      return v;
    }
    case GroupKind::abelian: {
      for (size_t k = 0; k < peripherals.size(); ++k) {
        auto inter = intersect_subgroups(h, peripherals[k]);
        if (!inter.is_infinite()) continue;
        bool full = true;
        for (const auto& pg : peripherals[k].gens)
          if (!h.contains(pg)) { full = false; break; }
        if (!full) {
          v.ok = false;
          v.peripheral = static_cast<int>(k);
          v.witness = "1";
          return v;
        }
      }
      return v;
    }
    case GroupKind::finite:
      return v;
  }
  return v;
}

// ---------------- GraphOfGroups basics ----------------

int VertexData::peripheral_index(const std::string& pid) const {
  for (size_t i = 0; i < peripherals.size(); ++i)
    if (peripherals[i].id == pid) return static_cast<int>(i);
  return -1;
}

int GraphOfGroups::vertex_index(const std::string& id) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return static_cast<int>(i);
  return -1;
}

int GraphOfGroups::edge_index(const std::string& id) const {
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return static_cast<int>(i);
  return -1;
}

// ---------------- EdgeEnd machinery ----------------

namespace {

bool edge_group_is_finite(const GroupRef& g) {
  switch (g->kind) {
    case GroupKind::finite: return true;
    case GroupKind::abelian: return g->free_rank == 0;
    case GroupKind::free_group: return g->rank() == 0;
  }
  return false;
}

std::string elem_key(const GroupElement& e) { return to_string(e); }

// Enumerates all elements of a finite edge group together with expressions in
// the group's symbols (as reduced raw words over the symbol alphabet).
std::vector<std::pair<GroupElement, std::vector<Letter>>> enumerate_with_expressions(
    const GroupRef& g) {
  std::vector<std::pair<GroupElement, std::vector<Letter>>> out;
  std::set<std::string> seen;
  std::deque<std::pair<GroupElement, std::vector<Letter>>> q;
  q.push_back({identity_element(g), {}});
  seen.insert(elem_key(identity_element(g)));
  while (!q.empty()) {
    auto [e, expr] = q.front();
    q.pop_front();
    out.push_back({e, expr});
    for (int s = 0; s < g->rank(); ++s) {
      for (int inv = 0; inv < 2; ++inv) {
        Word w;
        w.letters.push_back(make_letter(s, inv != 0));
        GroupElement n = multiply(e, reduce(g, w));
        if (seen.insert(elem_key(n)).second) {
          auto ex = expr;
          ex.push_back(make_letter(s, inv != 0));
          q.push_back({n, ex});
        }
      }
    }
  }
  return out;
}

GroupElement substitute(const GroupRef& target, const std::vector<GroupElement>& images,
                        const std::vector<Letter>& expr) {
  GroupElement acc = identity_element(target);
  for (Letter l : expr) {
    const GroupElement& im = images[static_cast<size_t>(letter_symbol(l))];
    acc = multiply(acc, letter_inverted(l) ? invert(im) : im);
  }
  return acc;
}

void build_end(const GroupRef& edge_group, EdgeEnd& end, const GraphOfGroups& g) {
  const GroupRef& vg = g.vertices[static_cast<size_t>(end.vertex)].group;
  end.image = Subgroup::make(vg, end.image_gens);
  if (static_cast<int>(end.image_gens.size()) != edge_group->rank())
    fail(Err::bad_input, "edge map must assign every edge-group symbol");

  if (edge_group_is_finite(edge_group)) {
    int full = 1;
    if (edge_group->kind == GroupKind::finite) full = edge_group->order();
    else
      for (auto d : edge_group->torsion) full = static_cast<int>(full * d);
    auto elems = enumerate_with_expressions(edge_group);
    bool generated = static_cast<int>(elems.size()) == full;
    bool homo = true, inj = true;
    for (auto& [e, expr] : elems) {
      GroupElement im = substitute(vg, end.image_gens, expr);
      std::string ik = elem_key(im);
      if (end.to_edge.count(ik)) inj = false;
      end.to_vertex[elem_key(e)] = ik;
      end.to_edge[ik] = elem_key(e);
      end.elem_pairs.push_back({e, im});
    }
    // verify homomorphism on all pairs
    for (auto& [x, xi] : end.elem_pairs)
      for (auto& [y, yi] : end.elem_pairs) {
        GroupElement xy = multiply(x, y);
        GroupElement expect = multiply(xi, yi);
        // find image of xy via its recorded pair
        bool found = false;
        for (auto& [z, zi] : end.elem_pairs)
          if (equal(z, xy)) { found = true; homo = homo && equal(zi, expect); break; }
        if (!found) homo = false;
      }
    end.mono = generated && homo && inj;
    return;
  }

  // infinite edge group
  switch (vg->kind) {
    case GroupKind::free_group: {
      bool domain_ok = true;
      if (edge_group->kind == GroupKind::abelian &&
          (edge_group->free_rank != 1 || !edge_group->torsion.empty()))
        domain_ok = false;
      end.dcore = decorated_core(edge_group, vg, end.image_gens);
      end.mono = domain_ok && end.dcore->mono;
      break;
    }
    case GroupKind::abelian: {
      if (edge_group->kind == GroupKind::free_group && edge_group->rank() >= 2) {
        end.mono = false;  // F_k abelianizes
        return;
      }
      std::vector<std::vector<std::int64_t>> rows;
      for (const auto& im : end.image_gens) rows.push_back(im.vec);
      auto tr = torsion_rows(vg);
      for (auto& t : tr) rows.push_back(t);
      end.image_lattice = ZLattice::from_rows(vg->rank(), rows);
      // kernel check: x with M x in vertex torsion lattice must lie in edge torsion lattice
      std::vector<std::vector<std::int64_t>> cols;
      for (const auto& im : end.image_gens) cols.push_back(im.vec);
      for (auto& t : tr) cols.push_back(t);
      auto ker = integer_kernel(vg->rank(), cols);
      bool mono = true;
      size_t k = end.image_gens.size();
      for (const auto& kv : ker) {
        // the first k coordinates form an edge-group element that must be trivial
        for (size_t i = 0; i < k && mono; ++i) {
          std::int64_t c = kv[i];
          if (edge_group->kind == GroupKind::free_group) {
            if (c != 0) mono = false;
          } else {
            int fr = edge_group->free_rank;
            if (static_cast<int>(i) < fr) {
              if (c != 0) mono = false;
            } else {
              std::int64_t d = edge_group->torsion[i - static_cast<size_t>(fr)];
              if (c % d != 0) mono = false;
            }
          }
        }
      }
      end.mono = mono;
      break;
    }
    case GroupKind::finite:
      end.mono = false;  // infinite group cannot embed in a finite one
      break;
  }
}

}  // namespace

bool EdgeEnd::contains(const GroupElement& x) const { return image.contains(x); }

GroupElement EdgeEnd::push(const GroupElement& edge_elem) const {
  const GroupRef& eg = edge_elem.group;
  const GroupRef& vg = image.group;
  if (!elem_pairs.empty()) {
    for (const auto& [e, im] : elem_pairs)
      if (equal(e, edge_elem)) return im;
    fail(Err::group_mismatch, "edge element outside the enumerated edge group");
  }
  GroupElement acc = identity_element(vg);
  if (eg->kind == GroupKind::free_group) {
    for (Letter l : edge_elem.fword) {
      const GroupElement& im = image_gens[static_cast<size_t>(letter_symbol(l))];
      acc = multiply(acc, letter_inverted(l) ? invert(im) : im);
    }
  } else {  // abelian
    for (size_t i = 0; i < edge_elem.vec.size(); ++i)
      acc = multiply(acc, pow(image_gens[i], edge_elem.vec[i]));
  }
  return acc;
}

GroupElement EdgeEnd::preimage(const GroupElement& x) const {
  const GroupRef& vg = image.group;
  if (!to_edge.empty() || !elem_pairs.empty()) {
    auto it = to_edge.find(elem_key(x));
    if (it == to_edge.end()) fail(Err::group_mismatch, "preimage outside image");
    for (const auto& [e, im] : elem_pairs)
      if (elem_key(e) == it->second) return e;
    fail(Err::group_mismatch, "broken edge element table");
  }
  GroupRef eg;
  if (dcore) eg = dcore->domain;
  switch (vg->kind) {
    case GroupKind::free_group: {
      auto letters = dcore->preimage(x);
      if (eg->kind == GroupKind::free_group) {
        GroupElement e = identity_element(eg);
        e.fword = letters;
        return e;
      }
      // infinite cyclic abelian edge group
      GroupElement e = identity_element(eg);
      std::int64_t k = 0;
      for (Letter l : letters) k += letter_inverted(l) ? -1 : 1;
      e.vec[0] = k;
      return e;
    }
    case GroupKind::abelian: {
      auto coeffs = image_lattice->express(x.vec);
      if (!coeffs) fail(Err::group_mismatch, "preimage outside image");
      size_t k = image_gens.size();
      // one image per edge-group symbol, so coefficient i belongs to symbol i
      GroupElement e = identity_element(edge_group_ref);
      if (edge_group_ref->kind == GroupKind::free_group) {
        // rank <= 1 here
        std::int64_t k0 = (*coeffs).empty() ? 0 : (*coeffs)[0];
        Word w;
        for (std::int64_t i = 0; i < (k0 < 0 ? -k0 : k0); ++i)
          w.letters.push_back(make_letter(0, k0 < 0));
        e = reduce(edge_group_ref, w);
      } else {
        for (size_t i = 0; i < k; ++i) e.vec[i] = (*coeffs)[i];
        for (size_t t = 0; t < edge_group_ref->torsion.size(); ++t) {
          auto& c = e.vec[edge_group_ref->free_rank + t];
          c %= edge_group_ref->torsion[t];
          if (c < 0) c += edge_group_ref->torsion[t];
        }
      }
      return e;
    }
    case GroupKind::finite:
      fail(Err::group_mismatch, "no preimage machinery at a finite vertex");
  }
  fail(Err::bad_input, "unreachable");
}

// ---------------- prepare ----------------

void prepare(GraphOfGroups& g) {
  // subgroup machinery for peripherals
  for (auto& v : g.vertices)
    for (auto& p : v.peripherals) p.sub = Subgroup::make(v.group, p.gens);

  for (auto& e : g.edges) {
    e.from.edge_group_ref = e.group;
    e.to.edge_group_ref = e.group;
    build_end(e.group, e.from, g);
    build_end(e.group, e.to, g);
  }

  // global symbol table: vertex symbols and stable letters must be unique
  g.symtab.clear();
  for (size_t vi = 0; vi < g.vertices.size(); ++vi) {
    const auto& v = g.vertices[vi];
    for (size_t si = 0; si < v.group->symbols.size(); ++si) {
      const auto& s = v.group->symbols[si];
      if (g.symtab.count(s)) fail(Err::bad_input, "duplicate global symbol '" + s + "'");
      g.symtab[s] = {0, static_cast<int>(vi), static_cast<int>(si)};
    }
  }
  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    if (e.in_tree) continue;
    if (e.stable_letter.empty())
      fail(Err::bad_input, "non-tree edge '" + e.id + "' needs a stable letter");
    if (g.symtab.count(e.stable_letter))
      fail(Err::bad_input, "duplicate global symbol '" + e.stable_letter + "'");
    g.symtab[e.stable_letter] = {1, static_cast<int>(ei), 0};
  }

  // spanning-tree paths from the base vertex
  g.tree_paths.assign(g.vertices.size(), PathWord{});
  std::vector<bool> seen(g.vertices.size(), false);
  std::deque<int> q{g.base_vertex};
  seen[static_cast<size_t>(g.base_vertex)] = true;
  g.tree_paths[static_cast<size_t>(g.base_vertex)] = pw_identity(g, g.base_vertex);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (size_t ei = 0; ei < g.edges.size(); ++ei) {
      const auto& e = g.edges[ei];
      if (!e.in_tree) continue;
      int other = -1;
      bool fwd = true;
      if (e.from.vertex == v) { other = e.to.vertex; fwd = true; }
      else if (e.to.vertex == v) { other = e.from.vertex; fwd = false; }
      else continue;
      if (seen[static_cast<size_t>(other)]) continue;
      seen[static_cast<size_t>(other)] = true;
      PathWord p = g.tree_paths[static_cast<size_t>(v)];
      p.travs.push_back({static_cast<int>(ei), fwd});
      p.sylls.push_back(identity_element(g.vertices[static_cast<size_t>(other)].group));
      g.tree_paths[static_cast<size_t>(other)] = std::move(p);
      q.push_back(other);
    }
  }
}

// ---------------- path words ----------------

int PathWord::end_vertex(const GraphOfGroups& g) const {
  int v = start;
  for (const auto& t : travs) {
    const auto& e = g.edges[static_cast<size_t>(t.edge)];
    v = t.fwd ? e.to.vertex : e.from.vertex;
  }
  return v;
}

PathWord pw_identity(const GraphOfGroups& g, int vertex) {
  PathWord p;
  p.start = vertex;
  p.sylls.push_back(identity_element(g.vertices[static_cast<size_t>(vertex)].group));
  return p;
}

PathWord pw_syllable(const GraphOfGroups& g, int vertex, GroupElement e) {
  if (e.group != g.vertices[static_cast<size_t>(vertex)].group)
    fail(Err::illegal_path, "syllable group does not match its vertex");
  PathWord p;
  p.start = vertex;
  p.sylls.push_back(std::move(e));
  return p;
}

PathWord pw_reduce(const GraphOfGroups& g, const PathWord& p) {
  PathWord out;
  out.start = p.start;
  out.sylls.push_back(p.sylls[0]);
  int cur = p.start;
  for (size_t i = 0; i < p.travs.size(); ++i) {
    Trav t = p.travs[i];
    const auto& e = g.edges[static_cast<size_t>(t.edge)];
    int expect = t.fwd ? e.from.vertex : e.to.vertex;
    if (expect != cur) fail(Err::illegal_path, "traversal does not start at the current vertex");
    cur = t.fwd ? e.to.vertex : e.from.vertex;
    const GroupElement& s = p.sylls[i + 1];
    bool pinched = false;
    if (!out.travs.empty()) {
      Trav lt = out.travs.back();
      if (lt.edge == t.edge && lt.fwd != t.fwd) {
        const auto& le = g.edges[static_cast<size_t>(lt.edge)];
        const GroupElement& mid = out.sylls.back();
        // after lt we sit at the middle vertex: 'to' side if lt was forward
        const EdgeEnd& mid_end = lt.fwd ? le.to : le.from;
        const EdgeEnd& far_end = lt.fwd ? le.from : le.to;
        if (mid_end.contains(mid)) {
          GroupElement transported = far_end.push(mid_end.preimage(mid));
          out.sylls.pop_back();
          out.travs.pop_back();
          out.sylls.back() = multiply(multiply(out.sylls.back(), transported), s);
          pinched = true;
        }
      }
    }
    if (!pinched) {
      out.travs.push_back(t);
      out.sylls.push_back(s);
    }
  }
  return out;
}

PathWord pw_concat(const GraphOfGroups& g, const PathWord& a, const PathWord& b) {
  if (a.end_vertex(g) != b.start) fail(Err::illegal_path, "concatenating non-composable paths");
  PathWord raw;
  raw.start = a.start;
  raw.sylls = a.sylls;
  raw.travs = a.travs;
  raw.sylls.back() = multiply(raw.sylls.back(), b.sylls[0]);
  for (size_t i = 0; i < b.travs.size(); ++i) {
    raw.travs.push_back(b.travs[i]);
    raw.sylls.push_back(b.sylls[i + 1]);
  }
  return pw_reduce(g, raw);
}

PathWord pw_inverse(const GraphOfGroups& g, const PathWord& a) {
  PathWord r;
  r.start = a.end_vertex(g);
  for (size_t i = a.sylls.size(); i-- > 0;) r.sylls.push_back(invert(a.sylls[i]));
  for (size_t i = a.travs.size(); i-- > 0;) r.travs.push_back({a.travs[i].edge, !a.travs[i].fwd});
  return r;
}

bool pw_equal(const GraphOfGroups& g, const PathWord& a, const PathWord& b) {
  if (a.start != b.start || a.end_vertex(g) != b.end_vertex(g)) return false;
  PathWord d = pw_concat(g, pw_inverse(g, a), b);
  return d.is_identity();
}

bool same_coset(const GraphOfGroups& g, const PathWord& p, const PathWord& q) {
  if (p.end_vertex(g) != q.end_vertex(g)) return false;
  PathWord d = pw_concat(g, pw_inverse(g, p), q);
  return d.is_syllable();
}

int pw_length(const GraphOfGroups& g, const PathWord& p) {
  int len = 0;
  for (const auto& s : p.sylls) len += word_length(s);
  for (const auto& t : p.travs)
    if (!g.edges[static_cast<size_t>(t.edge)].in_tree) ++len;
  return len;
}

namespace {
// token stream for ShortLex comparisons: (kind, a, b)
std::vector<std::array<int, 3>> pw_tokens(const GraphOfGroups& g, const PathWord& p) {
  std::vector<std::array<int, 3>> toks;
  int v = p.start;
  for (size_t i = 0; i < p.sylls.size(); ++i) {
    for (Letter l : spelling(p.sylls[i])) toks.push_back({0, v, static_cast<int>(l)});
    if (i < p.travs.size()) {
      const auto& e = g.edges[static_cast<size_t>(p.travs[i].edge)];
      toks.push_back({e.in_tree ? 2 : 1, p.travs[i].edge, p.travs[i].fwd ? 0 : 1});
      v = p.travs[i].fwd ? e.to.vertex : e.from.vertex;
    }
  }
  return toks;
}
}  // namespace

int pw_cmp_shortlex(const GraphOfGroups& g, const PathWord& a, const PathWord& b) {
  int la = pw_length(g, a), lb = pw_length(g, b);
  if (la != lb) return la < lb ? -1 : 1;
  auto ta = pw_tokens(g, a), tb = pw_tokens(g, b);
  if (ta < tb) return -1;
  if (ta > tb) return 1;
  return 0;
}

std::string pw_str(const GraphOfGroups& g, const PathWord& p) {
  std::string out;
  int v = p.start;
  auto append = [&out](const std::string& tok) {
    if (!out.empty()) out += ' ';
    out += tok;
  };
  for (size_t i = 0; i < p.sylls.size(); ++i) {
    const auto& grp = g.vertices[static_cast<size_t>(v)].group;
    for (Letter l : spelling(p.sylls[i])) {
      std::string tok = grp->symbols[static_cast<size_t>(letter_symbol(l))];
      if (letter_inverted(l)) tok += "^-1";
      append(tok);
    }
    if (i < p.travs.size()) {
      const auto& e = g.edges[static_cast<size_t>(p.travs[i].edge)];
      if (!e.in_tree) append(p.travs[i].fwd ? e.stable_letter : e.stable_letter + "^-1");
      v = p.travs[i].fwd ? e.to.vertex : e.from.vertex;
    }
  }
  if (out.empty()) out = "1";
  return out;
}

PathWord tree_path(const GraphOfGroups& g, int v) {
  return g.tree_paths[static_cast<size_t>(v)];
}

PathWord parse_gword(const GraphOfGroups& g, const std::string& text) {
  PathWord acc = pw_identity(g, g.base_vertex);
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::string sym = tok;
    std::int64_t exp = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      sym = tok.substr(0, caret);
      std::string e = tok.substr(caret + 1);
      char* end = nullptr;
      exp = std::strtoll(e.c_str(), &end, 10);
      if (end == nullptr || *end != '\0' || e.empty())
        fail(Err::parse_error, "bad exponent in token '" + tok + "'");
    }
    auto it = g.symtab.find(sym);
    if (it == g.symtab.end()) fail(Err::unknown_symbol, "unknown symbol '" + sym + "'");
    const auto& [kind, a, b] = it->second;
    if (kind == 0) {
      const auto& vg = g.vertices[static_cast<size_t>(a)].group;
      Word w;
      bool inv = exp < 0;
      for (std::int64_t i = 0; i < (inv ? -exp : exp); ++i)
        w.letters.push_back(make_letter(b, inv));
      PathWord syll = pw_syllable(g, a, reduce(vg, w));
      PathWord tp = tree_path(g, a);
      acc = pw_concat(g, acc, pw_concat(g, pw_concat(g, tp, syll), pw_inverse(g, tp)));
    } else {
      const auto& e = g.edges[static_cast<size_t>(a)];
      bool inv = exp < 0;
      for (std::int64_t i = 0; i < (inv ? -exp : exp); ++i) {
        PathWord t;
        if (!inv) {
          t = tree_path(g, e.from.vertex);
          t.travs.push_back({a, true});
          t.sylls.push_back(identity_element(g.vertices[static_cast<size_t>(e.to.vertex)].group));
          t = pw_concat(g, t, pw_inverse(g, tree_path(g, e.to.vertex)));
        } else {
          t = tree_path(g, e.to.vertex);
          t.travs.push_back({a, false});
          t.sylls.push_back(identity_element(g.vertices[static_cast<size_t>(e.from.vertex)].group));
          t = pw_concat(g, t, pw_inverse(g, tree_path(g, e.from.vertex)));
        }
        acc = pw_concat(g, acc, t);
      }
    }
  }
  return acc;
}

PathWord normal_form(const GraphOfGroups& g, const PathWord& raw) { return pw_reduce(g, raw); }

bool pw_infinite_order(const GraphOfGroups& g, const PathWord& p0) {
  PathWord p = pw_reduce(g, p0);
  if (p.start != p.end_vertex(g)) fail(Err::illegal_path, "order of a non-loop");
  size_t guard = p.travs.size() + 2;
  size_t rotations = 0;
  while (!p.travs.empty() && guard-- > 0) {
    size_t before = p.travs.size();
    // conjugate by the leading syllable and first traversal
    PathWord pre;
    pre.start = p.start;
    pre.sylls.push_back(p.sylls[0]);
    pre.travs.push_back(p.travs[0]);
    const auto& e = g.edges[static_cast<size_t>(p.travs[0].edge)];
    int mid = p.travs[0].fwd ? e.to.vertex : e.from.vertex;
    pre.sylls.push_back(identity_element(g.vertices[static_cast<size_t>(mid)].group));
    p = pw_concat(g, pw_concat(g, pw_inverse(g, pre), p), pre);
    if (p.travs.size() >= before) {
      if (++rotations > before + 1) break;  // cyclically reduced
    } else {
      rotations = 0;
    }
  }
  if (!p.travs.empty()) return true;
  return infinite_order(p.sylls[0]);
}

std::vector<GroupElement> vertex_generators(const GraphOfGroups& g,
                                            const std::vector<PathWord>& global_gens, int v) {
  if (v < 0 || v >= static_cast<int>(g.vertices.size()))
    fail(Err::unknown_vertex, "vertex index out of range");
  std::vector<GroupElement> out;
  for (const auto& e : g.edges) {
    if (e.from.vertex == v)
      for (const auto& im : e.from.image_gens) out.push_back(im);
    if (e.to.vertex == v)
      for (const auto& im : e.to.image_gens) out.push_back(im);
  }
  for (const auto& w : global_gens) {
    PathWord r = pw_reduce(g, w);
    int cur = r.start;
    for (size_t i = 0; i < r.sylls.size(); ++i) {
      if (cur == v && !r.sylls[i].is_identity()) out.push_back(r.sylls[i]);
      if (i < r.travs.size()) {
        const auto& e = g.edges[static_cast<size_t>(r.travs[i].edge)];
        cur = r.travs[i].fwd ? e.to.vertex : e.from.vertex;
      }
    }
  }
  // drop identities, sort ShortLex, dedupe
  std::vector<GroupElement> clean;
  for (auto& e : out)
    if (!e.is_identity()) clean.push_back(e);
  std::sort(clean.begin(), clean.end(),
            [](const GroupElement& a, const GroupElement& b) { return shortlex_cmp(a, b) < 0; });
  clean.erase(std::unique(clean.begin(), clean.end(),
                          [](const GroupElement& a, const GroupElement& b) {
                            return shortlex_cmp(a, b) == 0;
                          }),
              clean.end());
  return clean;
}

// ---------------- validate ----------------

bool ValidationReport::ok() const {
  if (!structure_ok) return false;
  for (const auto& ec : edge_checks) {
    if (!ec.from.mono || !ec.to.mono) return false;
    if (!ec.from.in_container || !ec.to.in_container) return false;
  }
  return true;
}

ValidationReport validate(const GraphOfGroups& g) {
  ValidationReport rep;
  // connectivity
  if (!g.vertices.empty()) {
    std::vector<bool> seen(g.vertices.size(), false);
    std::deque<int> q{g.base_vertex};
    seen[static_cast<size_t>(g.base_vertex)] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (const auto& e : g.edges) {
        for (int other : {e.from.vertex == v ? e.to.vertex : -1, e.to.vertex == v ? e.from.vertex : -1})
          if (other >= 0 && !seen[static_cast<size_t>(other)]) {
            seen[static_cast<size_t>(other)] = true;
            q.push_back(other);
          }
      }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
      rep.structure_ok = false;
      rep.structure_errors.push_back("DisconnectedGraph: underlying graph is not connected");
    }
  }
  // spanning tree: acyclic, spanning
  {
    std::vector<int> parent(g.vertices.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (parent[static_cast<size_t>(x)] != x) {
        parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
        x = parent[static_cast<size_t>(x)];
      }
      return x;
    };
    int tree_edges = 0;
    bool cyclic = false;
    for (const auto& e : g.edges) {
      if (!e.in_tree) continue;
      ++tree_edges;
      int a = find(e.from.vertex), b = find(e.to.vertex);
      if (a == b) cyclic = true;
      else parent[static_cast<size_t>(b)] = a;
    }
    int comps = 0;
    for (size_t i = 0; i < parent.size(); ++i)
      if (find(static_cast<int>(i)) == static_cast<int>(i)) ++comps;
    if (cyclic || comps != 1 || tree_edges != static_cast<int>(g.vertices.size()) - 1) {
      rep.structure_ok = false;
      rep.structure_errors.push_back("BadSpanningTree: declared spanning tree does not span");
    }
  }

  for (const auto& e : g.edges) {
    EdgeCheck ec;
    for (int side = 0; side < 2; ++side) {
      const EdgeEnd& end = side == 0 ? e.from : e.to;
      EndCheck& c = side == 0 ? ec.from : ec.to;
      c.mono = end.mono;
      if (!c.mono)
        c.detail = "InjectionNotMono(" + e.id + ", " + (side == 0 ? "from" : "to") + ")";
      const auto& vert = g.vertices[static_cast<size_t>(end.vertex)];
      const auto& container = vert.peripherals[static_cast<size_t>(end.container)];
      c.in_container = true;
      for (const auto& im : end.image_gens)
        if (!container.sub.contains(im)) { c.in_container = false; break; }
      if (!c.in_container)
        c.detail = "ContainerViolation(" + e.id + ", " + (side == 0 ? "from" : "to") + ")";
      if (c.in_container) {
        c.maximal_in_container = true;
        for (const auto& pg : container.sub.gens)
          if (!end.contains(pg)) { c.maximal_in_container = false; break; }
      }
    }
    rep.edge_checks.push_back(std::move(ec));
  }

  for (size_t vi = 0; vi < g.vertices.size(); ++vi) {
    const auto& v = g.vertices[vi];
    VertexCheck vc;
    std::vector<Subgroup> periph_subs;
    for (const auto& p : v.peripherals) periph_subs.push_back(p.sub);
    vc.peripherals_malnormal = malnormal_collection(periph_subs);
    std::vector<Subgroup> edge_subs;
    for (const auto& e : g.edges) {
      if (e.from.vertex == static_cast<int>(vi)) edge_subs.push_back(e.from.image);
      if (e.to.vertex == static_cast<int>(vi)) edge_subs.push_back(e.to.image);
    }
    vc.edge_family_malnormal = malnormal_collection(edge_subs);
    for (const auto& e : g.edges) {
      if (e.from.vertex == static_cast<int>(vi))
        vc.edge_totality.push_back({e.id + ".from", subgroup_total(e.from.image, periph_subs)});
      if (e.to.vertex == static_cast<int>(vi))
        vc.edge_totality.push_back({e.id + ".to", subgroup_total(e.to.image, periph_subs)});
    }
    rep.vertex_checks.push_back(std::move(vc));
  }
  return rep;
}

}  // namespace bsk
