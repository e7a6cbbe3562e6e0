#include "bsk/stallings.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace bsk {

namespace {

struct UF {
  std::vector<int> p;
  explicit UF(int n) : p(n) { for (int i = 0; i < n; ++i) p[i] = i; }
  int find(int x) { while (p[x] != x) { p[x] = p[p[x]]; x = p[x]; } return x; }
  void unite(int a, int b) { a = find(a); b = find(b); if (a != b) p[b] = a; }
};

std::vector<Letter> free_mul(const std::vector<Letter>& a, const std::vector<Letter>& b) {
  std::vector<Letter> out = a;
  for (Letter l : b) {
    if (!out.empty() && out.back() == letter_inverse(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

std::vector<Letter> free_inv(const std::vector<Letter>& a) {
  std::vector<Letter> out;
  out.reserve(a.size());
  for (auto it = a.rbegin(); it != a.rend(); ++it) out.push_back(letter_inverse(*it));
  return out;
}

struct FoldEdge {
  int a, b, sym;
  bool alive = true;
  std::vector<Letter> dec;
};

struct FoldState {
  int nverts = 1;  // vertex 0 = base
  std::vector<FoldEdge> edges;
  bool with_dec = false;
  bool collision = false;

  int new_vertex() { return nverts++; }

  void gauge(UF& uf, int w, const std::vector<Letter>& g) {
    std::vector<Letter> gi = free_inv(g);
    for (auto& e : edges) {
      if (!e.alive) continue;
      bool ini = uf.find(e.a) == w;
      bool ter = uf.find(e.b) == w;
      if (ini && ter) e.dec = free_mul(free_mul(g, e.dec), gi);
      else if (ini) e.dec = free_mul(g, e.dec);
      else if (ter) e.dec = free_mul(e.dec, gi);
    }
  }

  // Reconcile decorations of e (dies) and f (survives) before identifying the
  // named endpoints; out_side means the shared endpoint is the tail.
  void reconcile(UF& uf, FoldEdge& e, FoldEdge& f, bool out_side) {
    if (!with_dec) return;
    if (e.dec == f.dec) return;
    int base_cls = uf.find(0);
    int shared = out_side ? uf.find(e.a) : uf.find(e.b);
    int we = out_side ? uf.find(e.b) : uf.find(e.a);
    int wf = out_side ? uf.find(f.b) : uf.find(f.a);
    if (we == wf) {  // parallel edges with differing decorations: genuine relation
      collision = true;
      return;
    }
    if (out_side) {
      // want dec'(e) == dec'(f); decorations multiply tail-side on the left,
      // head-side on the right (inverted).
      if (we != base_cls && we != shared) {
        gauge(uf, we, free_mul(free_inv(f.dec), e.dec));  // dec(e)*g^-1 = dec(f)
      } else if (wf != base_cls && wf != shared) {
        gauge(uf, wf, free_mul(free_inv(e.dec), f.dec));
      } else if (we == shared && we != base_cls) {
        // e is a loop at the shared class: g*dec(e)*g^-1 = g*dec(f)
        gauge(uf, we, free_mul(free_inv(f.dec), e.dec));
      } else if (wf == shared && wf != base_cls) {
        gauge(uf, wf, free_mul(free_inv(e.dec), f.dec));
      } else {
        collision = true;  // both endpoints pinned at base
      }
    } else {
      if (we != base_cls && we != shared) {
        gauge(uf, we, free_mul(f.dec, free_inv(e.dec)));  // g*dec(e) = dec(f)
      } else if (wf != base_cls && wf != shared) {
        gauge(uf, wf, free_mul(e.dec, free_inv(f.dec)));
      } else if (we == shared && we != base_cls) {
        gauge(uf, we, free_mul(f.dec, free_inv(e.dec)));
      } else if (wf == shared && wf != base_cls) {
        gauge(uf, wf, free_mul(e.dec, free_inv(f.dec)));
      } else {
        collision = true;
      }
    }
    if (!collision && e.dec != f.dec) {
      // the gauge above must have matched them; if not we made an error
      collision = true;
    }
  }

  void fold(UF& uf) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<int, int>, int> seen;
      for (size_t i = 0; i < edges.size() && !changed; ++i) {
        if (!edges[i].alive) continue;
        auto key = std::make_pair(uf.find(edges[i].a), edges[i].sym);
        auto it = seen.find(key);
        if (it == seen.end()) { seen[key] = static_cast<int>(i); continue; }
        FoldEdge& f = edges[static_cast<size_t>(it->second)];
        FoldEdge& e = edges[i];
        reconcile(uf, e, f, true);
        uf.unite(f.b, e.b);
        e.alive = false;
        changed = true;
      }
      if (changed) continue;
      seen.clear();
      for (size_t i = 0; i < edges.size() && !changed; ++i) {
        if (!edges[i].alive) continue;
        auto key = std::make_pair(uf.find(edges[i].b), edges[i].sym);
        auto it = seen.find(key);
        if (it == seen.end()) { seen[key] = static_cast<int>(i); continue; }
        FoldEdge& f = edges[static_cast<size_t>(it->second)];
        FoldEdge& e = edges[i];
        reconcile(uf, e, f, false);
        uf.unite(f.a, e.a);
        e.alive = false;
        changed = true;
      }
    }
  }
};

// Compacts, trims non-core hanging trees, renumbers canonically (BFS order).
void finish_core(const GroupRef& group, FoldState& st, UF& uf, CoreGraph& core,
                 std::vector<std::vector<std::vector<Letter>>>* dec_out) {
  int nsym = group->rank();
  // collect classes
  std::map<int, int> cls_id;
  auto cls = [&](int v) {
    int r = uf.find(v);
    auto it = cls_id.find(r);
    if (it != cls_id.end()) return it->second;
    int id = static_cast<int>(cls_id.size());
    cls_id[r] = id;
    return id;
  };
  int base = cls(0);
  struct CEdge { int a, b, sym; std::vector<Letter> dec; bool alive = true; };
  std::vector<CEdge> ces;
  for (auto& e : st.edges)
    if (e.alive) ces.push_back({cls(e.a), cls(e.b), e.sym, e.dec, true});
  int n = static_cast<int>(cls_id.size());

  // trim: repeatedly drop degree <= 1 non-base vertices
  std::vector<int> deg(n, 0);
  auto recompute = [&]() {
    std::fill(deg.begin(), deg.end(), 0);
    for (auto& e : ces)
      if (e.alive) { deg[e.a]++; deg[e.b]++; }
  };
  recompute();
  bool trimmed = true;
  while (trimmed) {
    trimmed = false;
    for (int v = 0; v < n; ++v) {
      if (v == base || deg[v] > 1) continue;
      bool had = false;
      for (auto& e : ces) {
        if (!e.alive) continue;
        if (e.a == v || e.b == v) { e.alive = false; had = true; }
      }
      if (had) { recompute(); trimmed = true; }
      deg[v] = 0;
    }
  }

  // adjacency on surviving vertices
  std::vector<std::vector<int>> out(n, std::vector<int>(nsym, -1)), in_(n, std::vector<int>(nsym, -1));
  std::vector<std::vector<std::vector<Letter>>> dec(n, std::vector<std::vector<Letter>>(nsym));
  for (auto& e : ces) {
    if (!e.alive) continue;
    assert(out[e.a][e.sym] == -1 && in_[e.b][e.sym] == -1 && "graph not folded");
    out[e.a][e.sym] = e.b;
    in_[e.b][e.sym] = e.a;
    dec[e.a][e.sym] = e.dec;
  }

  // canonical BFS renumber from base
  std::vector<int> order(n, -1);
  std::deque<int> q{base};
  order[base] = 0;
  int next = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int s = 0; s < nsym; ++s) {
      int w = out[v][s];
      if (w >= 0 && order[w] < 0) { order[w] = next++; q.push_back(w); }
      w = in_[v][s];
      if (w >= 0 && order[w] < 0) { order[w] = next++; q.push_back(w); }
    }
  }
  int m = next;
  core.group = group;
  core.base = 0;
  core.out.assign(m, std::vector<int>(nsym, -1));
  core.in_.assign(m, std::vector<int>(nsym, -1));
  if (dec_out) dec_out->assign(m, std::vector<std::vector<Letter>>(nsym));
  for (int v = 0; v < n; ++v) {
    if (order[v] < 0) continue;  // unreachable (possible only for fully trimmed junk)
    for (int s = 0; s < nsym; ++s) {
      int w = out[v][s];
      if (w >= 0 && order[w] >= 0) {
        core.out[order[v]][s] = order[w];
        core.in_[order[w]][s] = order[v];
        if (dec_out) (*dec_out)[order[v]][s] = dec[v][s];
      }
    }
  }
}

void add_petal(FoldState& st, const std::vector<Letter>& w, int dec_sym) {
  if (w.empty()) return;
  int cur = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    int nxt = (i + 1 == w.size()) ? 0 : st.new_vertex();
    Letter l = w[i];
    std::vector<Letter> d;
    if (st.with_dec && i == 0 && dec_sym >= 0)
      d.push_back(make_letter(dec_sym, letter_inverted(l)));
    if (!letter_inverted(l))
      st.edges.push_back({cur, nxt, letter_symbol(l), true, d});
    else
      st.edges.push_back({nxt, cur, letter_symbol(l), true, d});
    cur = nxt;
  }
}

}  // namespace

int CoreGraph::edge_count() const {
  int c = 0;
  for (const auto& row : out)
    for (int w : row)
      if (w >= 0) ++c;
  return c;
}

int CoreGraph::trace(int from, const std::vector<Letter>& letters) const {
  int v = from;
  for (Letter l : letters) {
    int s = letter_symbol(l);
    v = letter_inverted(l) ? in_[v][s] : out[v][s];
    if (v < 0) return -1;
  }
  return v;
}

bool CoreGraph::contains(const GroupElement& w) const {
  if (w.group != group) fail(Err::group_mismatch, "membership across groups");
  return trace(base, w.fword) == base;
}

std::vector<std::vector<Letter>> CoreGraph::path_words() const {
  int n = vertex_count();
  std::vector<std::vector<Letter>> pw(n);
  std::vector<bool> seen(n, false);
  std::deque<int> q{base};
  seen[base] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int s = 0; s < group->rank(); ++s) {
      int w = out[v][s];
      if (w >= 0 && !seen[w]) {
        seen[w] = true;
        pw[w] = pw[v];
        pw[w].push_back(make_letter(s, false));
        q.push_back(w);
      }
      w = in_[v][s];
      if (w >= 0 && !seen[w]) {
        seen[w] = true;
        pw[w] = pw[v];
        pw[w].push_back(make_letter(s, true));
        q.push_back(w);
      }
    }
  }
  return pw;
}

std::vector<GroupElement> CoreGraph::loop_basis() const { return loop_basis_at(base); }

std::vector<GroupElement> CoreGraph::loop_basis_at(int vtx) const {
  auto pw = path_words();
  int n = vertex_count();
  // mark spanning tree edges (tail, sym) from the BFS in path_words
  std::set<std::pair<int, int>> tree;
  {
    std::vector<bool> seen(n, false);
    std::deque<int> q{base};
    seen[base] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int s = 0; s < group->rank(); ++s) {
        int w = out[v][s];
        if (w >= 0 && !seen[w]) { seen[w] = true; tree.insert({v, s}); q.push_back(w); }
        w = in_[v][s];
        if (w >= 0 && !seen[w]) { seen[w] = true; tree.insert({w, s}); q.push_back(w); }
      }
    }
  }
  std::vector<GroupElement> basis;
  Word conj;  // path word of vtx
  conj.letters = pw[vtx];
  for (int v = 0; v < n; ++v) {
    for (int s = 0; s < group->rank(); ++s) {
      int w = out[v][s];
      if (w < 0 || tree.count({v, s})) continue;
      Word raw;
      raw.letters = free_inv(conj.letters);
      for (Letter l : pw[v]) raw.letters.push_back(l);
      raw.letters.push_back(make_letter(s, false));
      for (Letter l : free_inv(pw[w])) raw.letters.push_back(l);
      for (Letter l : conj.letters) raw.letters.push_back(l);
      basis.push_back(reduce(group, raw));
    }
  }
  return basis;
}

bool CoreGraph::contains_whole_group() const {
  for (int s = 0; s < group->rank(); ++s) {
    Word w;
    w.letters.push_back(make_letter(s, false));
    if (!contains(reduce(group, w))) return false;
  }
  return true;
}

std::string CoreGraph::to_dot(const std::string& name) const {
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n";
  os << "  n0 [shape=doublecircle];\n";
  for (int v = 0; v < vertex_count(); ++v)
    for (int s = 0; s < group->rank(); ++s)
      if (out[v][s] >= 0)
        os << "  n" << v << " -> n" << out[v][s] << " [label=\"" << group->symbols[s] << "\"];\n";
  os << "}\n";
  return os.str();
}

CoreGraph core_graph(const GroupRef& group, const std::vector<GroupElement>& generators) {
  if (group->kind != GroupKind::free_group)
    fail(Err::not_free_group, "core graphs require a free group, got " + group->name);
  FoldState st;
  for (const auto& g : generators) {
    if (g.group != group) fail(Err::group_mismatch, "generator from another group");
    add_petal(st, g.fword, -1);
  }
  UF uf(st.nverts);
  st.fold(uf);
  CoreGraph core;
  finish_core(group, st, uf, core, nullptr);
  return core;
}

DecoratedCore decorated_core(const GroupRef& domain, const GroupRef& ambient,
                             const std::vector<GroupElement>& images) {
  if (ambient->kind != GroupKind::free_group)
    fail(Err::not_free_group, "decorated core requires a free ambient group");
  DecoratedCore dc;
  dc.domain = domain;
  FoldState st;
  st.with_dec = true;
  bool killed_generator = false;
  for (size_t i = 0; i < images.size(); ++i) {
    if (images[i].fword.empty()) { killed_generator = true; continue; }
    add_petal(st, images[i].fword, static_cast<int>(i));
  }
  UF uf(st.nverts);
  st.fold(uf);
  finish_core(ambient, st, uf, dc.core, &dc.dec);
  dc.relation_collision = st.collision;
  dc.mono = !st.collision && !killed_generator &&
            dc.core.rank() == static_cast<int>(images.size());
  return dc;
}

std::vector<Letter> DecoratedCore::preimage(const GroupElement& w) const {
  std::vector<Letter> acc;
  int v = core.base;
  for (Letter l : w.fword) {
    int s = letter_symbol(l);
    if (!letter_inverted(l)) {
      int nxt = core.out[v][s];
      if (nxt < 0) fail(Err::group_mismatch, "preimage of element outside image");
      acc = free_mul(acc, dec[v][s]);
      v = nxt;
    } else {
      int tail = core.in_[v][s];
      if (tail < 0) fail(Err::group_mismatch, "preimage of element outside image");
      acc = free_mul(acc, free_inv(dec[tail][s]));
      v = tail;
    }
  }
  if (v != core.base) fail(Err::group_mismatch, "preimage of element outside image");
  return acc;
}

std::vector<GroupElement> product_component_loops(const CoreGraph& c1, const CoreGraph& c2,
                                                  int a0, int b0) {
  if (c1.group != c2.group) fail(Err::group_mismatch, "pullback across groups");
  const GroupRef& G = c1.group;
  int nsym = G->rank();
  std::map<std::pair<int, int>, std::vector<Letter>> word;
  std::deque<std::pair<int, int>> q;
  auto start = std::make_pair(a0, b0);
  q.push_back(start);
  word[start] = {};
  std::vector<std::vector<Letter>> raw_gens;
  while (!q.empty()) {
    auto [a, b] = q.front();
    q.pop_front();
    for (int s = 0; s < nsym; ++s) {
      for (int dir = 0; dir < 2; ++dir) {
        int a2, b2;
        if (dir == 0) { a2 = c1.out[a][s]; b2 = c2.out[b][s]; }
        else { a2 = c1.in_[a][s]; b2 = c2.in_[b][s]; }
        if (a2 < 0 || b2 < 0) continue;
        Letter l = make_letter(s, dir == 1);
        auto to = std::make_pair(a2, b2);
        auto it = word.find(to);
        if (it == word.end()) {
          auto w = word[{a, b}];
          w.push_back(l);
          word[to] = std::move(w);
          q.push_back(to);
        } else if (dir == 0) {  // each directed edge is scanned once from its tail
          auto wt = free_mul(word[{a, b}], {l});
          if (wt != it->second) {
            auto loop = free_mul(wt, free_inv(it->second));
            if (!loop.empty()) raw_gens.push_back(loop);
          }
        }
      }
    }
  }
  std::vector<GroupElement> gens;
  std::set<std::vector<Letter>> uniq;
  for (auto& w : raw_gens) {
    if (uniq.count(w) || uniq.count(free_inv(w))) continue;
    uniq.insert(w);
    Word raw;
    raw.letters = w;
    gens.push_back(reduce(G, raw));
  }
  return gens;
}

std::vector<PullbackComponent> pullback(const CoreGraph& c1, const CoreGraph& c2) {
  if (c1.group != c2.group) fail(Err::group_mismatch, "pullback across groups");
  const GroupRef& G = c1.group;
  int n1 = c1.vertex_count(), n2 = c2.vertex_count();
  int nsym = G->rank();
  auto id = [&](int a, int b) { return a * n2 + b; };
  UF uf(n1 * n2);
  std::vector<int> edge_cnt(n1 * n2, 0);  // per component root later
  struct PEdge { int a1, a2, sym; };
  std::vector<PEdge> pedges;
  for (int v1 = 0; v1 < n1; ++v1)
    for (int s = 0; s < nsym; ++s) {
      int w1 = c1.out[v1][s];
      if (w1 < 0) continue;
      for (int v2 = 0; v2 < n2; ++v2) {
        int w2 = c2.out[v2][s];
        if (w2 < 0) continue;
        pedges.push_back({v1, v2, s});
        uf.unite(id(v1, v2), id(w1, w2));
      }
    }
  // group vertices + edges by component
  std::map<int, std::vector<std::pair<int, int>>> comp_verts;
  for (int v1 = 0; v1 < n1; ++v1)
    for (int v2 = 0; v2 < n2; ++v2) comp_verts[uf.find(id(v1, v2))].push_back({v1, v2});
  std::map<int, int> comp_edges;
  for (auto& e : pedges) comp_edges[uf.find(id(e.a1, e.a2))]++;

  auto pw1 = c1.path_words();
  auto pw2 = c2.path_words();

  std::vector<PullbackComponent> out;
  for (auto& [root, verts] : comp_verts) {
    int E = comp_edges.count(root) ? comp_edges[root] : 0;
    int V = static_cast<int>(verts.size());
    int rank = E - V + 1;
    if (rank < 1) continue;
    PullbackComponent pc;
    pc.vertices = verts;
    pc.rank = rank;
    pc.contains_base_pair = uf.find(id(c1.base, c2.base)) == root;
    // representative: ShortLex-least coset word over the component's vertices
    bool first = true;
    for (auto& [a, b] : verts) {
      Word raw;
      raw.letters = free_mul(pw2[b], free_inv(pw1[a]));
      GroupElement g = reduce(G, raw);
      if (first || shortlex_cmp(g, pc.coset) < 0) {
        pc.coset = g;
        pc.repr_a = a;
        pc.repr_b = b;
        first = false;
      }
    }
    pc.loop_gens = product_component_loops(c1, c2, pc.repr_a, pc.repr_b);
    // fullness on either factor
    auto lifts = [&](const CoreGraph& cg, bool second) {
      int anchor = second ? pc.repr_b : pc.repr_a;
      auto basis = cg.loop_basis_at(anchor);
      for (const auto& g : basis) {
        int a = pc.repr_a, b = pc.repr_b;
        for (Letter l : g.fword) {
          int s = letter_symbol(l);
          if (!letter_inverted(l)) { a = c1.out[a][s]; b = c2.out[b][s]; }
          else { a = c1.in_[a][s]; b = c2.in_[b][s]; }
          if (a < 0 || b < 0) return false;
        }
        if (a != pc.repr_a || b != pc.repr_b) return false;
      }
      return true;
    };
    pc.full_on_second = lifts(c2, true);
    pc.full_on_first = lifts(c1, false);
    out.push_back(std::move(pc));
  }
  return out;
}

MalnormalVerdict is_malnormal_collection(const std::vector<CoreGraph>& subgroups) {
  MalnormalVerdict v;
  for (size_t i = 0; i < subgroups.size(); ++i) {
    for (size_t j = i; j < subgroups.size(); ++j) {
      auto comps = pullback(subgroups[i], subgroups[j]);
      for (const auto& c : comps) {
        if (i == j && c.contains_base_pair) continue;  // tautological double coset
        v.malnormal = false;
        v.i = static_cast<int>(i);
        v.j = static_cast<int>(j);
        v.witness = c.coset;
        return v;
      }
    }
  }
  return v;
}

TotalVerdict is_total(const CoreGraph& h, const std::vector<CoreGraph>& peripherals) {
  TotalVerdict v;
  for (size_t k = 0; k < peripherals.size(); ++k) {
    auto comps = pullback(h, peripherals[k]);
    for (const auto& c : comps) {
      if (c.full_on_second) continue;  // H cap P^g = P^g
      v.total = false;
      v.peripheral = static_cast<int>(k);
      v.witness = c.coset;
      return v;
    }
  }
  return v;
}

}  // namespace bsk
