#include "bsk/bass_serre.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace bsk {

std::vector<GroupElement> coset_transversal(const GroupRef& vg, const Subgroup& sub, int maxlen) {
  std::vector<GroupElement> reps;
  for (const auto& x : enumerate_ball(vg, maxlen)) {
    bool fresh = true;
    for (const auto& r : reps) {
      if (sub.contains(multiply(invert(r), x))) { fresh = false; break; }
    }
    if (fresh) reps.push_back(x);
  }
  return reps;
}

int TreeWindow::find_coset(const PathWord& p) const {
  PathWord q = pw_reduce(*gog, p);
  int gamma = q.end_vertex(*gog);
  int depth = pw_depth(q);
  auto it = buckets.find({gamma, depth});
  if (it == buckets.end()) return -1;
  for (int idx : it->second)
    if (same_coset(*gog, verts[static_cast<size_t>(idx)].rep, q)) return idx;
  return -1;
}

std::optional<int> TreeWindow::act_vertex(const PathWord& g, int idx) const {
  PathWord moved = pw_concat(*gog, g, verts[static_cast<size_t>(idx)].rep);
  int found = find_coset(moved);
  if (found < 0) return std::nullopt;
  return found;
}

std::vector<int> TreeWindow::tree_geodesic(int a, int b) const {
  std::vector<int> ea, eb;
  int x = a, y = b;
  while (verts[static_cast<size_t>(x)].depth > verts[static_cast<size_t>(y)].depth) {
    ea.push_back(verts[static_cast<size_t>(x)].parent_edge);
    x = verts[static_cast<size_t>(x)].parent;
  }
  while (verts[static_cast<size_t>(y)].depth > verts[static_cast<size_t>(x)].depth) {
    eb.push_back(verts[static_cast<size_t>(y)].parent_edge);
    y = verts[static_cast<size_t>(y)].parent;
  }
  while (x != y) {
    ea.push_back(verts[static_cast<size_t>(x)].parent_edge);
    eb.push_back(verts[static_cast<size_t>(y)].parent_edge);
    x = verts[static_cast<size_t>(x)].parent;
    y = verts[static_cast<size_t>(y)].parent;
  }
  for (auto it = eb.rbegin(); it != eb.rend(); ++it) ea.push_back(*it);
  return ea;
}

TreeWindow build_tree_window(const GraphOfGroups& g, int R, int L) {
  if (R < 0 || L < 1) fail(Err::window_too_small, "need R >= 0 and L >= 1");
  for (const auto& e : g.edges) {
    auto maxlen = [](const std::vector<GroupElement>& gens) {
      int m = 0;
      for (const auto& x : gens) m = std::max(m, word_length(x));
      return m;
    };
    int mf = maxlen(e.from.image_gens), mt = maxlen(e.to.image_gens);
    if (std::min(mf, mt) > L)
      fail(Err::window_too_small,
           "word window " + std::to_string(L) + " cannot see the edge group of '" + e.id + "'");
  }

  TreeWindow w;
  w.gog = &g;
  w.R = R;
  w.L = L;
  w.verts.push_back({pw_identity(g, g.base_vertex), g.base_vertex, -1, -1, 0});
  w.buckets[{g.base_vertex, 0}].push_back(0);

  // transversal cache per (edge, side, budget)
  std::map<std::tuple<int, int, int>, std::vector<GroupElement>> trans_cache;
  auto transversal = [&](int ei, bool from_side, int budget) -> const std::vector<GroupElement>& {
    auto key = std::make_tuple(ei, from_side ? 0 : 1, budget);
    auto it = trans_cache.find(key);
    if (it != trans_cache.end()) return it->second;
    const EdgeEnd& end = g.end(ei, from_side);
    const GroupRef& vg = g.vertices[static_cast<size_t>(end.vertex)].group;
    auto reps = coset_transversal(vg, end.image, budget);
    return trans_cache.emplace(key, std::move(reps)).first->second;
  };

  std::vector<int> layer{0};
  for (int depth = 1; depth <= R && !layer.empty(); ++depth) {
    struct Cand {
      int from_idx;
      int gamma_edge;
      bool fwd;
      GroupElement rep_r;
      PathWord path;
    };
    std::vector<Cand> cands;
    for (int xi : layer) {
      const auto& xv = w.verts[static_cast<size_t>(xi)];
      int plen = pw_length(g, xv.rep);
      for (size_t ei = 0; ei < g.edges.size(); ++ei) {
        const auto& e = g.edges[ei];
        for (int dir = 0; dir < 2; ++dir) {
          bool fwd = dir == 0;
          const EdgeEnd& here = fwd ? e.from : e.to;
          const EdgeEnd& there = fwd ? e.to : e.from;
          if (here.vertex != xv.gamma_vertex) continue;
          int budget = L - plen - (e.in_tree ? 0 : 1);
          if (budget < 0) continue;
          for (const auto& r : transversal(static_cast<int>(ei), fwd, budget)) {
            PathWord step = pw_syllable(g, here.vertex, r);
            step.travs.push_back({static_cast<int>(ei), fwd});
            step.sylls.push_back(identity_element(g.vertices[static_cast<size_t>(there.vertex)].group));
            PathWord cand = pw_concat(g, xv.rep, step);
            if (pw_depth(cand) < depth) continue;  // backtracks onto the parent
            if (pw_length(g, cand) > L) continue;
            cands.push_back({xi, static_cast<int>(ei), fwd, r, std::move(cand)});
          }
        }
      }
    }
    std::vector<int> next_layer;
    for (auto& c : cands) {
      int gamma = c.path.end_vertex(g);
      int existing = -1;
      auto bit = w.buckets.find({gamma, depth});
      if (bit != w.buckets.end()) {
        for (int idx : bit->second)
          if (same_coset(g, w.verts[static_cast<size_t>(idx)].rep, c.path)) { existing = idx; break; }
      }
      int y;
      if (existing < 0) {
        y = static_cast<int>(w.verts.size());
        w.verts.push_back({c.path, gamma, c.from_idx, -1, depth});
        w.buckets[{gamma, depth}].push_back(y);
        next_layer.push_back(y);
      } else {
        // distinct candidates reaching one coset would contradict the tree structure
        fail(Err::bad_input, "internal: duplicate coset discovered twice in one layer");
      }
      TreeWindow::E edge;
      edge.a = c.from_idx;
      edge.b = y;
      edge.gamma_edge = c.gamma_edge;
      edge.fwd = c.fwd;
      edge.rep_r = c.rep_r;
      PathWord corner = pw_concat(g, pw_inverse(g, w.verts[static_cast<size_t>(y)].rep), c.path);
      if (!corner.is_syllable()) fail(Err::bad_input, "internal: edge corner is not a syllable");
      edge.s_child = corner.sylls[0];
      int eidx = static_cast<int>(w.edges.size());
      w.verts[static_cast<size_t>(y)].parent_edge = eidx;
      w.edges.push_back(std::move(edge));
    }
    layer = std::move(next_layer);
  }

  w.adj.assign(w.verts.size(), {});
  for (size_t i = 0; i < w.edges.size(); ++i) {
    w.adj[static_cast<size_t>(w.edges[i].a)].push_back(static_cast<int>(i));
    w.adj[static_cast<size_t>(w.edges[i].b)].push_back(static_cast<int>(i));
  }
  return w;
}

StabilizerDescriptor vertex_stabilizer(const TreeWindow& w, int idx) {
  if (idx < 0 || idx >= static_cast<int>(w.verts.size()))
    fail(Err::not_in_window, "vertex index out of window");
  return {w.verts[static_cast<size_t>(idx)].rep, w.verts[static_cast<size_t>(idx)].gamma_vertex};
}

bool stabilizes_vertex(const TreeWindow& w, const PathWord& x, int idx) {
  const auto& rep = w.verts[static_cast<size_t>(idx)].rep;
  PathWord moved = pw_concat(*w.gog, x, rep);
  return same_coset(*w.gog, moved, rep);
}

ResolvedTame resolve_tame(const GraphOfGroups& g, const TreeWindow& w, const TamePresentation& tp) {
  ResolvedTame out;
  out.id = tp.id;
  for (const auto& sel : tp.selected) {
    ResolvedSelection rs;
    PathWord p = sel.rep_text.empty() ? pw_identity(g, g.base_vertex) : parse_gword(g, sel.rep_text);
    int vi = g.vertex_index(sel.vertex_id);
    if (vi < 0) fail(Err::unknown_vertex, "unknown vertex '" + sel.vertex_id + "'");
    // move the loop at base to a path ending at the right vertex
    PathWord full = pw_concat(g, p, tree_path(g, vi));
    rs.window_vertex = w.find_coset(full);
    if (rs.window_vertex < 0)
      fail(Err::selection_outside_window, "selected coset is outside the window");
    const GroupRef& vg = g.vertices[static_cast<size_t>(vi)].group;
    for (const auto& t : sel.gen_texts) rs.gens.push_back(reduce(vg, parse_word(vg, t)));
    rs.sub = Subgroup::make(vg, rs.gens);
    out.selected.push_back(std::move(rs));
  }
  for (const auto& t : tp.connecting_texts) out.connecting.push_back(parse_gword(g, t));
  for (const auto& rs : out.selected) {
    const auto& rep = w.verts[static_cast<size_t>(rs.window_vertex)].rep;
    for (const auto& ge : rs.gens) {
      PathWord conj = pw_concat(
          g, pw_concat(g, rep, pw_syllable(g, rep.end_vertex(g), ge)), pw_inverse(g, rep));
      out.h_generators.push_back(conj);
    }
  }
  for (const auto& c : out.connecting) out.h_generators.push_back(c);
  return out;
}

InducedSplitting minimal_subtree_and_splitting(const GraphOfGroups& g, const TreeWindow& w,
                                               const ResolvedTame& h) {
  InducedSplitting out;
  std::set<int> seeds;
  for (const auto& rs : h.selected) seeds.insert(rs.window_vertex);
  for (const auto& gen : h.h_generators) {
    PathWord gi = pw_inverse(g, gen);
    for (const auto& rs : h.selected) {
      for (const PathWord* gg : {&gen, &gi}) {
        auto y = w.act_vertex(*gg, rs.window_vertex);
        if (y) seeds.insert(*y);
      }
    }
  }
  std::set<int> th_v(seeds.begin(), seeds.end());
  std::set<int> th_e;
  std::vector<int> seedv(seeds.begin(), seeds.end());
  for (size_t i = 0; i < seedv.size(); ++i)
    for (size_t j = i + 1; j < seedv.size(); ++j) {
      for (int eidx : w.tree_geodesic(seedv[i], seedv[j])) {
        th_e.insert(eidx);
        th_v.insert(w.edges[static_cast<size_t>(eidx)].a);
        th_v.insert(w.edges[static_cast<size_t>(eidx)].b);
      }
    }
  out.th_vertices.assign(th_v.begin(), th_v.end());
  out.th_edges.assign(th_e.begin(), th_e.end());

  // orbit identification under the generators' partial action
  auto vpos = [&](int idx) {
    auto it = std::lower_bound(out.th_vertices.begin(), out.th_vertices.end(), idx);
    if (it == out.th_vertices.end() || *it != idx) return -1;
    return static_cast<int>(it - out.th_vertices.begin());
  };
  auto epos = [&](int idx) {
    auto it = std::lower_bound(out.th_edges.begin(), out.th_edges.end(), idx);
    if (it == out.th_edges.end() || *it != idx) return -1;
    return static_cast<int>(it - out.th_edges.begin());
  };
  std::vector<int> vuf(out.th_vertices.size()), euf(out.th_edges.size());
  for (size_t i = 0; i < vuf.size(); ++i) vuf[i] = static_cast<int>(i);
  for (size_t i = 0; i < euf.size(); ++i) euf[i] = static_cast<int>(i);
  std::function<int(std::vector<int>&, int)> find = [&](std::vector<int>& p, int x) {
    while (p[static_cast<size_t>(x)] != x) {
      p[static_cast<size_t>(x)] = p[static_cast<size_t>(p[static_cast<size_t>(x)])];
      x = p[static_cast<size_t>(x)];
    }
    return x;
  };
  auto window_edge_between = [&](int a, int b) {
    for (int eidx : w.adj[static_cast<size_t>(a)]) {
      const auto& e = w.edges[static_cast<size_t>(eidx)];
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return eidx;
    }
    return -1;
  };
  for (const auto& gen : h.h_generators) {
    PathWord gi = pw_inverse(g, gen);
    for (const PathWord* gg : {&gen, &gi}) {
      for (size_t i = 0; i < out.th_vertices.size(); ++i) {
        auto y = w.act_vertex(*gg, out.th_vertices[i]);
        if (!y) continue;
        int j = vpos(*y);
        if (j >= 0) {
          int a = find(vuf, static_cast<int>(i)), b = find(vuf, j);
          if (a != b) vuf[static_cast<size_t>(b)] = a;
        }
      }
      for (size_t i = 0; i < out.th_edges.size(); ++i) {
        const auto& e = w.edges[static_cast<size_t>(out.th_edges[i])];
        auto ya = w.act_vertex(*gg, e.a);
        auto yb = w.act_vertex(*gg, e.b);
        if (!ya || !yb) continue;
        int im = window_edge_between(*ya, *yb);
        if (im < 0) continue;
        int j = epos(im);
        if (j >= 0) {
          int a = find(euf, static_cast<int>(i)), b = find(euf, j);
          if (a != b) euf[static_cast<size_t>(b)] = a;
        }
      }
    }
  }
  out.vertex_class.resize(out.th_vertices.size());
  out.edge_class.resize(out.th_edges.size());
  std::map<int, int> vmap, emap;
  for (size_t i = 0; i < out.th_vertices.size(); ++i) {
    int r = find(vuf, static_cast<int>(i));
    if (!vmap.count(r)) vmap[r] = static_cast<int>(vmap.size());
    out.vertex_class[i] = vmap[r];
  }
  for (size_t i = 0; i < out.th_edges.size(); ++i) {
    int r = find(euf, static_cast<int>(i));
    if (!emap.count(r)) emap[r] = static_cast<int>(emap.size());
    out.edge_class[i] = emap[r];
  }
  out.vertex_orbits = static_cast<int>(vmap.size());
  out.edge_orbits = static_cast<int>(emap.size());

  // orbits carrying a nontrivially stabilized selected vertex
  std::set<int> nt;
  for (const auto& rs : h.selected) {
    if (rs.sub.is_trivial_subgroup()) continue;
    int p = vpos(rs.window_vertex);
    if (p >= 0) nt.insert(out.vertex_class[static_cast<size_t>(p)]);
  }
  out.nontrivial_stabilizer_orbits = static_cast<int>(nt.size());

  // induced edge groups: intersection of H_v with the conjugated edge image,
  // computed at edge-orbit representatives incident to a selected vertex
  out.edge_group_gens.assign(static_cast<size_t>(out.edge_orbits), {});
  std::vector<bool> done(static_cast<size_t>(out.edge_orbits), false);
  for (size_t i = 0; i < out.th_edges.size(); ++i) {
    int cls = out.edge_class[i];
    if (done[static_cast<size_t>(cls)]) continue;
    const auto& e = w.edges[static_cast<size_t>(out.th_edges[i])];
    const auto& ge = g.edges[static_cast<size_t>(e.gamma_edge)];
    for (const auto& rs : h.selected) {
      const Subgroup* img = nullptr;
      GroupElement conj_by;
      if (rs.window_vertex == e.a) {
        img = e.fwd ? &ge.from.image : &ge.to.image;
        conj_by = e.rep_r;
      } else if (rs.window_vertex == e.b) {
        img = e.fwd ? &ge.to.image : &ge.from.image;
        conj_by = e.s_child;
      } else {
        continue;
      }
      Subgroup conj = conjugate_subgroup(*img, conj_by);
      Subgroup inter = intersect_subgroups(rs.sub, conj);
      out.edge_group_gens[static_cast<size_t>(cls)] = inter.gens;
      done[static_cast<size_t>(cls)] = true;
      break;
    }
  }
  return out;
}

}  // namespace bsk
