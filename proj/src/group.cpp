#include "bsk/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

namespace bsk {

const char* err_name(Err e) {
  switch (e) {
    case Err::unknown_symbol: return "UnknownSymbol";
    case Err::group_mismatch: return "GroupMismatch";
    case Err::not_free_group: return "NotFreeGroup";
    case Err::illegal_path: return "IllegalPath";
    case Err::unknown_vertex: return "UnknownVertex";
    case Err::injection_not_mono: return "InjectionNotMono";
    case Err::container_violation: return "ContainerViolation";
    case Err::disconnected_graph: return "DisconnectedGraph";
    case Err::window_too_small: return "WindowTooSmall";
    case Err::not_in_window: return "NotInWindow";
    case Err::selection_outside_window: return "SelectionOutsideWindow";
    case Err::peripheral_not_malnormal: return "PeripheralNotMalnormal";
    case Err::invalid_vertex_structure: return "InvalidVertexStructure";
    case Err::disconnected_selection: return "DisconnectedSelection";
    case Err::empty_subgraph: return "EmptySubgraph";
    case Err::hypothesis_failure: return "HypothesisFailure";
    case Err::maximality_failure: return "MaximalityFailure";
    case Err::isolation_failure: return "IsolationFailure";
    case Err::not_an_extension: return "NotAnExtension";
    case Err::missing_intersection_witness: return "MissingIntersectionWitness";
    case Err::parse_error: return "ParseError";
    case Err::io_error: return "IoError";
    case Err::bad_input: return "BadInput";
  }
  return "Error";
}

int GroupDesc::symbol_index(const std::string& s) const {
  for (size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == s) return static_cast<int>(i);
  return -1;
}

int GroupDesc::order() const {
  if (kind != GroupKind::finite) fail(Err::bad_input, "order() on infinite group " + name);
  return static_cast<int>(table.size());
}

GroupRef GroupDesc::make_free(std::string name, std::vector<std::string> symbols) {
  auto g = std::make_shared<GroupDesc>();
  g->kind = GroupKind::free_group;
  g->name = std::move(name);
  g->symbols = std::move(symbols);
  std::set<std::string> seen(g->symbols.begin(), g->symbols.end());
  if (seen.size() != g->symbols.size()) fail(Err::bad_input, "duplicate symbol in group " + g->name);
  return g;
}

GroupRef GroupDesc::make_abelian(std::string name, std::vector<std::string> symbols, int free_rank,
                                 std::vector<std::int64_t> torsion) {
  auto g = std::make_shared<GroupDesc>();
  g->kind = GroupKind::abelian;
  g->name = std::move(name);
  g->symbols = std::move(symbols);
  g->free_rank = free_rank;
  g->torsion = std::move(torsion);
  if (free_rank < 0) fail(Err::bad_input, "negative free rank in " + g->name);
  for (auto d : g->torsion)
    if (d < 2) fail(Err::bad_input, "torsion order < 2 in " + g->name);
  if (static_cast<int>(g->symbols.size()) != free_rank + static_cast<int>(g->torsion.size()))
    fail(Err::bad_input, "abelian symbol count mismatch in " + g->name);
  return g;
}

GroupRef GroupDesc::make_finite(std::string name, std::vector<std::string> element_names,
                                std::vector<std::vector<int>> table) {
  auto g = std::make_shared<GroupDesc>();
  g->kind = GroupKind::finite;
  g->name = std::move(name);
  g->symbols = std::move(element_names);
  g->table = std::move(table);
  int n = static_cast<int>(g->symbols.size());
  if (n == 0) fail(Err::bad_input, "finite group with no elements: " + g->name);
  if (static_cast<int>(g->table.size()) != n) fail(Err::bad_input, "table size mismatch in " + g->name);
  for (auto& row : g->table) {
    if (static_cast<int>(row.size()) != n) fail(Err::bad_input, "table row size mismatch in " + g->name);
    for (int v : row)
      if (v < 0 || v >= n) fail(Err::bad_input, "table entry out of range in " + g->name);
  }
  // identity
  int id = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) ok = g->table[e][x] == x && g->table[x][e] == x;
    if (ok) { id = e; break; }
  }
  if (id < 0) fail(Err::bad_input, "finite table has no identity in " + g->name);
  g->identity_index = id;
  // inverses
  g->inverse_index.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y)
      if (g->table[x][y] == id && g->table[y][x] == id) { g->inverse_index[x] = y; break; }
    if (g->inverse_index[x] < 0) fail(Err::bad_input, "finite table misses an inverse in " + g->name);
  }
  // associativity
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (g->table[g->table[x][y]][z] != g->table[x][g->table[y][z]])
          fail(Err::bad_input, "finite table not associative in " + g->name);
  return g;
}

Word parse_word(const GroupRef& g, const std::string& text) {
  Word w;
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
    int idx = g->symbol_index(sym);
    if (idx < 0) fail(Err::unknown_symbol, "'" + sym + "' is not in the alphabet of " + g->name);
    bool inv = exp < 0;
    std::int64_t count = inv ? -exp : exp;
    for (std::int64_t i = 0; i < count; ++i) w.letters.push_back(make_letter(idx, inv));
  }
  return w;
}

bool GroupElement::is_identity() const {
  switch (group->kind) {
    case GroupKind::free_group: return fword.empty();
    case GroupKind::abelian:
      return std::all_of(vec.begin(), vec.end(), [](std::int64_t c) { return c == 0; });
    case GroupKind::finite: return findex == group->identity_index;
  }
  return false;
}

GroupElement identity_element(const GroupRef& g) {
  GroupElement e;
  e.group = g;
  if (g->kind == GroupKind::abelian) e.vec.assign(g->symbols.size(), 0);
  if (g->kind == GroupKind::finite) e.findex = g->identity_index;
  return e;
}

static void normalize_abelian(const GroupRef& g, std::vector<std::int64_t>& v) {
  for (size_t i = 0; i < g->torsion.size(); ++i) {
    auto& c = v[g->free_rank + i];
    std::int64_t d = g->torsion[i];
    c %= d;
    if (c < 0) c += d;
  }
}

GroupElement reduce(const GroupRef& g, const Word& raw) {
  GroupElement e = identity_element(g);
  switch (g->kind) {
    case GroupKind::free_group: {
      for (Letter l : raw.letters) {
        if (letter_symbol(l) >= g->rank()) fail(Err::unknown_symbol, "letter out of range");
        if (!e.fword.empty() && e.fword.back() == letter_inverse(l))
          e.fword.pop_back();
        else
          e.fword.push_back(l);
      }
      break;
    }
    case GroupKind::abelian: {
      for (Letter l : raw.letters) {
        int s = letter_symbol(l);
        if (s >= g->rank()) fail(Err::unknown_symbol, "letter out of range");
        e.vec[s] += letter_inverted(l) ? -1 : 1;
      }
      normalize_abelian(g, e.vec);
      break;
    }
    case GroupKind::finite: {
      int acc = g->identity_index;
      for (Letter l : raw.letters) {
        int s = letter_symbol(l);
        if (s >= g->rank()) fail(Err::unknown_symbol, "letter out of range");
        int x = letter_inverted(l) ? g->inverse_index[s] : s;
        acc = g->table[acc][x];
      }
      e.findex = acc;
      break;
    }
  }
  return e;
}

static void check_same_group(const GroupElement& x, const GroupElement& y) {
  if (x.group != y.group) fail(Err::group_mismatch, "elements of different groups");
}

GroupElement multiply(const GroupElement& x, const GroupElement& y) {
  check_same_group(x, y);
  GroupElement e = identity_element(x.group);
  switch (x.group->kind) {
    case GroupKind::free_group: {
      e.fword = x.fword;
      for (Letter l : y.fword) {
        if (!e.fword.empty() && e.fword.back() == letter_inverse(l))
          e.fword.pop_back();
        else
          e.fword.push_back(l);
      }
      break;
    }
    case GroupKind::abelian: {
      e.vec = x.vec;
      for (size_t i = 0; i < e.vec.size(); ++i) e.vec[i] += y.vec[i];
      normalize_abelian(x.group, e.vec);
      break;
    }
    case GroupKind::finite:
      e.findex = x.group->table[x.findex][y.findex];
      break;
  }
  return e;
}

GroupElement invert(const GroupElement& x) {
  GroupElement e = identity_element(x.group);
  switch (x.group->kind) {
    case GroupKind::free_group:
      e.fword.reserve(x.fword.size());
      for (auto it = x.fword.rbegin(); it != x.fword.rend(); ++it) e.fword.push_back(letter_inverse(*it));
      break;
    case GroupKind::abelian:
      e.vec = x.vec;
      for (auto& c : e.vec) c = -c;
      normalize_abelian(x.group, e.vec);
      break;
    case GroupKind::finite:
      e.findex = x.group->inverse_index[x.findex];
      break;
  }
  return e;
}

GroupElement pow(const GroupElement& x, std::int64_t n) {
  GroupElement base = n < 0 ? invert(x) : x;
  std::int64_t k = n < 0 ? -n : n;
  GroupElement acc = identity_element(x.group);
  for (std::int64_t i = 0; i < k; ++i) acc = multiply(acc, base);
  return acc;
}

bool equal(const GroupElement& x, const GroupElement& y) {
  check_same_group(x, y);
  switch (x.group->kind) {
    case GroupKind::free_group: return x.fword == y.fword;
    case GroupKind::abelian: return x.vec == y.vec;
    case GroupKind::finite: return x.findex == y.findex;
  }
  return false;
}

std::vector<Letter> spelling(const GroupElement& x) {
  switch (x.group->kind) {
    case GroupKind::free_group: return x.fword;
    case GroupKind::abelian: {
      std::vector<Letter> out;
      for (size_t i = 0; i < x.vec.size(); ++i) {
        std::int64_t c = x.vec[i];
        bool inv = c < 0;
        std::int64_t n = inv ? -c : c;
        for (std::int64_t k = 0; k < n; ++k) out.push_back(make_letter(static_cast<int>(i), inv));
      }
      return out;
    }
    case GroupKind::finite:
      if (x.findex == x.group->identity_index) return {};
      return {make_letter(x.findex, false)};
  }
  return {};
}

int word_length(const GroupElement& x) { return static_cast<int>(spelling(x).size()); }

int shortlex_cmp(const GroupElement& x, const GroupElement& y) {
  check_same_group(x, y);
  auto a = spelling(x), b = spelling(y);
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

std::string letters_to_string(const GroupRef& g, const std::vector<Letter>& ls) {
  if (ls.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ' ';
    out += g->symbols[letter_symbol(ls[i])];
    if (letter_inverted(ls[i])) out += "^-1";
  }
  return out;
}

std::string to_string(const GroupElement& x) { return letters_to_string(x.group, spelling(x)); }

bool infinite_order(const GroupElement& x) {
  switch (x.group->kind) {
    case GroupKind::free_group: return !x.fword.empty();
    case GroupKind::abelian:
      for (int i = 0; i < x.group->free_rank; ++i)
        if (x.vec[i] != 0) return true;
      return false;
    case GroupKind::finite: return false;
  }
  return false;
}

std::vector<GroupElement> enumerate_ball(const GroupRef& g, int maxlen) {
  std::vector<GroupElement> out;
  switch (g->kind) {
    case GroupKind::free_group: {
      out.push_back(identity_element(g));
      size_t layer_begin = 0;
      for (int len = 1; len <= maxlen; ++len) {
        size_t layer_end = out.size();
        for (size_t i = layer_begin; i < layer_end; ++i) {
          for (int s = 0; s < g->rank(); ++s) {
            for (int inv = 0; inv < 2; ++inv) {
              Letter l = make_letter(s, inv != 0);
              if (!out[i].fword.empty() && out[i].fword.back() == letter_inverse(l)) continue;
              GroupElement e = out[i];
              e.fword.push_back(l);
              out.push_back(std::move(e));
            }
          }
        }
        layer_begin = layer_end;
      }
      break;
    }
    case GroupKind::abelian: {
      int n = g->rank();
      std::vector<std::int64_t> cur(n, 0);
      std::vector<GroupElement> all;
      // depth-first over coordinates with remaining length budget
      struct Rec {
        const GroupRef& g;
        int maxlen;
        std::vector<GroupElement>& all;
        void go(std::vector<std::int64_t>& cur, int coord, int budget) {
          int n = g->rank();
          if (coord == n) {
            GroupElement e = identity_element(g);
            e.vec = cur;
            all.push_back(std::move(e));
            return;
          }
          bool tors = coord >= g->free_rank;
          std::int64_t lo = tors ? 0 : -budget;
          std::int64_t hi = tors ? std::min<std::int64_t>(budget, g->torsion[coord - g->free_rank] - 1)
                                 : budget;
          for (std::int64_t c = lo; c <= hi; ++c) {
            cur[coord] = c;
            int used = static_cast<int>(c < 0 ? -c : c);
            if (used <= budget) go(cur, coord + 1, budget - used);
          }
          cur[coord] = 0;
        }
      } rec{g, maxlen, all};
      rec.go(cur, 0, maxlen);
      out = std::move(all);
      std::sort(out.begin(), out.end(),
                [](const GroupElement& a, const GroupElement& b) { return shortlex_cmp(a, b) < 0; });
      break;
    }
    case GroupKind::finite: {
      out.push_back(identity_element(g));
      if (maxlen >= 1) {
        for (int i = 0; i < g->order(); ++i) {
          if (i == g->identity_index) continue;
          GroupElement e = identity_element(g);
          e.findex = i;
          out.push_back(std::move(e));
        }
      }
      break;
    }
  }
  return out;
}

// ---------- integer lattices ----------

ZLattice ZLattice::from_rows(int dim, const std::vector<std::vector<std::int64_t>>& gens) {
  ZLattice L;
  L.dim = dim;
  std::vector<std::vector<std::int64_t>> work = gens;
  std::vector<std::vector<std::int64_t>> trans(gens.size());
  for (size_t i = 0; i < gens.size(); ++i) {
    trans[i].assign(gens.size(), 0);
    trans[i][i] = 1;
  }
  size_t top = 0;
  for (int col = 0; col < dim && top < work.size(); ++col) {
    // euclidean elimination in this column over rows [top..)
    while (true) {
      int best = -1;
      for (size_t r = top; r < work.size(); ++r) {
        if (work[r][col] == 0) continue;
        if (best < 0 || std::llabs(work[r][col]) < std::llabs(work[static_cast<size_t>(best)][col]))
          best = static_cast<int>(r);
      }
      if (best < 0) break;
      std::swap(work[top], work[static_cast<size_t>(best)]);
      std::swap(trans[top], trans[static_cast<size_t>(best)]);
      bool again = false;
      for (size_t r = top + 1; r < work.size(); ++r) {
        if (work[r][col] == 0) continue;
        std::int64_t q = work[r][col] / work[top][col];
        for (int c = 0; c < dim; ++c) work[r][c] -= q * work[top][c];
        for (size_t c = 0; c < trans[r].size(); ++c) trans[r][c] -= q * trans[top][c];
        if (work[r][col] != 0) again = true;
      }
      if (!again) break;
    }
    if (work[top][col] != 0) {
      if (work[top][col] < 0) {
        for (auto& v : work[top]) v = -v;
        for (auto& v : trans[top]) v = -v;
      }
      L.rows.push_back(work[top]);
      L.transform.push_back(trans[top]);
      L.pivot_col.push_back(col);
      ++top;
    }
  }
  return L;
}

std::optional<std::vector<std::int64_t>> ZLattice::express(const std::vector<std::int64_t>& v) const {
  std::vector<std::int64_t> rem = v;
  std::vector<std::int64_t> coeffs_rows(rows.size(), 0);
  for (size_t i = 0; i < rows.size(); ++i) {
    int col = pivot_col[i];
    // earlier columns must already be zero
    for (int c = (i == 0 ? 0 : pivot_col[i - 1] + 1); c < col; ++c)
      if (rem[c] != 0) return std::nullopt;
    if (rem[col] % rows[i][col] != 0) return std::nullopt;
    std::int64_t q = rem[col] / rows[i][col];
    coeffs_rows[i] = q;
    for (int c = 0; c < dim; ++c) rem[c] -= q * rows[i][c];
  }
  for (int c = 0; c < dim; ++c)
    if (rem[c] != 0) return std::nullopt;
  // convert row coefficients to original-generator coefficients
  size_t ngens = transform.empty() ? 0 : transform[0].size();
  std::vector<std::int64_t> out(ngens, 0);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < ngens; ++j) out[j] += coeffs_rows[i] * transform[i][j];
  return out;
}

bool ZLattice::contains(const std::vector<std::int64_t>& v) const { return express(v).has_value(); }

std::vector<std::vector<std::int64_t>> integer_kernel(
    int dim, const std::vector<std::vector<std::int64_t>>& columns) {
  // kernel of the map Z^k -> Z^dim, x -> sum x_j * columns[j].
  // Row-reduce the k x dim matrix of columns-as-rows carrying a transform;
  // transform rows of zero rows form a kernel basis.
  size_t k = columns.size();
  std::vector<std::vector<std::int64_t>> work(k);
  std::vector<std::vector<std::int64_t>> trans(k);
  for (size_t i = 0; i < k; ++i) {
    work[i] = columns[i];
    trans[i].assign(k, 0);
    trans[i][i] = 1;
  }
  size_t top = 0;
  for (int col = 0; col < dim && top < k; ++col) {
    while (true) {
      int best = -1;
      for (size_t r = top; r < k; ++r) {
        if (work[r][col] == 0) continue;
        if (best < 0 || std::llabs(work[r][col]) < std::llabs(work[static_cast<size_t>(best)][col]))
          best = static_cast<int>(r);
      }
      if (best < 0) break;
      std::swap(work[top], work[static_cast<size_t>(best)]);
      std::swap(trans[top], trans[static_cast<size_t>(best)]);
      bool again = false;
      for (size_t r = top + 1; r < k; ++r) {
        if (work[r][col] == 0) continue;
        std::int64_t q = work[r][col] / work[top][col];
        for (int c = 0; c < dim; ++c) work[r][c] -= q * work[top][c];
        for (size_t c = 0; c < k; ++c) trans[r][c] -= q * trans[top][c];
        if (work[r][col] != 0) again = true;
      }
      if (!again) break;
    }
    if (work[top][col] != 0) ++top;
  }
  std::vector<std::vector<std::int64_t>> kernel;
  for (size_t r = top; r < k; ++r) {
    bool zero = std::all_of(work[r].begin(), work[r].end(), [](std::int64_t v) { return v == 0; });
    if (zero) kernel.push_back(trans[r]);
  }
  return kernel;
}

std::vector<std::int64_t> abelian_coords(const GroupElement& x) {
  if (x.group->kind != GroupKind::abelian) fail(Err::group_mismatch, "abelian_coords on non-abelian");
  return x.vec;
}

std::vector<std::vector<std::int64_t>> torsion_rows(const GroupRef& g) {
  std::vector<std::vector<std::int64_t>> rows;
  for (size_t i = 0; i < g->torsion.size(); ++i) {
    std::vector<std::int64_t> r(g->symbols.size(), 0);
    r[g->free_rank + i] = g->torsion[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

bool abelian_membership(const GroupElement& target, const std::vector<GroupElement>& basis) {
  if (target.group->kind != GroupKind::abelian)
    fail(Err::group_mismatch, "abelian_membership on non-abelian group");
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& b : basis) {
    if (b.group != target.group) fail(Err::group_mismatch, "basis element from another group");
    rows.push_back(b.vec);
  }
  for (auto& t : torsion_rows(target.group)) rows.push_back(t);
  auto L = ZLattice::from_rows(static_cast<int>(target.group->symbols.size()), rows);
  return L.contains(target.vec);
}

std::vector<int> finite_subgroup(const GroupRef& g, const std::vector<GroupElement>& gens) {
  if (g->kind != GroupKind::finite) fail(Err::group_mismatch, "finite_subgroup on infinite group");
  std::set<int> have{g->identity_index};
  std::vector<int> todo{g->identity_index};
  std::vector<int> gen_idx;
  for (const auto& e : gens) {
    if (e.group != g) fail(Err::group_mismatch, "generator from another group");
    gen_idx.push_back(e.findex);
    gen_idx.push_back(g->inverse_index[e.findex]);
  }
  while (!todo.empty()) {
    int x = todo.back();
    todo.pop_back();
    for (int s : gen_idx) {
      int y = g->table[x][s];
      if (have.insert(y).second) todo.push_back(y);
    }
  }
  return std::vector<int>(have.begin(), have.end());
}

}  // namespace bsk
