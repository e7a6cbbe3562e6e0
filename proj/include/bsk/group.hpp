#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsk/common.hpp"

namespace bsk {

// A letter is a generator symbol with a sign. Encoded as (symbol << 1) | inverted,
// which makes the ShortLex letter order (a < a^-1 < b < b^-1 < ...) the numeric order.
using Letter = std::uint32_t;

inline Letter make_letter(int sym, bool inverted) {
  return (static_cast<Letter>(sym) << 1) | (inverted ? 1u : 0u);
}
inline int letter_symbol(Letter l) { return static_cast<int>(l >> 1); }
inline bool letter_inverted(Letter l) { return (l & 1u) != 0; }
inline Letter letter_inverse(Letter l) { return l ^ 1u; }

enum class GroupKind { free_group, abelian, finite };

struct GroupDesc;
using GroupRef = std::shared_ptr<const GroupDesc>;

// Immutable group description. Free groups carry their basis symbols; abelian
// groups are Z^r (+) Z/d_i with one symbol per coordinate; finite groups are
// given by a full multiplication table validated on construction.
struct GroupDesc {
  GroupKind kind = GroupKind::free_group;
  std::string name;
  std::vector<std::string> symbols;

  // abelian
  int free_rank = 0;
  std::vector<std::int64_t> torsion;  // orders of torsion coordinates, each >= 2

  // finite
  std::vector<std::vector<int>> table;  // table[i][j] = index of element i*j
  int identity_index = 0;
  std::vector<int> inverse_index;

  int rank() const { return static_cast<int>(symbols.size()); }
  int symbol_index(const std::string& s) const;
  int order() const;  // finite only

  static GroupRef make_free(std::string name, std::vector<std::string> symbols);
  static GroupRef make_abelian(std::string name, std::vector<std::string> symbols, int free_rank,
                               std::vector<std::int64_t> torsion);
  static GroupRef make_finite(std::string name, std::vector<std::string> element_names,
                              std::vector<std::vector<int>> table);
};

// Raw word over a group's alphabet: sequence of signed letters, not reduced.
struct Word {
  std::vector<Letter> letters;
};

// Parses "a b^-1 c^3" style words. Every token is SYMBOL or SYMBOL^INT.
Word parse_word(const GroupRef& g, const std::string& text);

// Canonical group element. Payload depends on the group kind:
// free -> freely reduced letter string; abelian -> exponent vector with torsion
// coordinates reduced into [0, d); finite -> table index.
struct GroupElement {
  GroupRef group;
  std::vector<Letter> fword;
  std::vector<std::int64_t> vec;
  int findex = 0;

  bool is_identity() const;
};

GroupElement identity_element(const GroupRef& g);
GroupElement reduce(const GroupRef& g, const Word& raw);
GroupElement multiply(const GroupElement& x, const GroupElement& y);
GroupElement invert(const GroupElement& x);
GroupElement pow(const GroupElement& x, std::int64_t n);
bool equal(const GroupElement& x, const GroupElement& y);

// Canonical spelling used for ShortLex comparison and printing.
std::vector<Letter> spelling(const GroupElement& x);
int word_length(const GroupElement& x);
// <0, 0, >0 like strcmp; shorter first, then lexicographic on letters.
int shortlex_cmp(const GroupElement& x, const GroupElement& y);
std::string to_string(const GroupElement& x);
std::string letters_to_string(const GroupRef& g, const std::vector<Letter>& ls);

// True iff x has infinite order.
bool infinite_order(const GroupElement& x);

// Enumerates all canonical elements of length <= maxlen in ShortLex order.
// Free groups: reduced words; abelian: |c|_1-ball with torsion residues; finite: all.
std::vector<GroupElement> enumerate_ball(const GroupRef& g, int maxlen);

// --- integer lattice helpers (abelian membership / kernels) ---

// Row-style integer lattice in Z^n with a Hermite-reduced basis and the
// transformation back to the original generating rows.
struct ZLattice {
  int dim = 0;
  std::vector<std::vector<std::int64_t>> rows;       // echelon basis rows
  std::vector<std::vector<std::int64_t>> transform;  // rows[i] = sum transform[i][j] * original[j]
  std::vector<int> pivot_col;                        // per basis row

  static ZLattice from_rows(int dim, const std::vector<std::vector<std::int64_t>>& gens);
  bool contains(const std::vector<std::int64_t>& v) const;
  // Coefficients over the ORIGINAL generator rows, if v lies in the lattice.
  std::optional<std::vector<std::int64_t>> express(const std::vector<std::int64_t>& v) const;
  int lattice_rank() const { return static_cast<int>(rows.size()); }
};

// Integer kernel basis of the linear map given by columns (dim rows each).
std::vector<std::vector<std::int64_t>> integer_kernel(int dim,
                                                      const std::vector<std::vector<std::int64_t>>& columns);

// target in subgroup generated by basis (all abelian elements of one group).
bool abelian_membership(const GroupElement& target, const std::vector<GroupElement>& basis);

// Full coordinate vector (free + torsion) of an abelian element.
std::vector<std::int64_t> abelian_coords(const GroupElement& x);
// Torsion-relation rows d_i * e_i of an abelian group.
std::vector<std::vector<std::int64_t>> torsion_rows(const GroupRef& g);

// Finite groups: subgroup element set generated by the given elements (sorted indices).
std::vector<int> finite_subgroup(const GroupRef& g, const std::vector<GroupElement>& gens);

}  // namespace bsk
