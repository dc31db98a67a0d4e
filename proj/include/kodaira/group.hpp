#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kodaira {

// Dense element identifier, 0..order-1. Identity is always 0.
using ElemId = int;
inline constexpr ElemId kIdentity = 0;

/// Membership bit-vector over the element ids of one group.
class SubgroupSet {
 public:
  SubgroupSet() = default;
  explicit SubgroupSet(int universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  int universe() const { return universe_; }

  bool contains(ElemId g) const {
    return (words_[static_cast<size_t>(g) >> 6] >> (g & 63)) & 1u;
  }
  void insert(ElemId g) { words_[static_cast<size_t>(g) >> 6] |= uint64_t{1} << (g & 63); }
  void erase(ElemId g) { words_[static_cast<size_t>(g) >> 6] &= ~(uint64_t{1} << (g & 63)); }

  int count() const;
  bool empty() const { return count() == 0; }
  std::vector<ElemId> members() const;

  SubgroupSet& operator&=(const SubgroupSet& o);
  SubgroupSet& operator|=(const SubgroupSet& o);
  bool operator==(const SubgroupSet& o) const = default;

  bool is_subset_of(const SubgroupSet& o) const;
  uint64_t hash() const;

 private:
  int universe_ = 0;
  std::vector<uint64_t> words_;
};

/// A finite group as a dense multiplication table. Immutable after
/// construction; all operations on it are pure.
struct FiniteGroup {
  int order = 0;
  std::vector<ElemId> table;       // row-major: table[a*order+b] = a*b
  std::vector<ElemId> inverses;
  std::vector<int> element_orders;
  std::string label;
  std::vector<ElemId> generators;  // images of presentation generators, if built from one

  ElemId mul(ElemId a, ElemId b) const;
  ElemId inv(ElemId a) const;
  int order_of(ElemId a) const;
  ElemId power(ElemId a, long long e) const;
  bool is_abelian() const;
};

/// Builds a FiniteGroup from a raw table and checks the group axioms:
/// identity row/column, two-sided inverses, associativity (exhaustive up to
/// order 256, one million random triples above that), Lagrange on element
/// orders. Throws std::invalid_argument on violation.
FiniteGroup group_from_table(int order, std::vector<ElemId> table,
                             std::string label = {},
                             std::vector<ElemId> generators = {});

ElemId multiply(const FiniteGroup& G, ElemId g, ElemId h);  // bounds-checked
ElemId commutator(const FiniteGroup& G, ElemId g, ElemId h);  // g h g^-1 h^-1
ElemId conjugate(const FiniteGroup& G, ElemId x, ElemId g);   // x g x^-1

SubgroupSet centralizer(const FiniteGroup& G, ElemId g);
SubgroupSet center(const FiniteGroup& G);
SubgroupSet derived_subgroup(const FiniteGroup& G);
SubgroupSet subgroup_generated(const FiniteGroup& G, std::span<const ElemId> gens);
SubgroupSet normal_closure(const FiniteGroup& G, std::span<const ElemId> gens);

/// Closure of `seed` (must already be a subgroup) together with `extra`.
SubgroupSet subgroup_closure(const FiniteGroup& G, const SubgroupSet& seed,
                             std::span<const ElemId> extra);

bool is_subgroup(const FiniteGroup& G, const SubgroupSet& H);
bool is_normal(const FiniteGroup& G, const SubgroupSet& H);
bool is_abelian_subset(const FiniteGroup& G, const SubgroupSet& H);

struct QuotientResult {
  FiniteGroup group;
  std::vector<ElemId> projection;  // element of G -> element of G/N
};

/// Quotient by a normal subgroup. Coset ids are assigned by increasing
/// minimal member, so the identity coset is 0. Throws if N is not a normal
/// subgroup.
QuotientResult quotient(const FiniteGroup& G, const SubgroupSet& N);

/// Explicit isomorphism G -> H as an element map, or nullopt. Exact:
/// backtracking over images of a generating sequence, pruned by element
/// order and centralizer fingerprints.
std::optional<std::vector<ElemId>> find_isomorphism(const FiniteGroup& G,
                                                    const FiniteGroup& H);

inline bool is_isomorphic(const FiniteGroup& G, const FiniteGroup& H) {
  return find_isomorphism(G, H).has_value();
}

}  // namespace kodaira
