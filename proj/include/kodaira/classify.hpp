#pragma once

#include <optional>

#include "kodaira/group.hpp"

namespace kodaira {

struct CctWitness {
  ElemId x, y, w;  // non-central, [x,y] = [y,w] = 1 but [x,w] != 1
};

struct CctVerdict {
  bool is_cct = false;
  bool vacuous = false;  // set for abelian input, where the notion is empty
  std::optional<CctWitness> witness;
};

/// A group is CCT when every non-central element has an abelian centralizer.
/// Abelian input reports is_cct = true with the vacuous flag set.
CctVerdict is_cct(const FiniteGroup& G);

struct MonolithicVerdict {
  bool is_monolithic = false;
  SubgroupSet mon;  // intersection of all non-trivial normal subgroups
};

MonolithicVerdict mon(const FiniteGroup& G);

/// Complete normal subgroup lattice, computed as the join-closure of the
/// normal closures of single elements. Includes the trivial and the full
/// subgroup. Sorted by (size, members).
std::vector<SubgroupSet> all_normal_subgroups(const FiniteGroup& G);

struct QuotientMatch {
  SubgroupSet kernel;
  std::vector<ElemId> projection;  // G -> G/N with G/N relabeled along the isomorphism onto H
};

/// Searches all normal subgroups N of index |H| for one with G/N isomorphic
/// to H; the returned projection composes the quotient map with the found
/// isomorphism, so it maps G onto H's element ids.
std::optional<QuotientMatch> has_quotient_isomorphic_to(const FiniteGroup& G,
                                                        const FiniteGroup& H);

}  // namespace kodaira
