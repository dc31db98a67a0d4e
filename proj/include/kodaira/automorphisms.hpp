#pragma once

#include <span>
#include <vector>

#include "kodaira/group.hpp"

namespace kodaira {

/// An automorphism stored as a flat element permutation.
struct Automorphism {
  std::vector<ElemId> perm;

  ElemId operator()(ElemId g) const { return perm[g]; }
  bool operator==(const Automorphism&) const = default;
};

/// The complete automorphism group as a list of permutations, sorted
/// lexicographically (which puts the identity first). Backtracks over images
/// of a greedy generating sequence, pruned by element order and centralizer
/// fingerprints; every completed assignment is validated multiplicatively.
/// Throws std::invalid_argument above order 4096.
std::vector<Automorphism> automorphism_group(const FiniteGroup& G);

std::vector<ElemId> apply_to_tuple(const Automorphism& phi,
                                   std::span<const ElemId> tuple);

/// Composition phi∘psi (apply psi first).
Automorphism compose(const Automorphism& phi, const Automorphism& psi);

}  // namespace kodaira
