#pragma once

#include <stdexcept>

#include "kodaira/group.hpp"
#include "kodaira/presentation.hpp"

namespace kodaira {

struct CosetLimitExceeded : std::runtime_error {
  explicit CosetLimitExceeded(int limit)
      : std::runtime_error("coset enumeration exceeded limit of " +
                           std::to_string(limit) + " cosets") {}
};

/// Enumerates the cosets of the trivial subgroup (HLT relator scanning with
/// immediate coincidence handling) and collapses the regular action into a
/// dense multiplication table. Element 0 is the identity; the remaining ids
/// follow first-definition order, so identical presentation text always
/// yields the identical table. The i-th presentation generator's image is
/// recorded in FiniteGroup::generators. A presentation that collapses to the
/// trivial group yields order 1; running past max_cosets throws
/// CosetLimitExceeded.
FiniteGroup todd_coxeter(const Presentation& P, int max_cosets = 1 << 16);

}  // namespace kodaira
