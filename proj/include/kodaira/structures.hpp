#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kodaira/automorphisms.hpp"
#include "kodaira/group.hpp"
#include "kodaira/presentation.hpp"

namespace kodaira {

// Symbol layout for a type-(b,n) structure tuple:
//   (rho_11, tau_11, ..., rho_1b, tau_1b,
//    rho_21, tau_21, ..., rho_2b, tau_2b, z)
// so rho_ij sits at 2b*(i-1) + 2*(j-1), tau_ij right after it, z at 4b.
inline int sym_rho(int i, int j, int b) { return 2 * b * (i - 1) + 2 * (j - 1); }
inline int sym_tau(int i, int j, int b) { return 2 * b * (i - 1) + 2 * (j - 1) + 1; }
inline int sym_z(int b) { return 4 * b; }

struct StructureRelation {
  enum class Kind { Surface, RhoAction, TauAction, Orbifold };
  Kind kind;
  std::string name;  // S1, S2, R1.., T1.., ZN
  Word lhs, rhs;     // equation lhs = rhs over the 4b+1 symbols
};

/// The defining relation system for type (b, n): two surface relations plus
/// 2b(2b+1) conjugacy-action relations; an orbifold relator z^n is appended
/// when n is given.
struct RelationSet {
  int b = 2;
  std::optional<int> n;
  std::vector<std::string> symbol_names;  // size 4b+1
  std::vector<StructureRelation> relations;
};

RelationSet generate_structure_relations(int b, std::optional<int> n = {});

struct KodairaStructure {
  int b = 2;
  int n = 2;
  std::vector<ElemId> entries;  // 4b+1 ids
  SubgroupSet k1, k2;           // <first half, z>, <second half, z>
  int m1 = 1, m2 = 1;           // [G:K1], [G:K2]
  bool strong = false;          // K1 = K2 = G
};

struct VerifyOptions {
  bool check_surface = true;       // prestructures skip the surface relations
  bool require_generation = true;  // prestructures skip generation
  int n = 0;                       // required o(z); 0 accepts any value >= 2
};

/// Returns the list of violated conditions (empty when t is a valid
/// structure under the options). Violations are data, not errors.
std::vector<std::string> verify_structure(const FiniteGroup& G,
                                          std::span<const ElemId> t, int b,
                                          const VerifyOptions& opts);

/// Fills K1/K2/m1/m2/strong/n for a tuple that passes verify_structure.
/// Throws std::invalid_argument on an invalid tuple.
KodairaStructure structure_metadata(const FiniteGroup& G,
                                    std::span<const ElemId> t, int b);

struct StructureSearchOptions {
  bool count_only = false;
  long long first_k = -1;           // stop after this many tuples when >= 0
  int threads = 1;
  std::optional<ElemId> require_z;  // restrict z to one element
  std::optional<int> require_n;     // restrict o(z)
  bool allow_general_b = false;     // permit the exponential b > 2 search
  bool sort_canonical = true;       // sort materialized tuples lexicographically
  std::function<void(std::span<const ElemId>)> sink;  // streaming consumer
};

struct StructureSearchResult {
  uint64_t total = 0;
  int b = 2;
  std::vector<ElemId> tuples;  // concatenated, stride 4b+1; empty in count-only mode
  std::vector<int> observed_n;                      // distinct o(z) values seen
  std::vector<std::pair<int, int>> observed_k_orders;  // distinct (|K1|,|K2|) seen
  int shard_count = 0;

  size_t tuple_count() const { return tuples.size() / (4 * b + 1); }
  std::span<const ElemId> tuple(size_t i) const {
    return {tuples.data() + i * (4 * b + 1), static_cast<size_t>(4 * b + 1)};
  }
};

/// Exhaustive, duplicate-free search for diagonal double Kodaira structures
/// of type (b, *) on G. For b = 2 this runs the coset-pruned engine
/// (supported up to order 256); for b > 2 an explicit opt-in runs the plain
/// backtracking search.
StructureSearchResult find_structures(const FiniteGroup& G, int b,
                                      const StructureSearchOptions& opts = {});

/// Number of 9-tuples satisfying the conjugacy relations R1..R10, T1..T10
/// with o(z) >= 2. Generation and surface relations are not required.
uint64_t find_prestructures(const FiniteGroup& G, int threads = 1,
                            const std::function<void(std::span<const ElemId>)>& sink = {},
                            long long first_k = -1);

/// Plain nested backtracking over tuples with relations checked as soon as
/// their symbols are assigned. Exponential; used for general b and as a
/// slow reference path.
uint64_t backtracking_structure_search(
    const FiniteGroup& G, int b, const VerifyOptions& opts,
    const std::function<void(std::span<const ElemId>)>& sink = {},
    long long first_k = -1);

/// Deterministic spread sample for b = 2: the first structure found in each
/// (z, rho_21, tau_21) shard, up to max_count tuples. Useful for scanning
/// orbit representatives without materializing the full enumeration.
std::vector<std::vector<ElemId>> sample_structures_per_shard(const FiniteGroup& G,
                                                             size_t max_count);

struct Lift {
  std::vector<ElemId> entries;
  bool generates = false;
  int n = 2;  // order of the lifted z
};

/// All preimage tuples of `base` under the projection that satisfy the
/// relation system on G, each flagged by whether it generates G. The
/// projection must map G onto 0..q-1 with projection[0] = 0 and be a
/// homomorphism onto the quotient in which `base` is a structure.
std::vector<Lift> lift_structures(const FiniteGroup& G, const SubgroupSet& N,
                                  std::span<const ElemId> projection,
                                  std::span<const ElemId> base, int b);

/// total / |Aut|; throws std::logic_error when not divisible (which would
/// falsify the free-action lemma).
uint64_t count_orbits(uint64_t total, size_t aut_count);

/// True when no non-identity listed automorphism fixes the tuple.
bool stabilizer_is_trivial(std::span<const ElemId> tuple,
                           const std::vector<Automorphism>& auts);

}  // namespace kodaira
