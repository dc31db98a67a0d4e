#pragma once

#include <array>
#include <optional>
#include <span>

#include "kodaira/group.hpp"
#include "kodaira/presentation.hpp"
#include "kodaira/structures.hpp"

namespace kodaira {

/// Invariants of a finitely generated abelian group: free rank plus torsion
/// coefficients in divisibility order (each >= 2, d1 | d2 | ...).
struct AbelianInvariants {
  int rank = 0;
  std::vector<long long> torsion;
  bool operator==(const AbelianInvariants&) const = default;
};

std::string to_string(const AbelianInvariants& ai);

struct IntMatrix {
  int rows = 0, cols = 0;
  std::vector<long long> a;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
  long long& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  long long at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

/// Exponent-sum matrix of the relators (rows) over the generators (cols).
IntMatrix abelianized_relator_matrix(const Presentation& P);

/// Presentation of the orbifold quotient: the type-(b,*) structure relation
/// system together with the relator z^n.
Presentation orbifold_presentation(int b, int n);

/// Schreier coset data for the kernel of phi: cosets are the elements of G,
/// the transversal is prefix-closed (BFS, generators before inverses, ties
/// by generator index), and generators act by right multiplication.
struct CosetSystem {
  std::vector<Word> transversal;
  std::vector<ElemId> action;  // action[c * k + x] = c * phi(x)
  int num_gens = 0;

  ElemId act(ElemId c, int x) const { return action[static_cast<size_t>(c) * num_gens + x]; }
};

struct SchreierRewrite {
  CosetSystem cosets;
  IntMatrix matrix;            // one row per (relator, coset), one column per Schreier generator
  std::vector<int> col_coset;  // column -> coset
  std::vector<int> col_gen;    // column -> presentation generator
  // Signed tree-edge usage per row and generator; together with the matrix
  // columns this reconstructs the relator's abelianization.
  std::vector<std::vector<long long>> tree_use;
};

/// Abelianized Reidemeister-Schreier rewriting of ker(phi) for a surjective
/// homomorphism phi given by generator images. Rows: each relator rewritten
/// in each coset; columns: the |G|*k - (|G|-1) non-tree Schreier generators.
/// Throws std::invalid_argument if phi is not a homomorphism or not onto.
SchreierRewrite schreier_rewrite(const Presentation& P,
                                 std::span<const ElemId> images,
                                 const FiniteGroup& G);

/// Cokernel invariants of M acting on Z^cols. Exact: 64-bit arithmetic with
/// overflow detection, promoting the whole computation to arbitrary
/// precision on the first overflow.
AbelianInvariants smith_normal_form(const IntMatrix& M);

/// H1 of the branched cover associated with a structure: orbifold
/// presentation -> Schreier rewriting -> Smith normal form.
AbelianInvariants compute_h1(const FiniteGroup& G, const KodairaStructure& s);

struct SurfaceInvariantReport {
  long long group_order = 0;
  int b = 2, n = 2, m1 = 1, m2 = 1;
  long long c1_sq = 0, c2 = 0, sigma = 0, chi = 0;
  long long b1_base = 0, b2_base = 0;  // base genera of the two fibrations
  long long g1 = 0, g2 = 0;            // fibre genera
  std::optional<long long> q, p_g;
  std::optional<std::array<long long, 5>> betti;  // b0..b4
};

/// Closed-form invariants of the cover: c1^2 = |G|(2b-2)(4b-4+4f-f^2) and
/// c2 = |G|(2b-2)(2b-2+f) with f = 1-1/n, sigma = (c1^2-2c2)/3,
/// chi = (c1^2+c2)/12, base genera 1+m_i(b-1), fibre genera from
/// 2g_i-2 = (|G|/m_i)(2b-2+f). When q is given: p_g = chi-1+q and Betti
/// numbers (1, 2q, c2-2+4q, 2q, 1). Every division must be exact;
/// a non-integral intermediate throws std::domain_error.
SurfaceInvariantReport surface_invariants(long long order, int b, int n, int m1,
                                          int m2, std::optional<int> q = {});

}  // namespace kodaira
