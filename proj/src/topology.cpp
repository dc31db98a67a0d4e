#include "kodaira/topology.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace kodaira {

std::string to_string(const AbelianInvariants& ai) {
  std::string s = "Z^" + std::to_string(ai.rank);
  for (long long t : ai.torsion) s += " + Z/" + std::to_string(t);
  return s;
}

IntMatrix abelianized_relator_matrix(const Presentation& P) {
  IntMatrix M(static_cast<int>(P.relators.size()), P.num_generators());
  for (size_t r = 0; r < P.relators.size(); ++r)
    for (auto& [g, e] : P.relators[r].syms) M.at(static_cast<int>(r), g) += e;
  return M;
}

Presentation orbifold_presentation(int b, int n) {
  if (n < 2) throw std::invalid_argument("orbifold_presentation: n must be >= 2");
  RelationSet rs = generate_structure_relations(b, n);
  Presentation P;
  P.label = "orb(" + std::to_string(b) + "," + std::to_string(n) + ")";
  P.generator_names = rs.symbol_names;
  for (const auto& rel : rs.relations) {
    Word r = rel.lhs * rel.rhs.inverse();
    if (!r.empty()) P.relators.push_back(std::move(r));
  }
  return P;
}

SchreierRewrite schreier_rewrite(const Presentation& P,
                                 std::span<const ElemId> images,
                                 const FiniteGroup& G) {
  const int k = P.num_generators();
  const int n = G.order;
  if (static_cast<int>(images.size()) != k)
    throw std::invalid_argument("schreier_rewrite: one image per generator required");
  for (const Word& r : P.relators)
    if (evaluate_word(G, images, r) != kIdentity)
      throw std::invalid_argument("schreier_rewrite: images do not satisfy the relators");
  if (subgroup_generated(G, images).count() != n)
    throw std::invalid_argument("schreier_rewrite: images do not generate G");

  SchreierRewrite out;
  out.cosets.num_gens = k;
  out.cosets.action.resize(static_cast<size_t>(n) * k);
  for (ElemId c = 0; c < n; ++c)
    for (int x = 0; x < k; ++x)
      out.cosets.action[static_cast<size_t>(c) * k + x] = G.mul(c, images[x]);

  // BFS transversal from the identity coset; positive generators first, then
  // inverses, ties by generator index. tree[c][x] marks the positive pair
  // (c, x) as a tree edge.
  std::vector<char> visited(n, 0);
  std::vector<std::vector<char>> tree(n, std::vector<char>(k, 0));
  out.cosets.transversal.resize(n);
  std::deque<ElemId> queue;
  visited[kIdentity] = 1;
  queue.push_back(kIdentity);
  while (!queue.empty()) {
    ElemId c = queue.front();
    queue.pop_front();
    for (int x = 0; x < k; ++x) {
      ElemId d = out.cosets.act(c, x);
      if (!visited[d]) {
        visited[d] = 1;
        tree[c][x] = 1;
        out.cosets.transversal[d] = out.cosets.transversal[c] * Word::gen(x);
        queue.push_back(d);
      }
    }
    for (int x = 0; x < k; ++x) {
      ElemId d = G.mul(c, G.inv(images[x]));
      if (!visited[d]) {
        visited[d] = 1;
        tree[d][x] = 1;  // the positive orientation of the edge is (d, x) -> c
        out.cosets.transversal[d] = out.cosets.transversal[c] * Word::gen(x, -1);
        queue.push_back(d);
      }
    }
  }

  // Column layout: all non-tree positive pairs (coset, generator).
  std::vector<std::vector<int>> col(n, std::vector<int>(k, -1));
  for (ElemId c = 0; c < n; ++c)
    for (int x = 0; x < k; ++x)
      if (!tree[c][x]) {
        col[c][x] = static_cast<int>(out.col_coset.size());
        out.col_coset.push_back(c);
        out.col_gen.push_back(x);
      }
  const int ncols = static_cast<int>(out.col_coset.size());
  if (ncols != n * k - (n - 1))
    throw std::logic_error("schreier_rewrite: transversal is not a spanning tree");

  const int nrel = static_cast<int>(P.relators.size());
  out.matrix = IntMatrix(nrel * n, ncols);
  out.tree_use.assign(static_cast<size_t>(nrel) * n, std::vector<long long>(k, 0));

  int row = 0;
  for (int ri = 0; ri < nrel; ++ri) {
    const Word& r = P.relators[ri];
    for (ElemId g = 0; g < n; ++g, ++row) {
      ElemId cur = g;
      for (auto& [x, e] : r.syms) {
        int steps = e < 0 ? -e : e;
        for (int s = 0; s < steps; ++s) {
          if (e > 0) {
            if (col[cur][x] >= 0)
              out.matrix.at(row, col[cur][x]) += 1;
            else
              out.tree_use[row][x] += 1;
            cur = out.cosets.act(cur, x);
          } else {
            ElemId nxt = G.mul(cur, G.inv(images[x]));
            if (col[nxt][x] >= 0)
              out.matrix.at(row, col[nxt][x]) -= 1;
            else
              out.tree_use[row][x] -= 1;
            cur = nxt;
          }
        }
      }
      if (cur != g)
        throw std::logic_error("schreier_rewrite: relator walk did not close");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

namespace {

struct SnfOverflow : std::runtime_error {
  SnfOverflow() : std::runtime_error("snf: 64-bit overflow") {}
};

// long long with checked arithmetic; promotes the whole SNF run to
// arbitrary precision via the catch in smith_normal_form.
struct Checked {
  long long v = 0;
  Checked() = default;
  Checked(long long x) : v(x) {}

  friend Checked operator+(Checked a, Checked b) {
    long long r;
    if (__builtin_add_overflow(a.v, b.v, &r)) throw SnfOverflow();
    return r;
  }
  friend Checked operator-(Checked a, Checked b) {
    long long r;
    if (__builtin_sub_overflow(a.v, b.v, &r)) throw SnfOverflow();
    return r;
  }
  friend Checked operator*(Checked a, Checked b) {
    long long r;
    if (__builtin_mul_overflow(a.v, b.v, &r)) throw SnfOverflow();
    return r;
  }
  friend Checked operator/(Checked a, Checked b) { return a.v / b.v; }
  friend Checked operator%(Checked a, Checked b) { return a.v % b.v; }
  friend Checked operator-(Checked a) {
    long long r;
    if (__builtin_sub_overflow(0ll, a.v, &r)) throw SnfOverflow();
    return r;
  }
  friend bool operator==(Checked a, Checked b) { return a.v == b.v; }
  friend bool operator!=(Checked a, Checked b) { return a.v != b.v; }
  friend bool operator<(Checked a, Checked b) { return a.v < b.v; }
};

template <class T>
T abs_of(const T& x) {
  return x < T(0) ? -x : x;
}

// Diagonalization by row/column reduction with a minimal-absolute-value
// pivot, then a divisibility fix-up so d1 | d2 | ... .
template <class T>
std::vector<T> snf_divisors(std::vector<T> m, int rows, int cols) {
  auto at = [&](int r, int c) -> T& { return m[static_cast<size_t>(r) * cols + c]; };
  const int dim = std::min(rows, cols);
  int t = 0;
  for (; t < dim; ++t) {
    // find minimal nonzero entry of the trailing submatrix
    int pr = -1, pc = -1;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        if (at(i, j) == T(0)) continue;
        if (pr < 0 || abs_of(at(i, j)) < abs_of(at(pr, pc))) {
          pr = i;
          pc = j;
        }
      }
    if (pr < 0) break;  // all zero
    if (pr != t)
      for (int j = t; j < cols; ++j) std::swap(at(t, j), at(pr, j));
    if (pc != t)
      for (int i = t; i < rows; ++i) std::swap(at(i, t), at(i, pc));

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < rows; ++i) {
        if (at(i, t) == T(0)) continue;
        T q = at(i, t) / at(t, t);
        if (q != T(0))
          for (int j = t; j < cols; ++j) at(i, j) = at(i, j) - q * at(t, j);
        if (at(i, t) != T(0)) {
          // remainder smaller than pivot: swap rows and continue reducing
          for (int j = t; j < cols; ++j) std::swap(at(t, j), at(i, j));
          clean = false;
        }
      }
      for (int j = t + 1; j < cols; ++j) {
        if (at(t, j) == T(0)) continue;
        T q = at(t, j) / at(t, t);
        if (q != T(0))
          for (int i = t; i < rows; ++i) at(i, j) = at(i, j) - q * at(i, t);
        if (at(t, j) != T(0)) {
          for (int i = t; i < rows; ++i) std::swap(at(i, t), at(i, j));
          clean = false;
        }
      }
      if (clean) {
        // pivot must divide the rest of the submatrix; if not, fold the
        // offending row in and keep reducing
        for (int i = t + 1; i < rows && clean; ++i)
          for (int j = t + 1; j < cols && clean; ++j)
            if (at(i, j) % at(t, t) != T(0)) {
              for (int jj = t; jj < cols; ++jj) at(t, jj) = at(t, jj) + at(i, jj);
              clean = false;
            }
      }
    }
  }

  std::vector<T> d;
  for (int i = 0; i < t; ++i) d.push_back(abs_of(at(i, i)));
  return d;
}

}  // namespace

AbelianInvariants smith_normal_form(const IntMatrix& M) {
  std::vector<long long> divisors;
  try {
    std::vector<Checked> m(M.a.begin(), M.a.end());
    std::vector<Checked> d = snf_divisors(std::move(m), M.rows, M.cols);
    for (Checked c : d) divisors.push_back(c.v);
  } catch (const SnfOverflow&) {
    using boost::multiprecision::cpp_int;
    std::vector<cpp_int> m(M.a.begin(), M.a.end());
    std::vector<cpp_int> d = snf_divisors(std::move(m), M.rows, M.cols);
    for (const cpp_int& c : d) {
      if (c > std::numeric_limits<long long>::max())
        throw std::overflow_error("snf: elementary divisor exceeds 64 bits");
      divisors.push_back(static_cast<long long>(c));
    }
  }

  AbelianInvariants ai;
  int nonzero = 0;
  for (long long d : divisors) {
    if (d == 0) continue;
    ++nonzero;
    if (d > 1) ai.torsion.push_back(d);
  }
  std::sort(ai.torsion.begin(), ai.torsion.end());
  ai.rank = M.cols - nonzero;
  return ai;
}

AbelianInvariants compute_h1(const FiniteGroup& G, const KodairaStructure& s) {
  Presentation P = orbifold_presentation(s.b, s.n);
  SchreierRewrite rw = schreier_rewrite(P, s.entries, G);
  return smith_normal_form(rw.matrix);
}

// ---------------------------------------------------------------------------
// Closed-form invariants
// ---------------------------------------------------------------------------

namespace {

long long exact_div(long long num, long long den, const char* what) {
  if (den == 0 || num % den != 0)
    throw std::domain_error(std::string("surface_invariants: non-integral ") + what +
                            " (invalid parameter combination)");
  return num / den;
}

}  // namespace

SurfaceInvariantReport surface_invariants(long long order, int b, int n, int m1,
                                          int m2, std::optional<int> q) {
  if (order <= 0 || b < 2 || n < 2)
    throw std::invalid_argument("surface_invariants: need order >= 1, b >= 2, n >= 2");
  if (m1 <= 0 || m2 <= 0 || order % m1 != 0 || order % m2 != 0)
    throw std::invalid_argument("surface_invariants: m1, m2 must divide the order");

  SurfaceInvariantReport r;
  r.group_order = order;
  r.b = b;
  r.n = n;
  r.m1 = m1;
  r.m2 = m2;

  const long long nn = n;
  const long long twob2 = 2ll * b - 2;
  // c1^2 = |G|(2b-2) * ((4b-4) n^2 + 4n(n-1) - (n-1)^2) / n^2
  r.c1_sq = exact_div(order * twob2 * ((4ll * b - 4) * nn * nn + 4 * nn * (nn - 1) - (nn - 1) * (nn - 1)),
                      nn * nn, "c1^2");
  // c2 = |G|(2b-2) * ((2b-2) n + (n-1)) / n
  r.c2 = exact_div(order * twob2 * (twob2 * nn + (nn - 1)), nn, "c2");
  r.sigma = exact_div(r.c1_sq - 2 * r.c2, 3, "signature");
  r.chi = exact_div(r.c1_sq + r.c2, 12, "chi");

  r.b1_base = 1 + static_cast<long long>(m1) * (b - 1);
  r.b2_base = 1 + static_cast<long long>(m2) * (b - 1);
  // 2g_i - 2 = (|G|/m_i)(2b-2+f), f = 1-1/n
  r.g1 = 1 + exact_div((order / m1) * (twob2 * nn + (nn - 1)), 2 * nn, "g1");
  r.g2 = 1 + exact_div((order / m2) * (twob2 * nn + (nn - 1)), 2 * nn, "g2");

  if (q) {
    r.q = *q;
    r.p_g = r.chi - 1 + *q;
    long long b1 = 2ll * *q;
    r.betti = {1, b1, r.c2 - 2 + 2 * b1, b1, 1};
  }
  return r;
}

}  // namespace kodaira
