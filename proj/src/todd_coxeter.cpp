#include "kodaira/todd_coxeter.hpp"

#include <deque>
#include <numeric>

namespace kodaira {

namespace {

constexpr int kUndef = -1;

// Column encoding: generator i acts as column 2i, its inverse as 2i+1.
inline int inv_col(int x) { return x ^ 1; }

struct Enumerator {
  int ngens;
  int ncols;
  int max_cosets;
  std::vector<std::vector<int>> relators;  // flat column sequences

  std::vector<int> tab;     // ncosets x ncols
  std::vector<int> parent;  // union-find for coincidences
  std::vector<int> def_from, def_col;  // definition edge: coset = def_from * def_col
  std::deque<int> dead_queue;
  int live = 0;

  int rep(int k) {
    while (parent[k] != k) {
      parent[k] = parent[parent[k]];
      k = parent[k];
    }
    return k;
  }

  bool dead(int k) { return parent[k] != k; }

  int& entry(int c, int x) { return tab[static_cast<size_t>(c) * ncols + x]; }

  int new_coset(int from, int col) {
    int c = static_cast<int>(parent.size());
    if (c >= max_cosets) throw CosetLimitExceeded(max_cosets);
    parent.push_back(c);
    def_from.push_back(from);
    def_col.push_back(col);
    tab.resize(tab.size() + ncols, kUndef);
    ++live;
    return c;
  }

  void define(int a, int x) {
    int b = new_coset(a, x);
    entry(a, x) = b;
    entry(b, inv_col(x)) = a;
  }

  void merge(int a, int b) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    --live;
    dead_queue.push_back(b);
  }

  void coincidence(int a, int b) {
    merge(a, b);
    while (!dead_queue.empty()) {
      int e = dead_queue.front();
      dead_queue.pop_front();
      for (int x = 0; x < ncols; ++x) {
        int f = entry(e, x);
        if (f == kUndef) continue;
        entry(f, inv_col(x)) = kUndef;
        int e1 = rep(e), f1 = rep(f);
        if (entry(e1, x) != kUndef) {
          merge(f1, entry(e1, x));
        } else if (entry(f1, inv_col(x)) != kUndef) {
          merge(e1, entry(f1, inv_col(x)));
        } else {
          entry(e1, x) = f1;
          entry(f1, inv_col(x)) = e1;
        }
      }
    }
  }

  void scan_and_fill(int alpha, const std::vector<int>& w) {
    if (w.empty()) return;
    int f = alpha, b = alpha;
    int i = 0, j = static_cast<int>(w.size()) - 1;
    while (true) {
      while (i <= j && entry(f, w[i]) != kUndef) f = entry(f, w[i++]);
      if (i > j) {
        if (f != b) coincidence(f, b);
        return;
      }
      while (j >= i && entry(b, inv_col(w[j])) != kUndef) b = entry(b, inv_col(w[j--]));
      if (j < i) {
        coincidence(f, b);
        return;
      }
      if (j == i) {
        entry(f, w[i]) = b;
        entry(b, inv_col(w[i])) = f;
        return;
      }
      define(f, w[i]);
    }
  }

  void run() {
    new_coset(kUndef, kUndef);  // coset 0 = identity
    for (int alpha = 0; alpha < static_cast<int>(parent.size()); ++alpha) {
      if (dead(alpha)) continue;
      for (const auto& w : relators) {
        scan_and_fill(alpha, w);
        if (dead(alpha)) break;
      }
      if (dead(alpha)) continue;
      for (int x = 0; x < ncols; ++x)
        if (entry(alpha, x) == kUndef) define(alpha, x);
    }
  }
};

std::vector<int> flatten(const Word& w) {
  std::vector<int> out;
  for (auto& [g, e] : w.syms) {
    int col = e < 0 ? 2 * g + 1 : 2 * g;
    int k = e < 0 ? -e : e;
    for (int i = 0; i < k; ++i) out.push_back(col);
  }
  return out;
}

}  // namespace

FiniteGroup todd_coxeter(const Presentation& P, int max_cosets) {
  if (P.num_generators() == 0)
    throw std::invalid_argument("todd_coxeter: presentation has no generators");

  Enumerator en;
  en.ngens = P.num_generators();
  en.ncols = 2 * en.ngens;
  en.max_cosets = max_cosets;
  for (const Word& r : P.relators) {
    auto w = flatten(r);
    if (!w.empty()) en.relators.push_back(std::move(w));
  }
  en.run();

  // Compress live cosets, keeping definition order; coset 0 stays first.
  const int total = static_cast<int>(en.parent.size());
  std::vector<int> new_id(total, -1);
  std::vector<int> old_id;
  for (int c = 0; c < total; ++c) {
    if (!en.dead(c)) {
      new_id[c] = static_cast<int>(old_id.size());
      old_id.push_back(c);
    }
  }
  const int n = static_cast<int>(old_id.size());

  // Coset action of each column on live cosets.
  std::vector<int> act(static_cast<size_t>(n) * en.ncols);
  for (int c = 0; c < n; ++c)
    for (int x = 0; x < en.ncols; ++x) {
      int t = en.entry(old_id[c], x);
      if (t == kUndef) throw std::logic_error("todd_coxeter: incomplete table");
      act[static_cast<size_t>(c) * en.ncols + x] = new_id[en.rep(t)];
    }

  // Definition edge of each live coset, rerouted through live representatives.
  // Parents always precede children, so products can be filled in one pass:
  // elem(c) = elem(parent) * column, hence a*c = act(a*parent, column).
  std::vector<ElemId> table(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a) table[static_cast<size_t>(a) * n + 0] = a;
  for (int c = 1; c < n; ++c) {
    int p = new_id[en.rep(en.def_from[old_id[c]])];
    int x = en.def_col[old_id[c]];
    for (int a = 0; a < n; ++a) {
      int ap = table[static_cast<size_t>(a) * n + p];
      table[static_cast<size_t>(a) * n + c] = act[static_cast<size_t>(ap) * en.ncols + x];
    }
  }

  std::vector<ElemId> gens(en.ngens);
  for (int g = 0; g < en.ngens; ++g) gens[g] = act[2 * g];

  FiniteGroup G = group_from_table(n, std::move(table), P.label, std::move(gens));

  // Every relator must evaluate to the identity under the recorded images.
  for (const Word& r : P.relators)
    if (evaluate_word(G, G.generators, r) != kIdentity)
      throw std::logic_error("todd_coxeter: relator does not vanish in result");
  return G;
}

}  // namespace kodaira
