#include "kodaira/automorphisms.hpp"

#include <algorithm>
#include <stdexcept>

namespace kodaira {

namespace {

// Order + centralizer-order-multiset fingerprint, as a comparable key.
std::vector<std::vector<int>> element_fingerprints(const FiniteGroup& G) {
  std::vector<std::vector<int>> fp(G.order);
  for (ElemId g = 0; g < G.order; ++g) {
    SubgroupSet c = centralizer(G, g);
    std::vector<int> key;
    key.push_back(G.order_of(g));
    key.push_back(c.count());
    for (ElemId h : c.members()) key.push_back(G.order_of(h));
    std::sort(key.begin() + 2, key.end());
    fp[g] = std::move(key);
  }
  return fp;
}

struct AutSearch {
  const FiniteGroup& G;
  std::vector<ElemId> phi;
  std::vector<char> used;
  std::vector<ElemId> defined;

  explicit AutSearch(const FiniteGroup& g) : G(g), phi(g.order, -1), used(g.order, 0) {
    set(kIdentity, kIdentity);
  }

  void set(ElemId a, ElemId b) {
    phi[a] = b;
    used[b] = 1;
    defined.push_back(a);
  }

  size_t mark() const { return defined.size(); }

  void rollback(size_t m) {
    while (defined.size() > m) {
      ElemId a = defined.back();
      defined.pop_back();
      used[phi[a]] = 0;
      phi[a] = -1;
    }
  }

  // Extends the partial map by g -> h and closes under products, checking
  // multiplicativity against everything already defined.
  bool assign(ElemId g, ElemId h) {
    if (phi[g] >= 0) return phi[g] == h;
    if (used[h]) return false;
    size_t frontier = defined.size();
    set(g, h);
    while (frontier < defined.size()) {
      ElemId e = defined[frontier++];
      ElemId fe = phi[e];
      for (size_t i = 0; i < frontier; ++i) {
        ElemId d = defined[i];
        ElemId fd = phi[d];
        ElemId p = G.mul(e, d), q = G.mul(fe, fd);
        if (phi[p] < 0) {
          if (used[q]) return false;
          set(p, q);
        } else if (phi[p] != q) {
          return false;
        }
        p = G.mul(d, e);
        q = G.mul(fd, fe);
        if (phi[p] < 0) {
          if (used[q]) return false;
          set(p, q);
        } else if (phi[p] != q) {
          return false;
        }
      }
    }
    return true;
  }
};

}  // namespace

std::vector<Automorphism> automorphism_group(const FiniteGroup& G) {
  if (G.order > 4096)
    throw std::invalid_argument("automorphism_group: order above 4096 unsupported");

  auto fp = element_fingerprints(G);
  std::vector<std::vector<ElemId>> cand(G.order);
  for (ElemId g = 0; g < G.order; ++g)
    for (ElemId h = 0; h < G.order; ++h)
      if (fp[g] == fp[h]) cand[g].push_back(h);

  std::vector<ElemId> gens;
  SubgroupSet span(G.order);
  span.insert(kIdentity);
  while (span.count() < G.order) {
    ElemId best = -1;
    for (ElemId g = 0; g < G.order; ++g) {
      if (span.contains(g)) continue;
      if (best < 0 || cand[g].size() < cand[best].size()) best = g;
    }
    gens.push_back(best);
    span = subgroup_closure(G, span, std::span<const ElemId>(&best, 1));
  }

  std::vector<Automorphism> out;
  AutSearch hs(G);
  auto rec = [&](auto&& self, size_t depth) -> void {
    if (depth == gens.size()) {
      out.push_back(Automorphism{hs.phi});
      return;
    }
    ElemId g = gens[depth];
    if (hs.phi[g] >= 0) {
      self(self, depth + 1);
      return;
    }
    for (ElemId h : cand[g]) {
      size_t m = hs.mark();
      if (hs.assign(g, h)) self(self, depth + 1);
      hs.rollback(m);
    }
  };
  rec(rec, 0);

  std::sort(out.begin(), out.end(),
            [](const Automorphism& a, const Automorphism& b) { return a.perm < b.perm; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ElemId> apply_to_tuple(const Automorphism& phi,
                                   std::span<const ElemId> tuple) {
  std::vector<ElemId> out(tuple.size());
  for (size_t i = 0; i < tuple.size(); ++i) out[i] = phi.perm[tuple[i]];
  return out;
}

Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
  Automorphism out;
  out.perm.resize(phi.perm.size());
  for (size_t i = 0; i < phi.perm.size(); ++i) out.perm[i] = phi.perm[psi.perm[i]];
  return out;
}

}  // namespace kodaira
