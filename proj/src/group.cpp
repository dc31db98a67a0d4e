#include "kodaira/group.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <stdexcept>

namespace kodaira {

int SubgroupSet::count() const {
  int c = 0;
  for (uint64_t w : words_) c += std::popcount(w);
  return c;
}

std::vector<ElemId> SubgroupSet::members() const {
  std::vector<ElemId> out;
  for (size_t wi = 0; wi < words_.size(); ++wi) {
    uint64_t w = words_[wi];
    while (w) {
      int b = std::countr_zero(w);
      out.push_back(static_cast<ElemId>(wi * 64 + b));
      w &= w - 1;
    }
  }
  return out;
}

SubgroupSet& SubgroupSet::operator&=(const SubgroupSet& o) {
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

SubgroupSet& SubgroupSet::operator|=(const SubgroupSet& o) {
  for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

bool SubgroupSet::is_subset_of(const SubgroupSet& o) const {
  for (size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

uint64_t SubgroupSet::hash() const {
  uint64_t h = 1469598103934665603ull;
  for (uint64_t w : words_) {
    h ^= w;
    h *= 1099511628211ull;
  }
  return h;
}

ElemId FiniteGroup::mul(ElemId a, ElemId b) const {
  if (a < 0 || a >= order || b < 0 || b >= order)
    throw std::out_of_range("element id out of range");
  return table[static_cast<size_t>(a) * order + b];
}

ElemId FiniteGroup::inv(ElemId a) const {
  if (a < 0 || a >= order) throw std::out_of_range("element id out of range");
  return inverses[a];
}

int FiniteGroup::order_of(ElemId a) const {
  if (a < 0 || a >= order) throw std::out_of_range("element id out of range");
  return element_orders[a];
}

ElemId FiniteGroup::power(ElemId a, long long e) const {
  if (a < 0 || a >= order) throw std::out_of_range("element id out of range");
  ElemId base = e < 0 ? inverses[a] : a;
  long long k = e < 0 ? -e : e;
  ElemId acc = kIdentity;
  for (long long i = 0; i < k; ++i) acc = mul(acc, base);
  return acc;
}

bool FiniteGroup::is_abelian() const {
  for (ElemId a = 0; a < order; ++a)
    for (ElemId b = a + 1; b < order; ++b)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

namespace {

void validate_axioms(const FiniteGroup& G) {
  const int n = G.order;
  if (n <= 0) throw std::invalid_argument("group order must be positive");
  if (G.table.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("multiplication table has wrong size");
  for (const ElemId v : G.table)
    if (v < 0 || v >= n) throw std::invalid_argument("table entry out of range");
  for (ElemId g = 0; g < n; ++g) {
    if (G.table[static_cast<size_t>(kIdentity) * n + g] != g ||
        G.table[static_cast<size_t>(g) * n + kIdentity] != g)
      throw std::invalid_argument("identity axiom fails");
  }
  for (ElemId g = 0; g < n; ++g) {
    ElemId h = G.inverses[g];
    if (G.table[static_cast<size_t>(h) * n + g] != kIdentity ||
        G.table[static_cast<size_t>(g) * n + h] != kIdentity)
      throw std::invalid_argument("inverse axiom fails");
  }
  auto assoc = [&](ElemId a, ElemId b, ElemId c) {
    return G.table[static_cast<size_t>(G.table[static_cast<size_t>(a) * n + b]) * n + c] ==
           G.table[static_cast<size_t>(a) * n + G.table[static_cast<size_t>(b) * n + c]];
  };
  if (n <= 256) {
    for (ElemId a = 0; a < n; ++a)
      for (ElemId b = 0; b < n; ++b)
        for (ElemId c = 0; c < n; ++c)
          if (!assoc(a, b, c)) throw std::invalid_argument("associativity fails");
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<ElemId> d(0, n - 1);
    for (int i = 0; i < 1'000'000; ++i)
      if (!assoc(d(rng), d(rng), d(rng)))
        throw std::invalid_argument("associativity fails (sampled)");
  }
  for (ElemId g = 0; g < n; ++g) {
    int o = G.element_orders[g];
    if (o < 1 || n % o != 0)
      throw std::invalid_argument("element order does not divide group order");
    ElemId acc = kIdentity;
    for (int k = 1; k < o; ++k) {
      acc = G.table[static_cast<size_t>(acc) * n + g];
      if (acc == kIdentity) throw std::invalid_argument("element order not minimal");
    }
    if (G.table[static_cast<size_t>(acc) * n + g] != kIdentity)
      throw std::invalid_argument("element order incorrect");
  }
}

}  // namespace

FiniteGroup group_from_table(int order, std::vector<ElemId> table,
                             std::string label, std::vector<ElemId> generators) {
  FiniteGroup G;
  G.order = order;
  G.table = std::move(table);
  G.label = std::move(label);
  G.generators = std::move(generators);

  G.inverses.assign(order, -1);
  for (ElemId g = 0; g < order; ++g) {
    for (ElemId h = 0; h < order; ++h) {
      if (G.table[static_cast<size_t>(g) * order + h] == kIdentity &&
          G.table[static_cast<size_t>(h) * order + g] == kIdentity) {
        G.inverses[g] = h;
        break;
      }
    }
    if (G.inverses[g] < 0) throw std::invalid_argument("element without inverse");
  }

  G.element_orders.assign(order, 0);
  for (ElemId g = 0; g < order; ++g) {
    ElemId acc = g;
    int o = 1;
    while (acc != kIdentity) {
      acc = G.table[static_cast<size_t>(acc) * order + g];
      ++o;
      if (o > order) throw std::invalid_argument("element order exceeds group order");
    }
    G.element_orders[g] = o;
  }

  validate_axioms(G);
  return G;
}

ElemId multiply(const FiniteGroup& G, ElemId g, ElemId h) { return G.mul(g, h); }

ElemId commutator(const FiniteGroup& G, ElemId g, ElemId h) {
  return G.mul(G.mul(g, h), G.mul(G.inv(g), G.inv(h)));
}

ElemId conjugate(const FiniteGroup& G, ElemId x, ElemId g) {
  return G.mul(G.mul(x, g), G.inv(x));
}

SubgroupSet centralizer(const FiniteGroup& G, ElemId g) {
  SubgroupSet S(G.order);
  for (ElemId h = 0; h < G.order; ++h)
    if (G.mul(h, g) == G.mul(g, h)) S.insert(h);
  return S;
}

SubgroupSet center(const FiniteGroup& G) {
  SubgroupSet S(G.order);
  for (ElemId g = 0; g < G.order; ++g) {
    bool central = true;
    for (ElemId h = 0; h < G.order && central; ++h)
      central = G.mul(g, h) == G.mul(h, g);
    if (central) S.insert(g);
  }
  return S;
}

namespace {

// Closes `set` under multiplication, given `fresh` = elements not yet
// combined with the rest. The set must contain the identity.
void close_under_products(const FiniteGroup& G, SubgroupSet& set,
                          std::vector<ElemId> fresh) {
  std::vector<ElemId> current = set.members();
  while (!fresh.empty()) {
    std::vector<ElemId> next;
    for (ElemId f : fresh) {
      for (ElemId c : current) {
        for (ElemId p : {G.mul(f, c), G.mul(c, f)}) {
          if (!set.contains(p)) {
            set.insert(p);
            next.push_back(p);
          }
        }
      }
    }
    for (ElemId f : fresh) current.push_back(f);
    fresh = std::move(next);
  }
}

}  // namespace

SubgroupSet subgroup_generated(const FiniteGroup& G, std::span<const ElemId> gens) {
  SubgroupSet S(G.order);
  S.insert(kIdentity);
  std::vector<ElemId> fresh;
  for (ElemId g : gens) {
    if (g < 0 || g >= G.order) throw std::out_of_range("generator id out of range");
    if (!S.contains(g)) {
      S.insert(g);
      fresh.push_back(g);
    }
    ElemId gi = G.inv(g);
    if (!S.contains(gi)) {
      S.insert(gi);
      fresh.push_back(gi);
    }
  }
  close_under_products(G, S, std::move(fresh));
  return S;
}

SubgroupSet subgroup_closure(const FiniteGroup& G, const SubgroupSet& seed,
                             std::span<const ElemId> extra) {
  SubgroupSet S = seed;
  std::vector<ElemId> fresh;
  for (ElemId g : extra) {
    if (!S.contains(g)) {
      S.insert(g);
      fresh.push_back(g);
    }
    ElemId gi = G.inv(g);
    if (!S.contains(gi)) {
      S.insert(gi);
      fresh.push_back(gi);
    }
  }
  close_under_products(G, S, std::move(fresh));
  return S;
}

SubgroupSet normal_closure(const FiniteGroup& G, std::span<const ElemId> gens) {
  // Close alternately under conjugation and products until stable.
  SubgroupSet S = subgroup_generated(G, gens);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<ElemId> conj;
    for (ElemId h : S.members()) {
      for (ElemId x = 0; x < G.order; ++x) {
        ElemId c = conjugate(G, x, h);
        if (!S.contains(c)) {
          S.insert(c);
          conj.push_back(c);
          changed = true;
        }
      }
    }
    if (changed) close_under_products(G, S, std::move(conj));
  }
  return S;
}

SubgroupSet derived_subgroup(const FiniteGroup& G) {
  SubgroupSet comms(G.order);
  comms.insert(kIdentity);
  std::vector<ElemId> gens;
  for (ElemId g = 0; g < G.order; ++g)
    for (ElemId h = 0; h < G.order; ++h) {
      ElemId c = commutator(G, g, h);
      if (!comms.contains(c)) {
        comms.insert(c);
        gens.push_back(c);
      }
    }
  SubgroupSet S(G.order);
  S.insert(kIdentity);
  close_under_products(G, S, std::move(gens));
  return S;
}

bool is_subgroup(const FiniteGroup& G, const SubgroupSet& H) {
  if (H.universe() != G.order || !H.contains(kIdentity)) return false;
  std::vector<ElemId> m = H.members();
  for (ElemId a : m) {
    if (!H.contains(G.inv(a))) return false;
    for (ElemId b : m)
      if (!H.contains(G.mul(a, b))) return false;
  }
  return true;
}

bool is_normal(const FiniteGroup& G, const SubgroupSet& H) {
  if (!is_subgroup(G, H)) return false;
  for (ElemId h : H.members())
    for (ElemId x = 0; x < G.order; ++x)
      if (!H.contains(conjugate(G, x, h))) return false;
  return true;
}

bool is_abelian_subset(const FiniteGroup& G, const SubgroupSet& H) {
  std::vector<ElemId> m = H.members();
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = i + 1; j < m.size(); ++j)
      if (G.mul(m[i], m[j]) != G.mul(m[j], m[i])) return false;
  return true;
}

QuotientResult quotient(const FiniteGroup& G, const SubgroupSet& N) {
  if (!is_normal(G, N)) throw std::invalid_argument("quotient: N is not a normal subgroup");
  const int n = G.order;
  std::vector<ElemId> nm = N.members();

  // Coset representative = minimal member; cosets numbered by increasing rep,
  // which puts the identity coset at 0.
  std::vector<ElemId> rep(n, -1);
  std::vector<ElemId> reps;
  for (ElemId g = 0; g < n; ++g) {
    if (rep[g] >= 0) continue;
    ElemId r = g;  // g is minimal in its coset: smaller elements are all assigned
    for (ElemId x : nm) rep[G.mul(g, x)] = r;
    reps.push_back(r);
  }
  const int q = static_cast<int>(reps.size());
  std::vector<int> coset_id(n, -1);
  for (int i = 0; i < q; ++i) coset_id[reps[i]] = i;

  std::vector<ElemId> proj(n);
  for (ElemId g = 0; g < n; ++g) proj[g] = coset_id[rep[g]];

  std::vector<ElemId> table(static_cast<size_t>(q) * q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      table[static_cast<size_t>(a) * q + b] = proj[G.mul(reps[a], reps[b])];

  std::string label;
  if (!G.label.empty()) label = G.label + "/N" + std::to_string(N.count());

  std::vector<ElemId> gens;
  for (ElemId g : G.generators) gens.push_back(proj[g]);

  QuotientResult out{group_from_table(q, std::move(table), std::move(label), std::move(gens)),
                     std::move(proj)};

  // Projection is a homomorphism by construction; re-check exhaustively at
  // these orders since downstream counting relies on it.
  for (ElemId a = 0; a < n; ++a)
    for (ElemId b = 0; b < n; ++b)
      if (out.projection[G.mul(a, b)] !=
          out.group.mul(out.projection[a], out.projection[b]))
        throw std::logic_error("quotient projection is not a homomorphism");
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism search
// ---------------------------------------------------------------------------

namespace {

// Invariant fingerprint of an element: its order, the size of its
// centralizer and the multiset of element orders inside the centralizer.
struct Fingerprint {
  int order = 0;
  int cent = 0;
  std::vector<int> cent_orders;
  auto operator<=>(const Fingerprint&) const = default;
};

std::vector<Fingerprint> fingerprints(const FiniteGroup& G) {
  std::vector<Fingerprint> fp(G.order);
  for (ElemId g = 0; g < G.order; ++g) {
    SubgroupSet c = centralizer(G, g);
    Fingerprint f;
    f.order = G.order_of(g);
    f.cent = c.count();
    for (ElemId h : c.members()) f.cent_orders.push_back(G.order_of(h));
    std::sort(f.cent_orders.begin(), f.cent_orders.end());
    fp[g] = std::move(f);
  }
  return fp;
}

// Partial homomorphism G -> H grown by closure propagation. Every newly
// defined element is multiplied against all previously defined ones, so a
// complete assignment is multiplicative on all pairs.
struct HomSearch {
  const FiniteGroup& G;
  const FiniteGroup& H;
  std::vector<ElemId> phi;
  std::vector<char> used;
  std::vector<ElemId> defined;

  HomSearch(const FiniteGroup& g, const FiniteGroup& h)
      : G(g), H(h), phi(g.order, -1), used(h.order, 0) {
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
        ElemId p1 = G.mul(e, d), q1 = H.mul(fe, fd);
        if (phi[p1] < 0) {
          if (used[q1]) return false;
          set(p1, q1);
        } else if (phi[p1] != q1) {
          return false;
        }
        ElemId p2 = G.mul(d, e), q2 = H.mul(fd, fe);
        if (phi[p2] < 0) {
          if (used[q2]) return false;
          set(p2, q2);
        } else if (phi[p2] != q2) {
          return false;
        }
      }
    }
    return true;
  }
};

}  // namespace

std::optional<std::vector<ElemId>> find_isomorphism(const FiniteGroup& G,
                                                    const FiniteGroup& H) {
  if (G.order != H.order) return std::nullopt;
  const int n = G.order;

  std::vector<Fingerprint> fg = fingerprints(G), fh = fingerprints(H);
  {
    std::vector<Fingerprint> a = fg, b = fh;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return std::nullopt;
  }

  // Candidate images per element of G.
  std::vector<std::vector<ElemId>> cand(n);
  for (ElemId g = 0; g < n; ++g)
    for (ElemId h = 0; h < n; ++h)
      if (fg[g] == fh[h]) cand[g].push_back(h);

  // Greedy generating sequence: repeatedly add the element outside the
  // current subgroup with the fewest candidate images.
  std::vector<ElemId> gens;
  SubgroupSet span(n);
  span.insert(kIdentity);
  while (span.count() < n) {
    ElemId best = -1;
    for (ElemId g = 0; g < n; ++g) {
      if (span.contains(g)) continue;
      if (best < 0 || cand[g].size() < cand[best].size()) best = g;
    }
    gens.push_back(best);
    span = subgroup_closure(G, span, std::span<const ElemId>(&best, 1));
  }

  HomSearch hs(G, H);
  std::vector<ElemId> result;

  auto rec = [&](auto&& self, size_t depth) -> bool {
    if (depth == gens.size()) {
      result = hs.phi;
      return true;
    }
    ElemId g = gens[depth];
    if (hs.phi[g] >= 0) return self(self, depth + 1);
    for (ElemId h : cand[g]) {
      size_t m = hs.mark();
      if (hs.assign(g, h) && self(self, depth + 1)) return true;
      hs.rollback(m);
    }
    return false;
  };

  if (rec(rec, 0)) return result;
  return std::nullopt;
}

}  // namespace kodaira
