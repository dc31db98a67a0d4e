#include "kodaira/classify.hpp"

#include <algorithm>

namespace kodaira {

CctVerdict is_cct(const FiniteGroup& G) {
  CctVerdict v;
  SubgroupSet Z = center(G);
  if (Z.count() == G.order) {
    v.is_cct = true;
    v.vacuous = true;
    return v;
  }
  for (ElemId y = 0; y < G.order; ++y) {
    if (Z.contains(y)) continue;
    SubgroupSet C = centralizer(G, y);
    std::vector<ElemId> m = C.members();
    for (size_t i = 0; i < m.size(); ++i) {
      for (size_t j = i + 1; j < m.size(); ++j) {
        if (G.mul(m[i], m[j]) != G.mul(m[j], m[i])) {
          // x, w commute with y but not with each other; a non-commuting
          // pair is automatically non-central.
          v.is_cct = false;
          v.witness = CctWitness{m[i], y, m[j]};
          return v;
        }
      }
    }
  }
  v.is_cct = true;
  return v;
}

MonolithicVerdict mon(const FiniteGroup& G) {
  MonolithicVerdict v;
  SubgroupSet acc(G.order);
  for (ElemId g = 0; g < G.order; ++g) acc.insert(g);
  for (ElemId g = 1; g < G.order; ++g) {
    acc &= normal_closure(G, std::span<const ElemId>(&g, 1));
    if (acc.count() == 1) break;
  }
  v.mon = std::move(acc);
  v.is_monolithic = v.mon.count() > 1;
  return v;
}

std::vector<SubgroupSet> all_normal_subgroups(const FiniteGroup& G) {
  std::vector<SubgroupSet> subs;
  std::vector<uint64_t> hashes;
  auto add = [&](const SubgroupSet& s) {
    uint64_t h = s.hash();
    for (size_t i = 0; i < subs.size(); ++i)
      if (hashes[i] == h && subs[i] == s) return false;
    hashes.push_back(h);
    subs.push_back(s);
    return true;
  };

  SubgroupSet triv(G.order);
  triv.insert(kIdentity);
  add(triv);
  for (ElemId g = 1; g < G.order; ++g)
    add(normal_closure(G, std::span<const ElemId>(&g, 1)));

  // Join-closure; every normal subgroup is a join of element closures.
  bool changed = true;
  while (changed) {
    changed = false;
    size_t count = subs.size();
    for (size_t i = 0; i < count; ++i) {
      for (size_t j = i + 1; j < count; ++j) {
        if (subs[i].is_subset_of(subs[j]) || subs[j].is_subset_of(subs[i])) continue;
        SubgroupSet join = subgroup_closure(G, subs[i], subs[j].members());
        if (add(join)) changed = true;
      }
    }
  }

  std::sort(subs.begin(), subs.end(), [](const SubgroupSet& a, const SubgroupSet& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    return a.members() < b.members();
  });
  return subs;
}

std::optional<QuotientMatch> has_quotient_isomorphic_to(const FiniteGroup& G,
                                                        const FiniteGroup& H) {
  if (H.order == 0 || G.order % H.order != 0) return std::nullopt;
  const int target = G.order / H.order;
  for (const SubgroupSet& N : all_normal_subgroups(G)) {
    if (N.count() != target) continue;
    QuotientResult q = quotient(G, N);
    if (auto iso = find_isomorphism(q.group, H)) {
      QuotientMatch m;
      m.kernel = N;
      m.projection.resize(G.order);
      for (ElemId g = 0; g < G.order; ++g) m.projection[g] = (*iso)[q.projection[g]];
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace kodaira
