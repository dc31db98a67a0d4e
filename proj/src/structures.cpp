#include "kodaira/structures.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace kodaira {

// ---------------------------------------------------------------------------
// Relation system
// ---------------------------------------------------------------------------

RelationSet generate_structure_relations(int b, std::optional<int> n) {
  if (b < 2) throw std::invalid_argument("generate_structure_relations: b must be >= 2");
  RelationSet rs;
  rs.b = b;
  rs.n = n;

  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= b; ++j) {
      rs.symbol_names.push_back("r" + std::to_string(i) + std::to_string(j));
      rs.symbol_names.push_back("t" + std::to_string(i) + std::to_string(j));
    }
  rs.symbol_names.push_back("z");

  auto R = [&](int i, int j) { return Word::gen(sym_rho(i, j, b)); };
  auto T = [&](int i, int j) { return Word::gen(sym_tau(i, j, b)); };
  const Word Z = Word::gen(sym_z(b));
  const Word one;
  auto inv = [](const Word& w) { return w.inverse(); };
  auto cm = [](const Word& a, const Word& c) { return Word::commutator_of(a, c); };

  using Kind = StructureRelation::Kind;
  auto push = [&](Kind k, std::string name, Word lhs, Word rhs) {
    rs.relations.push_back({k, std::move(name), std::move(lhs), std::move(rhs)});
  };

  // Surface relation of the first row:
  //   [r_1b^-1, t_1b^-1] t_1b^-1 ... [r_11^-1, t_11^-1] t_11^-1 (t_11 ... t_1b) = z
  {
    Word w;
    for (int j = b; j >= 1; --j) w = w * cm(inv(R(1, j)), inv(T(1, j))) * inv(T(1, j));
    for (int j = 1; j <= b; ++j) w = w * T(1, j);
    push(Kind::Surface, "S1", std::move(w), Z);
  }
  // Second row:
  //   [r_21^-1, t_21] t_21 ... [r_2b^-1, t_2b] t_2b (t_2b^-1 ... t_21^-1) = z^-1
  {
    Word w;
    for (int j = 1; j <= b; ++j) w = w * cm(inv(R(2, j)), T(2, j)) * T(2, j);
    for (int j = b; j >= 1; --j) w = w * inv(T(2, j));
    push(Kind::Surface, "S2", std::move(w), inv(Z));
  }

  // Conjugacy action of r_1j; for b = 2 this is R1..R10 in the order
  // (k descending over rho, then tau, then z).
  int idx = 1;
  for (int j = 1; j <= b; ++j) {
    for (int k = b; k >= 1; --k) {
      Word rhs;
      if (j < k || j == k) {
        rhs = one;
      } else {
        rhs = inv(Z) * R(2, k) * inv(R(2, j)) * Z * R(2, j) * inv(R(2, k));
      }
      push(Kind::RhoAction, "R" + std::to_string(idx++), cm(R(1, j), R(2, k)), std::move(rhs));
    }
    for (int k = b; k >= 1; --k) {
      Word rhs;
      if (j < k) {
        rhs = one;
      } else if (j == k) {
        rhs = inv(Z);
      } else {
        rhs = cm(inv(Z), T(2, k));
      }
      push(Kind::RhoAction, "R" + std::to_string(idx++), cm(R(1, j), T(2, k)), std::move(rhs));
    }
    push(Kind::RhoAction, "R" + std::to_string(idx++), cm(R(1, j), Z), cm(inv(R(2, j)), Z));
  }

  // Conjugacy action of t_1j; T1..T10 for b = 2.
  idx = 1;
  for (int j = 1; j <= b; ++j) {
    for (int k = b; k >= 1; --k) {
      Word rhs;
      if (j < k) {
        rhs = one;
      } else if (j == k) {
        rhs = inv(T(2, j)) * Z * T(2, j);
      } else {
        rhs = cm(inv(T(2, j)), Z);
      }
      push(Kind::TauAction, "T" + std::to_string(idx++), cm(T(1, j), R(2, k)), std::move(rhs));
    }
    for (int k = b; k >= 1; --k) {
      Word rhs;
      if (j < k) {
        rhs = one;
      } else if (j == k) {
        rhs = cm(inv(T(2, j)), Z);
      } else {
        rhs = inv(T(2, j)) * Z * T(2, j) * inv(Z) * T(2, k) * Z * inv(T(2, j)) * inv(Z) *
              T(2, j) * inv(T(2, k));
      }
      push(Kind::TauAction, "T" + std::to_string(idx++), cm(T(1, j), T(2, k)), std::move(rhs));
    }
    push(Kind::TauAction, "T" + std::to_string(idx++), cm(T(1, j), Z), cm(inv(T(2, j)), Z));
  }

  if (n) {
    Word zn;
    for (int i = 0; i < *n; ++i) zn = zn * Z;
    push(Kind::Orbifold, "ZN", std::move(zn), one);
  }
  return rs;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

std::vector<std::string> verify_structure(const FiniteGroup& G,
                                          std::span<const ElemId> t, int b,
                                          const VerifyOptions& opts) {
  if (static_cast<int>(t.size()) != 4 * b + 1)
    throw std::invalid_argument("verify_structure: tuple must have 4b+1 entries");
  for (ElemId e : t)
    if (e < 0 || e >= G.order)
      throw std::out_of_range("verify_structure: element id out of range");

  std::vector<std::string> bad;
  const ElemId z = t[sym_z(b)];
  const int oz = G.order_of(z);
  if (opts.n > 0) {
    if (oz != opts.n)
      bad.push_back("o(z) = " + std::to_string(oz) + ", required " + std::to_string(opts.n));
  } else if (oz < 2) {
    bad.push_back("o(z) = 1, required >= 2");
  }

  RelationSet rs = generate_structure_relations(b);
  for (const auto& rel : rs.relations) {
    if (!opts.check_surface && rel.kind == StructureRelation::Kind::Surface) continue;
    ElemId lhs = evaluate_word(G, t, rel.lhs);
    ElemId rhs = evaluate_word(G, t, rel.rhs);
    if (lhs != rhs)
      bad.push_back("relation " + rel.name + " fails (" + std::to_string(lhs) +
                    " != " + std::to_string(rhs) + ")");
  }

  if (opts.require_generation) {
    SubgroupSet H = subgroup_generated(G, t);
    if (H.count() != G.order)
      bad.push_back("tuple generates a proper subgroup of order " +
                    std::to_string(H.count()));
  }
  return bad;
}

KodairaStructure structure_metadata(const FiniteGroup& G,
                                    std::span<const ElemId> t, int b) {
  VerifyOptions vo;
  vo.check_surface = true;
  vo.require_generation = true;
  vo.n = 0;
  auto bad = verify_structure(G, t, b, vo);
  if (!bad.empty())
    throw std::invalid_argument("structure_metadata: invalid tuple: " + bad.front());

  KodairaStructure s;
  s.b = b;
  s.entries.assign(t.begin(), t.end());
  s.n = G.order_of(t[sym_z(b)]);

  std::vector<ElemId> half;
  for (int j = 1; j <= b; ++j) {
    half.push_back(t[sym_rho(1, j, b)]);
    half.push_back(t[sym_tau(1, j, b)]);
  }
  half.push_back(t[sym_z(b)]);
  s.k1 = subgroup_generated(G, half);

  half.clear();
  for (int j = 1; j <= b; ++j) {
    half.push_back(t[sym_rho(2, j, b)]);
    half.push_back(t[sym_tau(2, j, b)]);
  }
  half.push_back(t[sym_z(b)]);
  s.k2 = subgroup_generated(G, half);

  s.m1 = G.order / s.k1.count();
  s.m2 = G.order / s.k2.count();
  s.strong = s.m1 == 1 && s.m2 == 1;
  return s;
}

// ---------------------------------------------------------------------------
// Pruned b = 2 search engine
// ---------------------------------------------------------------------------
//
// Core lemma: for fixed a and target c, {x : [x,a] = c} = {x : x a x^-1 = ca}
// is either empty or a left coset of C_G(a). All twenty conjugacy relations
// constrain a first-row symbol on the left of such a commutator once z and
// the second row are fixed, so each first-row candidate set is an
// intersection of precomputed solution masks. The second surface relation
// pins tau_22 the same way, and the first surface relation pins rho_11 given
// (tau_11, rho_12, tau_12). Everything after the (z, rho_21, tau_21) shard
// loop is therefore mask arithmetic plus iteration over survivors.

namespace {

template <int W>
struct Mask {
  std::array<uint64_t, W> w{};

  void set(int i) { w[i >> 6] |= uint64_t{1} << (i & 63); }
  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1u; }
  bool empty() const {
    for (auto x : w)
      if (x) return false;
    return true;
  }
  int popcount() const {
    int c = 0;
    for (auto x : w) c += std::popcount(x);
    return c;
  }
  Mask& operator&=(const Mask& o) {
    for (int i = 0; i < W; ++i) w[i] &= o.w[i];
    return *this;
  }
  bool operator==(const Mask&) const = default;

  template <class F>
  void for_each(F&& f) const {
    for (int wi = 0; wi < W; ++wi) {
      uint64_t x = w[wi];
      while (x) {
        f(wi * 64 + std::countr_zero(x));
        x &= x - 1;
      }
    }
  }
};

struct ShardStats {
  uint64_t count = 0;
  std::vector<ElemId> tuples;  // stride 9
  std::set<int> seen_n;
  std::set<std::pair<int, int>> seen_k;
};

template <int W>
struct Engine {
  const FiniteGroup& G;
  int n;
  const ElemId* tab;
  const ElemId* invp;
  std::vector<Mask<W>> sol;  // sol[a*n+v] = {x : x a x^-1 = v}
  Mask<W> fullmask;

  explicit Engine(const FiniteGroup& g) : G(g), n(g.order) {
    tab = G.table.data();
    invp = G.inverses.data();
    sol.assign(static_cast<size_t>(n) * n, Mask<W>{});
    for (ElemId a = 0; a < n; ++a)
      for (ElemId x = 0; x < n; ++x) {
        ElemId v = mul(mul(x, a), invp[x]);
        sol[static_cast<size_t>(a) * n + v].set(x);
      }
    for (int i = 0; i < n; ++i) fullmask.set(i);
  }

  ElemId mul(ElemId a, ElemId b) const { return tab[static_cast<size_t>(a) * n + b]; }
  ElemId cm(ElemId a, ElemId b) const {
    return mul(mul(a, b), mul(invp[a], invp[b]));
  }
  // {x : [x,a] = c}
  const Mask<W>& constraint(ElemId a, ElemId c) const {
    return sol[static_cast<size_t>(a) * n + mul(c, a)];
  }

  Mask<W> closure(std::initializer_list<ElemId> gens) const {
    Mask<W> m;
    m.set(kIdentity);
    std::vector<ElemId> fresh;
    for (ElemId g : gens)
      if (!m.test(g)) {
        m.set(g);
        fresh.push_back(g);
      }
    std::vector<ElemId> cur = {kIdentity};
    while (!fresh.empty()) {
      std::vector<ElemId> next;
      for (ElemId f : fresh) {
        for (ElemId c : cur) {
          for (ElemId p : {mul(f, c), mul(c, f)}) {
            if (!m.test(p)) {
              m.set(p);
              next.push_back(p);
            }
          }
        }
        // products among the fresh batch itself
        for (ElemId f2 : fresh) {
          for (ElemId p : {mul(f, f2), mul(f2, f)}) {
            if (!m.test(p)) {
              m.set(p);
              next.push_back(p);
            }
          }
        }
      }
      for (ElemId f : fresh) cur.push_back(f);
      fresh = std::move(next);
    }
    return m;
  }

  Mask<W> closure_with(const Mask<W>& base, std::initializer_list<ElemId> extra) const {
    Mask<W> m = base;
    std::vector<ElemId> fresh;
    for (ElemId g : extra)
      if (!m.test(g)) {
        m.set(g);
        fresh.push_back(g);
      }
    std::vector<ElemId> cur;
    base.for_each([&](int i) { cur.push_back(i); });
    while (!fresh.empty()) {
      std::vector<ElemId> next;
      for (ElemId f : fresh) {
        for (ElemId c : cur) {
          for (ElemId p : {mul(f, c), mul(c, f)}) {
            if (!m.test(p)) {
              m.set(p);
              next.push_back(p);
            }
          }
        }
        for (ElemId f2 : fresh) {
          for (ElemId p : {mul(f, f2), mul(f2, f)}) {
            if (!m.test(p)) {
              m.set(p);
              next.push_back(p);
            }
          }
        }
      }
      for (ElemId f : fresh) cur.push_back(f);
      fresh = std::move(next);
    }
    return m;
  }

  std::vector<ElemId> z_candidates(std::optional<ElemId> require_z,
                                   std::optional<int> require_n) const {
    Mask<W> comm;
    for (ElemId a = 0; a < n; ++a)
      for (ElemId bb = 0; bb < n; ++bb) comm.set(cm(a, bb));
    std::vector<ElemId> out;
    comm.for_each([&](int zc) {
      if (zc == kIdentity) return;
      if (require_z && *require_z != zc) return;
      if (require_n && G.element_orders[zc] != *require_n) return;
      out.push_back(zc);
    });
    return out;
  }

  struct RowMasks {
    Mask<W> r11, t11, r12, t12;
    bool alive = false;
  };

  // Candidate sets for the four first-row symbols against a fixed second row.
  RowMasks first_row_masks(ElemId z, ElemId r21, ElemId t21, ElemId r22,
                           ElemId t22) const {
    RowMasks rm;
    const ElemId zi = invp[z];

    Mask<W> m = constraint(r22, kIdentity);             // R1
    m &= constraint(r21, kIdentity);                    // R2
    m &= constraint(t22, kIdentity);                    // R3
    m &= constraint(t21, zi);                           // R4
    m &= constraint(z, cm(invp[r21], z));               // R5
    if (m.empty()) return rm;
    rm.r11 = m;

    m = constraint(r22, kIdentity);                     // T1
    m &= constraint(r21, mul(mul(invp[t21], z), t21));  // T2
    m &= constraint(t22, kIdentity);                    // T3
    m &= constraint(t21, cm(invp[t21], z));             // T4
    m &= constraint(z, cm(invp[t21], z));               // T5
    if (m.empty()) return rm;
    rm.t11 = m;

    m = constraint(r22, kIdentity);                     // R6
    {
      ElemId c = mul(mul(mul(mul(mul(zi, r21), invp[r22]), z), r22), invp[r21]);
      m &= constraint(r21, c);                          // R7
    }
    m &= constraint(t22, zi);                           // R8
    m &= constraint(t21, cm(zi, t21));                  // R9
    m &= constraint(z, cm(invp[r22], z));               // R10
    if (m.empty()) return rm;
    rm.r12 = m;

    m = constraint(r22, mul(mul(invp[t22], z), t22));   // T6
    m &= constraint(r21, cm(invp[t22], z));             // T7
    m &= constraint(t22, cm(invp[t22], z));             // T8
    {
      // T9: [t12, t21] = t22^-1 z t22 z^-1 t21 z t22^-1 z^-1 t22 t21^-1
      ElemId c = mul(invp[t22], z);
      c = mul(c, t22);
      c = mul(c, zi);
      c = mul(c, t21);
      c = mul(c, z);
      c = mul(c, invp[t22]);
      c = mul(c, zi);
      c = mul(c, t22);
      c = mul(c, invp[t21]);
      m &= constraint(t21, c);                          // T9
    }
    m &= constraint(z, cm(invp[t22], z));               // T10
    if (m.empty()) return rm;
    rm.t12 = m;

    rm.alive = true;
    return rm;
  }

  // Runs one (z, rho_21, tau_21) shard of the b = 2 structure search.
  // `limit` < 0 means unlimited; emit is called for every found tuple.
  template <class Emit>
  void run_shard(ElemId z, ElemId r21, ElemId t21, bool count_only, long long limit,
                 uint64_t& count, ShardStats* stats, Emit&& emit) const {
    const ElemId zi = invp[z];
    // S2 with tau_22 cancelled: [r22^-1, t22] = t21^-1 [r21^-1,t21]^-1 z^-1 t21
    const ElemId c_s2 =
        mul(mul(mul(invp[t21], invp[cm(invp[r21], t21)]), zi), t21);

    std::array<ElemId, 9> t{};
    t[4] = r21;
    t[5] = t21;
    t[8] = z;

    for (ElemId r22 = 0; r22 < n; ++r22) {
      // tau_22 solutions of [r22^-1, t22] = c_s2
      const Mask<W>& m_t22 =
          sol[static_cast<size_t>(invp[r22]) * n + mul(invp[c_s2], invp[r22])];
      bool done = false;
      m_t22.for_each([&](int t22) {
        if (done) return;
        RowMasks rm = first_row_masks(z, r21, t21, r22, t22);
        if (!rm.alive) return;

        Mask<W> k2 = closure({r21, t21, static_cast<ElemId>(r22),
                              static_cast<ElemId>(t22), z});
        const int k2o = k2.popcount();
        const bool k2_full = k2o == n;
        const bool k2_index2 = 2 * k2o == n;
        bool cell_sampled = false;

        t[2 + 4] = r22;  // rho_22 at index 6
        t[7] = t22;

        rm.r12.for_each([&](int r12) {
          if (done) return;
          t[2] = r12;
          rm.t12.for_each([&](int t12) {
            if (done) return;
            t[3] = t12;
            // S1: [r12^-1,t12^-1] t12^-1 [r11^-1,t11^-1] t12 = z
            ElemId A = mul(cm(invp[r12], invp[t12]), invp[t12]);
            ElemId target = mul(mul(invp[A], z), invp[t12]);
            rm.t11.for_each([&](int t11) {
              if (done) return;
              t[1] = t11;
              ElemId bb = invp[t11];
              const Mask<W>& ys =
                  sol[static_cast<size_t>(bb) * n + mul(target, bb)];
              ys.for_each([&](int y) {
                if (done) return;
                ElemId r11 = invp[y];
                if (!rm.r11.test(r11)) return;
                // generation
                bool gen;
                if (k2_full) {
                  gen = true;
                } else if (k2_index2) {
                  gen = !k2.test(r11) || !k2.test(t11) || !k2.test(r12) ||
                        !k2.test(t12);
                } else {
                  Mask<W> full = closure_with(
                      k2, {r11, static_cast<ElemId>(t11),
                           static_cast<ElemId>(r12), static_cast<ElemId>(t12)});
                  gen = full.popcount() == n;
                }
                if (!gen) return;
                t[0] = r11;

                if (stats) {
                  stats->seen_n.insert(G.element_orders[z]);
                  if (!count_only || !cell_sampled) {
                    Mask<W> k1 = closure({r11, static_cast<ElemId>(t11),
                                          static_cast<ElemId>(r12),
                                          static_cast<ElemId>(t12), z});
                    stats->seen_k.insert({k1.popcount(), k2o});
                    cell_sampled = true;
                  }
                }
                ++count;
                emit(t);
                if (limit >= 0 && count >= static_cast<uint64_t>(limit)) done = true;
              });
            });
          });
        });
        if (done) return;
      });
      if (done) break;
    }
  }
};

template <int W>
StructureSearchResult run_b2_search(const FiniteGroup& G,
                                    const StructureSearchOptions& opts) {
  Engine<W> en(G);
  const int n = G.order;
  StructureSearchResult res;
  res.b = 2;

  std::vector<ElemId> zs = en.z_candidates(opts.require_z, opts.require_n);
  if (zs.empty()) return res;

  struct Shard {
    ElemId z, r21, t21;
  };
  std::vector<Shard> shards;
  for (ElemId z : zs)
    for (ElemId r21 = 0; r21 < n; ++r21)
      for (ElemId t21 = 0; t21 < n; ++t21) shards.push_back({z, r21, t21});
  res.shard_count = static_cast<int>(shards.size());

  const bool materialize = !opts.count_only;
  std::mutex sink_mutex;

  if (opts.first_k >= 0 || opts.threads <= 1) {
    // Sequential scan in shard order; first-k stops early and is
    // deterministic regardless of requested thread count.
    ShardStats stats;
    uint64_t count = 0;
    for (const Shard& s : shards) {
      long long remaining = opts.first_k >= 0 ? opts.first_k : -1;
      en.run_shard(s.z, s.r21, s.t21, opts.count_only, remaining, count, &stats,
                   [&](const std::array<ElemId, 9>& t) {
                     if (materialize) stats.tuples.insert(stats.tuples.end(), t.begin(), t.end());
                     if (opts.sink) opts.sink(std::span<const ElemId>(t.data(), 9));
                   });
      if (opts.first_k >= 0 && count >= static_cast<uint64_t>(opts.first_k)) break;
    }
    res.total = count;
    res.tuples = std::move(stats.tuples);
    res.observed_n.assign(stats.seen_n.begin(), stats.seen_n.end());
    res.observed_k_orders.assign(stats.seen_k.begin(), stats.seen_k.end());
  } else {
    std::vector<ShardStats> per_shard(shards.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= shards.size()) break;
        ShardStats& st = per_shard[i];
        en.run_shard(shards[i].z, shards[i].r21, shards[i].t21, opts.count_only, -1,
                     st.count, &st, [&](const std::array<ElemId, 9>& t) {
                       if (materialize)
                         st.tuples.insert(st.tuples.end(), t.begin(), t.end());
                       if (opts.sink) {
                         std::lock_guard<std::mutex> lk(sink_mutex);
                         opts.sink(std::span<const ElemId>(t.data(), 9));
                       }
                     });
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < opts.threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::set<int> seen_n;
    std::set<std::pair<int, int>> seen_k;
    for (const ShardStats& st : per_shard) {
      res.total += st.count;
      seen_n.insert(st.seen_n.begin(), st.seen_n.end());
      seen_k.insert(st.seen_k.begin(), st.seen_k.end());
      if (materialize) res.tuples.insert(res.tuples.end(), st.tuples.begin(), st.tuples.end());
    }
    res.observed_n.assign(seen_n.begin(), seen_n.end());
    res.observed_k_orders.assign(seen_k.begin(), seen_k.end());
  }

  if (materialize && opts.sort_canonical) {
    const size_t stride = 9;
    std::vector<size_t> index(res.tuples.size() / stride);
    for (size_t i = 0; i < index.size(); ++i) index[i] = i;
    auto cmp = [&](size_t a, size_t b) {
      return std::lexicographical_compare(
          res.tuples.begin() + a * stride, res.tuples.begin() + (a + 1) * stride,
          res.tuples.begin() + b * stride, res.tuples.begin() + (b + 1) * stride);
    };
    std::sort(index.begin(), index.end(), cmp);
    std::vector<ElemId> sorted(res.tuples.size());
    for (size_t i = 0; i < index.size(); ++i)
      std::copy_n(res.tuples.begin() + index[i] * stride, stride,
                  sorted.begin() + i * stride);
    res.tuples = std::move(sorted);
  }
  return res;
}

template <int W>
std::vector<std::vector<ElemId>> run_shard_sampling(const FiniteGroup& G,
                                                    size_t max_count) {
  Engine<W> en(G);
  const int n = G.order;
  std::vector<std::vector<ElemId>> out;
  for (ElemId z : en.z_candidates(std::nullopt, std::nullopt)) {
    for (ElemId r21 = 0; r21 < n; ++r21) {
      for (ElemId t21 = 0; t21 < n; ++t21) {
        uint64_t count = 0;
        en.run_shard(z, r21, t21, true, 1, count, nullptr,
                     [&](const std::array<ElemId, 9>& t) {
                       out.emplace_back(t.begin(), t.end());
                     });
        if (out.size() >= max_count) return out;
      }
    }
  }
  return out;
}

template <int W>
uint64_t run_prestructure_count(const FiniteGroup& G, int threads,
                                const std::function<void(std::span<const ElemId>)>& sink,
                                long long first_k) {
  Engine<W> en(G);
  const int n = G.order;
  std::vector<ElemId> zs = en.z_candidates(std::nullopt, std::nullopt);
  if (zs.empty()) return 0;

  struct Shard {
    ElemId z, r21;
  };
  std::vector<Shard> shards;
  for (ElemId z : zs)
    for (ElemId r21 = 0; r21 < n; ++r21) shards.push_back({z, r21});

  const bool emitting = static_cast<bool>(sink) || first_k >= 0;

  auto run_shard = [&](const Shard& s, uint64_t& count, long long limit) {
    std::array<ElemId, 9> t{};
    t[8] = s.z;
    t[4] = s.r21;
    for (ElemId t21 = 0; t21 < n && (limit < 0 || count < static_cast<uint64_t>(limit)); ++t21) {
      t[5] = t21;
      for (ElemId r22 = 0; r22 < n && (limit < 0 || count < static_cast<uint64_t>(limit)); ++r22) {
        t[6] = r22;
        for (ElemId t22 = 0; t22 < n; ++t22) {
          auto rm = en.first_row_masks(s.z, s.r21, t21, r22, t22);
          if (!rm.alive) continue;
          if (!emitting) {
            count += static_cast<uint64_t>(rm.r11.popcount()) * rm.t11.popcount() *
                     rm.r12.popcount() * rm.t12.popcount();
          } else {
            t[7] = t22;
            bool done = false;
            rm.r11.for_each([&](int r11) {
              if (done) return;
              t[0] = r11;
              rm.t11.for_each([&](int t11) {
                if (done) return;
                t[1] = t11;
                rm.r12.for_each([&](int r12) {
                  if (done) return;
                  t[2] = r12;
                  rm.t12.for_each([&](int t12) {
                    if (done) return;
                    t[3] = t12;
                    ++count;
                    if (sink) sink(std::span<const ElemId>(t.data(), 9));
                    if (limit >= 0 && count >= static_cast<uint64_t>(limit)) done = true;
                  });
                });
              });
            });
            if (done) return;
          }
          if (limit >= 0 && count >= static_cast<uint64_t>(limit)) return;
        }
      }
    }
  };

  if (emitting || threads <= 1) {
    uint64_t count = 0;
    for (const Shard& s : shards) {
      run_shard(s, count, first_k);
      if (first_k >= 0 && count >= static_cast<uint64_t>(first_k)) break;
    }
    return count;
  }

  std::vector<uint64_t> per_shard(shards.size(), 0);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= shards.size()) break;
      run_shard(shards[i], per_shard[i], -1);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  uint64_t total = 0;
  for (uint64_t c : per_shard) total += c;
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public search entry points
// ---------------------------------------------------------------------------

StructureSearchResult find_structures(const FiniteGroup& G, int b,
                                      const StructureSearchOptions& opts) {
  if (b < 2) throw std::invalid_argument("find_structures: b must be >= 2");
  if (b > 2) {
    if (!opts.allow_general_b)
      throw std::invalid_argument(
          "find_structures: exhaustive search for b > 2 is exponential; "
          "set allow_general_b to run it anyway");
    StructureSearchResult res;
    res.b = b;
    VerifyOptions vo;
    vo.check_surface = true;
    vo.require_generation = true;
    vo.n = opts.require_n.value_or(0);
    std::vector<ElemId> tuples;
    res.total = backtracking_structure_search(
        G, b, vo,
        [&](std::span<const ElemId> t) {
          if (!opts.count_only) tuples.insert(tuples.end(), t.begin(), t.end());
          if (opts.sink) opts.sink(t);
        },
        opts.first_k);
    res.tuples = std::move(tuples);
    return res;
  }
  if (G.order > 256)
    throw std::invalid_argument("find_structures: order above 256 unsupported");

  if (G.order <= 64) return run_b2_search<1>(G, opts);
  if (G.order <= 128) return run_b2_search<2>(G, opts);
  if (G.order <= 192) return run_b2_search<3>(G, opts);
  return run_b2_search<4>(G, opts);
}

uint64_t find_prestructures(const FiniteGroup& G, int threads,
                            const std::function<void(std::span<const ElemId>)>& sink,
                            long long first_k) {
  if (G.order > 256)
    throw std::invalid_argument("find_prestructures: order above 256 unsupported");
  if (G.order <= 64) return run_prestructure_count<1>(G, threads, sink, first_k);
  if (G.order <= 128) return run_prestructure_count<2>(G, threads, sink, first_k);
  if (G.order <= 192) return run_prestructure_count<3>(G, threads, sink, first_k);
  return run_prestructure_count<4>(G, threads, sink, first_k);
}

std::vector<std::vector<ElemId>> sample_structures_per_shard(const FiniteGroup& G,
                                                             size_t max_count) {
  if (G.order > 256)
    throw std::invalid_argument("sample_structures_per_shard: order above 256 unsupported");
  if (G.order <= 64) return run_shard_sampling<1>(G, max_count);
  if (G.order <= 128) return run_shard_sampling<2>(G, max_count);
  if (G.order <= 192) return run_shard_sampling<3>(G, max_count);
  return run_shard_sampling<4>(G, max_count);
}

uint64_t backtracking_structure_search(
    const FiniteGroup& G, int b, const VerifyOptions& opts,
    const std::function<void(std::span<const ElemId>)>& sink, long long first_k) {
  const int nsym = 4 * b + 1;
  RelationSet rs = generate_structure_relations(b);

  // Assignment order: z, then the second row, then the first row; each
  // relation fires at the step where its last symbol gets a value.
  std::vector<int> order;
  order.push_back(sym_z(b));
  for (int j = 1; j <= b; ++j) {
    order.push_back(sym_rho(2, j, b));
    order.push_back(sym_tau(2, j, b));
  }
  for (int j = 1; j <= b; ++j) {
    order.push_back(sym_rho(1, j, b));
    order.push_back(sym_tau(1, j, b));
  }

  std::vector<int> step_of_symbol(nsym);
  for (int s = 0; s < nsym; ++s) step_of_symbol[order[s]] = s;

  std::vector<std::vector<const StructureRelation*>> fires(nsym);
  for (const auto& rel : rs.relations) {
    if (!opts.check_surface && rel.kind == StructureRelation::Kind::Surface) continue;
    int last = 0;
    auto scan = [&](const Word& w) {
      for (auto& [g, e] : w.syms) last = std::max(last, step_of_symbol[g]);
    };
    scan(rel.lhs);
    scan(rel.rhs);
    fires[last].push_back(&rel);
  }

  std::vector<ElemId> t(nsym, -1);
  uint64_t count = 0;

  auto rec = [&](auto&& self, int step) -> bool {
    if (step == nsym) {
      if (opts.require_generation &&
          subgroup_generated(G, t).count() != G.order)
        return false;
      ++count;
      if (sink) sink(t);
      return first_k >= 0 && count >= static_cast<uint64_t>(first_k);
    }
    int symbol = order[step];
    for (ElemId g = 0; g < G.order; ++g) {
      if (symbol == sym_z(b)) {
        int o = G.order_of(g);
        if (opts.n > 0 ? o != opts.n : o < 2) continue;
      }
      t[symbol] = g;
      bool ok = true;
      for (const StructureRelation* rel : fires[step]) {
        if (evaluate_word(G, t, rel->lhs) != evaluate_word(G, t, rel->rhs)) {
          ok = false;
          break;
        }
      }
      if (ok && self(self, step + 1)) return true;
    }
    t[symbol] = -1;
    return false;
  };
  rec(rec, 0);
  return count;
}

// ---------------------------------------------------------------------------
// Lifting along quotient maps
// ---------------------------------------------------------------------------

std::vector<Lift> lift_structures(const FiniteGroup& G, const SubgroupSet& N,
                                  std::span<const ElemId> projection,
                                  std::span<const ElemId> base, int b) {
  if (!is_normal(G, N)) throw std::invalid_argument("lift_structures: N not normal");
  if (static_cast<int>(projection.size()) != G.order)
    throw std::invalid_argument("lift_structures: projection size mismatch");
  if (projection[kIdentity] != 0)
    throw std::invalid_argument("lift_structures: projection must send identity to 0");

  // Reconstruct the quotient table from the projection and validate it.
  int q = 0;
  for (ElemId g = 0; g < G.order; ++g) q = std::max(q, projection[g] + 1);
  std::vector<ElemId> rep(q, -1);
  for (ElemId g = 0; g < G.order; ++g)
    if (rep[projection[g]] < 0) rep[projection[g]] = g;
  std::vector<ElemId> qtab(static_cast<size_t>(q) * q);
  for (int a = 0; a < q; ++a)
    for (int bq = 0; bq < q; ++bq)
      qtab[static_cast<size_t>(a) * q + bq] = projection[G.mul(rep[a], rep[bq])];
  FiniteGroup Q = group_from_table(q, std::move(qtab));
  for (ElemId a = 0; a < G.order; ++a)
    for (ElemId bg = 0; bg < G.order; ++bg)
      if (projection[G.mul(a, bg)] != Q.mul(projection[a], projection[bg]))
        throw std::invalid_argument("lift_structures: projection is not a homomorphism");
  if (N.count() * q != G.order)
    throw std::invalid_argument("lift_structures: N is not the kernel of the projection");

  const int nsym = 4 * b + 1;
  if (static_cast<int>(base.size()) != nsym)
    throw std::invalid_argument("lift_structures: base tuple has wrong length");
  {
    VerifyOptions vo;
    vo.check_surface = true;
    vo.require_generation = true;
    vo.n = 0;
    auto bad = verify_structure(Q, base, b, vo);
    if (!bad.empty())
      throw std::invalid_argument("lift_structures: base invalid: " + bad.front());
  }

  std::vector<std::vector<ElemId>> pre(nsym);
  for (int i = 0; i < nsym; ++i)
    for (ElemId g = 0; g < G.order; ++g)
      if (projection[g] == base[i]) pre[i].push_back(g);

  std::vector<Lift> out;
  std::vector<ElemId> t(nsym);
  auto rec = [&](auto&& self, int slot) -> void {
    if (slot == nsym) {
      VerifyOptions vo;
      vo.check_surface = true;
      vo.require_generation = false;
      vo.n = 0;
      if (!verify_structure(G, t, b, vo).empty()) return;
      Lift lf;
      lf.entries = t;
      lf.n = G.order_of(t[sym_z(b)]);
      lf.generates = subgroup_generated(G, t).count() == G.order;
      out.push_back(std::move(lf));
      return;
    }
    for (ElemId g : pre[slot]) {
      t[slot] = g;
      self(self, slot + 1);
    }
  };
  rec(rec, 0);
  return out;
}

uint64_t count_orbits(uint64_t total, size_t aut_count) {
  if (aut_count == 0) throw std::invalid_argument("count_orbits: empty automorphism list");
  if (total % aut_count != 0)
    throw std::logic_error("count_orbits: total " + std::to_string(total) +
                           " not divisible by |Aut| = " + std::to_string(aut_count));
  return total / aut_count;
}

bool stabilizer_is_trivial(std::span<const ElemId> tuple,
                           const std::vector<Automorphism>& auts) {
  for (const Automorphism& phi : auts) {
    bool fixes = true;
    bool is_id = true;
    for (size_t i = 0; i < tuple.size() && fixes; ++i)
      fixes = phi.perm[tuple[i]] == tuple[i];
    for (size_t g = 0; g < phi.perm.size() && is_id; ++g)
      is_id = phi.perm[g] == static_cast<ElemId>(g);
    if (fixes && !is_id) return false;
  }
  return true;
}

}  // namespace kodaira
