#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wdrw/algebra.hpp"

using namespace wdrw;

namespace {
WeightFn w_of(std::uint32_t p, std::vector<std::pair<std::uint64_t, std::uint32_t>> vals) {
  WeightFn a(p, (std::uint32_t)vals.size());
  for (std::uint32_t i = 0; i < vals.size(); ++i) a.entries[i] = PadicFrac(vals[i].first, vals[i].second, p);
  return a;
}

std::uint32_t vp_residue(std::uint64_t c, std::uint32_t p) {
  std::uint32_t v = 0;
  while (c && c % p == 0) {
    c /= p;
    ++v;
  }
  return v;
}

// expansion of a rewriting as an exact element at level m
DrwElement expand_rewrite(const std::vector<RewriteTerm>& rw, const RingContext& c, std::uint32_t u) {
  DrwElement acc(c, rw.empty() ? 0 : rw.front().key.degree());
  for (auto& rt : rw) {
    if (rt.coeff == 0) continue;
    DrwElement e(c, rt.key.degree());
    e.add_term(rt.key, 1);
    Expo scaled = rt.cofactor;
    for (auto& x : scaled) x *= (std::uint32_t)pow_u64(c.p, u);
    DrwElement tw = teichmuller_elem(c, PolyFp::monomial(c.p, scaled));
    acc = acc + multiply(tw, e).scaled(rt.coeff);
  }
  return acc;
}
}  // namespace

TEST_CASE("mod-p rewriting: already reduced inputs") {
  RingContext c(2, 2, 3);
  auto rw = rewrite_mod_p(1, w_of(2, {{1, 0}, {1, 0}}), {1}, 1, c);
  REQUIRE(rw.size() == 1);  // binom(#Supp-1, #L) = 1
  CHECK(rw[0].coeff == 1);
  CHECK(expo_total(rw[0].cofactor) == 0);
  CHECK(rw[0].key == BasicDiffKey(w_of(2, {{1, 0}, {1, 0}}), {1}));
}

TEST_CASE("mod-p rewriting: reduction and oracle expansion") {
  RingContext c(2, 2, 3);
  struct Case {
    WeightFn b;
    std::vector<std::uint32_t> L;
    std::uint32_t u;
  };
  std::vector<Case> cases = {
      {w_of(2, {{3, 0}, {1, 0}}), {1}, 1},
      {w_of(2, {{3, 0}, {2, 0}}), {1}, 1},
      {w_of(2, {{5, 0}, {2, 0}}), {1}, 1},
      {w_of(2, {{4, 0}, {1, 0}}), {0}, 1},
      {w_of(2, {{5, 0}, {3, 0}}), {1}, 2},
  };
  for (auto& cs : cases) {
    auto rw = rewrite_mod_p(1, cs.b, cs.L, cs.u, c);
    // Chu-Vandermonde count
    std::uint64_t s = cs.b.support().size();
    std::uint64_t expect = (s >= 1 && cs.L.size() <= s - 1) ? [&] {
      std::uint64_t r = 1;
      for (std::uint64_t i = 0; i < cs.L.size(); ++i) r = r * (s - 1 - i) / (i + 1);
      return r;
    }() : 0;
    CHECK(rw.size() == expect);
    for (auto& rt : rw) {
      // b = a + p^u c and the reducedness conditions
      for (std::uint32_t i = 0; i < c.n; ++i) {
        std::uint64_t ai = rt.key.weight.entries[i].num;
        CHECK(ai <= pow_u64(2, cs.u));
        CHECK(ai + pow_u64(2, cs.u) * rt.cofactor[i] == cs.b.entries[i].num);
        if (ai == pow_u64(2, cs.u))
          CHECK(std::find(rt.key.parts.begin(), rt.key.parts.end(), i) != rt.key.parts.end());
      }
      CHECK(!rt.key.i0_empty());
      CHECK(rt.key.parts.size() == cs.L.size());
    }
    // oracle expansion reproduces e(1,b,L) mod p
    DrwElement target(c, (std::uint32_t)cs.L.size());
    target.add_term(BasicDiffKey(cs.b, cs.L), 1);
    DrwElement diff = expand_rewrite(rw, c, cs.u) - target;
    CHECK(diff.divisible_by_p());
  }
}

TEST_CASE("rewriting precondition checks") {
  RingContext c(2, 1, 2);
  // L containing the order-minimum makes L_0 empty
  CHECK_THROWS_AS(rewrite_mod_p(1, w_of(2, {{1, 0}}), {0}, 1, c), PreconditionViolated);
  CHECK_THROWS_AS(rewrite_mod_p(1, w_of(2, {{2, 0}}), {}, 1, c), PreconditionViolated);  // v_p(b) != 0
  CHECK_THROWS_AS(rewrite_mod_p(1, w_of(2, {{1, 0}}), {}, 0, c), PreconditionViolated);  // u = 0
}

TEST_CASE("kernel basis mod p") {
  {
    RingContext c(2, 1, 1);
    auto kb = kernel_basis_mod_p(0, 1, c, 2);
    CHECK(kb.h_part.empty());
    REQUIRE(kb.g_part.size() == 1);
    CHECK(kb.g_part[0] == BasicDiffKey(w_of(2, {{1, 1}}), {}));
    CHECK(kb.dg_part.empty());
  }
  {
    RingContext c(2, 2, 1);
    auto kb = kernel_basis_mod_p(1, 0, c, 4);
    CHECK(kb.h_part.size() == 2);  // d[X1], d[X2]
    CHECK(kb.g_part.empty());
  }
  // H-part empty for every m >= 1 over the perfect cage
  for (std::uint32_t m : {1u, 2u}) {
    RingContext c(3, 2, m);
    auto kb = kernel_basis_mod_p(1, m, c, 4);
    CHECK(kb.h_part.empty());
    for (auto& k : kb.g_part) CHECK(k.weight.u() == m);
    for (auto& k : kb.dg_part) CHECK(k.weight.u() == m);
  }
}

TEST_CASE("kernel basis spans the kernel slice (rank check)") {
  // weight-homogeneous rank comparison at p=2, n=2, t=1, m=1, |a| <= 3
  RingContext c(2, 2, 2);  // level m+1 = 2
  std::uint32_t m = 1, t = 1;
  auto kb = kernel_basis_mod_p(t, m, c, 4);
  // brute-force kernel slice keys: u(a) = m, #I = t, |a| <= 3
  std::map<BasicDiffKey, std::size_t, KeyLess> slot;
  std::vector<BasicDiffKey> slice;
  for (std::uint64_t n1 = 0; n1 <= 6; ++n1)
    for (std::uint64_t n2 = 0; n2 <= 6; ++n2) {
      WeightFn a(2, 2);
      a.entries[0] = PadicFrac(n1, 1, 2);
      a.entries[1] = PadicFrac(n2, 1, 2);
      if (a.u() != m) continue;
      if (cmp(a.total(), mpq_class(3)) > 0) continue;
      auto supp = a.support();
      std::vector<std::vector<std::uint32_t>> subs;
      detail::subsets_of_size(2, t, supp, subs);
      for (auto& I : subs) {
        BasicDiffKey k(a, I);
        slot.emplace(k, slot.size());
        slice.push_back(k);
      }
    }
  // spanning vectors: [X^c] g for g in g_part, d([X^c] g') for g' in dg_part
  std::vector<std::vector<std::uint8_t>> rows;
  auto push_vec = [&](const DrwElement& x) {
    std::vector<std::uint8_t> v(slot.size(), 0);
    for (auto& [k, coeff] : x.terms) {
      auto it = slot.find(k);
      if (it == slot.end()) {
        if (cmp(k.weight.total(), mpq_class(3)) <= 0) REQUIRE(false);
        return;  // exceeds the degree bound; skip this generator
      }
      v[it->second] = (std::uint8_t)(coeff % 2);
    }
    rows.push_back(std::move(v));
  };
  for (auto& g : kb.g_part)
    for (std::uint32_t c1 = 0; c1 <= 3; ++c1)
      for (std::uint32_t c2 = 0; c2 <= 3; ++c2) {
        DrwElement e(c, t);
        e.add_term(g, 1);
        DrwElement tw = multiply(teichmuller_elem(c, PolyFp::monomial(2, {c1, c2})), e);
        if (cmp(g.weight.total() + c1 + c2, mpq_class(3)) > 0) continue;
        push_vec(tw);
      }
  for (auto& g : kb.dg_part)
    for (std::uint32_t c1 = 0; c1 <= 3; ++c1)
      for (std::uint32_t c2 = 0; c2 <= 3; ++c2) {
        DrwElement e(c, t - 1);
        e.add_term(g, 1);
        DrwElement tw = multiply(teichmuller_elem(c, PolyFp::monomial(2, {c1, c2})), e).differential();
        if (cmp(g.weight.total() + c1 + c2, mpq_class(3)) > 0) continue;
        push_vec(tw);
      }
  // rank over F_2
  std::size_t rank = 0;
  std::vector<std::vector<std::uint8_t>> basis;
  for (auto v : rows) {
    for (auto& b : basis) {
      std::size_t lead = std::find_if(b.begin(), b.end(), [](std::uint8_t x) { return x != 0; }) - b.begin();
      if (lead < v.size() && v[lead]) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] ^= b[i];
      }
    }
    if (std::any_of(v.begin(), v.end(), [](std::uint8_t x) { return x != 0; })) {
      basis.push_back(v);
      std::sort(basis.begin(), basis.end(), [](auto& a, auto& b) { return a > b; });
      ++rank;
    }
  }
  CHECK(rank == slice.size());
}

TEST_CASE("kernel certification: generating polynomial relations") {
  RingContext c(2, 2, 3);
  // fractional class: (c,L) with u(c) = m = 1
  std::vector<std::pair<WeightFn, std::vector<std::uint32_t>>> cases = {
      {w_of(2, {{3, 1}, {1, 0}}), {1}},
      {w_of(2, {{5, 1}, {3, 1}}), {1}},
      {w_of(2, {{1, 1}, {2, 0}}), {}},
  };
  for (auto& [cw, L] : cases) {
    BasicDiffKey ck(cw, L);
    if (ck.i0_empty() && !L.empty()) continue;
    auto cert = kernel_certify(ck, 1, c);
    CHECK(!cert.empty());
    // homogeneity is asserted inside; re-check the expansion mod p
    RingContext clev(2, 2, 2);
    DrwElement target(clev, ck.degree());
    target.add_term(ck, 1);
    DrwElement acc(clev, ck.degree());
    for (auto& [gkey, P] : cert) {
      DrwElement e(clev, ck.degree());
      e.add_term(gkey, 1);
      acc = acc + teich_twist(P, e);
    }
    CHECK((acc - target).divisible_by_p());
  }
  // integral class at m = 0 expands over the H basis in Omega
  BasicDiffKey ik(w_of(2, {{2, 0}, {1, 0}}), {1});
  auto cert = kernel_certify(ik, 0, c);
  CHECK(!cert.empty());
  for (auto& [hkey, P] : cert) CHECK(hkey.weight.is_integral());
}

TEST_CASE("rebar cage index bookkeeping") {
  RingContext c(2, 2, 3);
  // perfect cage: family sizes match kernel_basis_mod_p
  for (std::uint32_t t : {0u, 1u})
    for (std::uint32_t m : {1u, 2u}) {
      auto fam = kernel_index_family(t, m, c, RebarCage::perfect(2), 3);
      auto kb = kernel_basis_mod_p(t, m, c, 3);
      CHECK(fam.h_part.empty());
      // perfect cage keeps only u = m (B(u, m-u) = {1} iff m-u = 0)
      CHECK(fam.g_part.size() == kb.g_part.size());
      CHECK(fam.dg_part.size() == kb.dg_part.size());
      for (auto& [u, key, b] : fam.g_part) {
        CHECK(u == m);
        CHECK(b == 0);
      }
    }
  // Laurent cage: label multiplicities p^u resp. p^(u+m') - p^u
  auto perfect = kernel_index_family(1, 2, c, RebarCage::perfect(2), 2);
  auto laurent = kernel_index_family(1, 2, c, RebarCage::laurent(2), 2);
  std::size_t expected = 0;
  for (std::uint32_t u = 1; u <= 2; ++u) {
    std::size_t keys = 0;
    for (auto& k : enumerate_G(1, c, u, 2 * pow_u64(2, u)))
      if (k.weight.u() == u && cmp(k.weight.total(), mpq_class(2)) <= 0) ++keys;
    expected += keys * RebarCage::laurent(2).labels(u, 2 - u).size();
  }
  CHECK(laurent.g_part.size() == expected);
  CHECK(laurent.g_part.size() > perfect.g_part.size());
}

TEST_CASE("product support and divisibility (zpcombination shape)") {
  std::mt19937 rng(41);
  RingContext c(2, 2, 3);
  std::vector<BasicDiffKey> keys = {
      BasicDiffKey(w_of(2, {{1, 1}, {0, 0}}), {}),       // u=1, I0 != empty
      BasicDiffKey(w_of(2, {{1, 1}, {1, 0}}), {1}),      // u=1
      BasicDiffKey(w_of(2, {{1, 0}, {1, 0}}), {1}),      // u=0
      BasicDiffKey(w_of(2, {{3, 0}, {0, 0}}), {0}),      // u=0
  };
  for (auto& ka : keys)
    for (auto& kb : keys) {
      std::uint32_t ua = ka.weight.u(), ub = kb.weight.u();
      if (ua < ub) continue;
      if (ua != 0 && ka.i0_empty()) continue;
      if (ka.degree() + kb.degree() > 2) continue;
      DrwElement x(c, ka.degree()), y(c, kb.degree());
      x.add_term(ka, 1);
      y.add_term(kb, 1);
      DrwElement prod = multiply(x, y);
      WeightFn sum = ka.weight + kb.weight;
      std::uint32_t v = kb.i0_empty() ? 0 : ub;
      for (auto& [k, coeff] : prod.terms) {
        CHECK(k.weight == sum);
        CHECK(k.degree() == ka.degree() + kb.degree());
        if (k.i0_empty()) {
          std::uint32_t need = v + ka.weight.u();  // v + (u(a)-u(a+b)) + u(a+b)
          std::uint32_t modexp = coeff_modulus(k, c.m);
          CHECK(vp_residue(coeff, 2) >= std::min(need, modexp));
        }
      }
    }
}

TEST_CASE("functorially induced maps") {
  RingContext src(2, 1, 3), dst(2, 1, 3);
  auto Y3 = PolyFp::variable(2, 1, 0, 3);
  std::vector<PolyFp> images = {Y3};

  DrwElement tX = make_e(1, BasicDiffKey(w_of(2, {{1, 0}}), {}), src);
  CHECK(induced_map(images, tX, dst) == make_e(1, BasicDiffKey(w_of(2, {{3, 0}}), {}), dst));

  // phi(d[X]) = d[Y^3], phi(V[X]) = V([Y^3])
  CHECK(induced_map(images, tX.differential(), dst) ==
        make_e(1, BasicDiffKey(w_of(2, {{3, 0}}), {}), dst).differential());
  DrwElement vX = make_e(1, BasicDiffKey(w_of(2, {{1, 1}}), {}), src);
  CHECK(to_witt(induced_map(images, vX, dst)) ==
        WittVec::teichmuller(dst.with_len(2), Y3).verschiebung());

  // identity map is the identity; phi commutes with d and products
  std::mt19937 rng(43);
  std::vector<PolyFp> idimg = {PolyFp::variable(2, 1, 0)};
  RingContext c2(2, 2, 2), d2(2, 1, 2);
  std::vector<PolyFp> img2 = {PolyFp::variable(2, 1, 0),
                              PolyFp::variable(2, 1, 0) + PolyFp::constant(2, 1, 1)};
  for (int it = 0; it < 12; ++it) {
    std::uniform_int_distribution<std::uint32_t> dn(0, 2), dd(0, 1);
    DrwElement x(c2, 0);
    for (int k = 0; k < 2; ++k) {
      WeightFn a(2, 2);
      for (auto& e : a.entries) e = PadicFrac(dn(rng), dd(rng), 2);
      BasicDiffKey key(a, {});
      if (coeff_modulus(key, 2) == 0) continue;
      x.add_term(key, 1 + (it % (pow_u64(2, coeff_modulus(key, 2)) - 1)));
    }
    DrwElement fx = induced_map(img2, x, d2);
    CHECK(induced_map(img2, x.differential(), d2) == fx.differential());
    DrwElement y(c2, 0);
    y.add_term(BasicDiffKey(w_of(2, {{1, 0}, {1, 0}}), {}), 1);
    CHECK(induced_map(img2, multiply(x, y), d2) == multiply(fx, induced_map(img2, y, d2)));
  }
}
