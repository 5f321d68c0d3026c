#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wdrw/algebra.hpp"
#include "wdrw/weight.hpp"

using namespace wdrw;

namespace {
WeightFn w_of(std::uint32_t p, std::vector<std::pair<std::uint64_t, std::uint32_t>> vals) {
  WeightFn a(p, (std::uint32_t)vals.size());
  for (std::uint32_t i = 0; i < vals.size(); ++i) a.entries[i] = PadicFrac(vals[i].first, vals[i].second, p);
  return a;
}
}  // namespace

TEST_CASE("support order") {
  auto a = w_of(2, {{1, 0}, {2, 0}});
  CHECK(a.order_less(0, 1));  // v_2(1)=0 < v_2(2)=1
  auto b = w_of(2, {{2, 0}, {1, 0}});
  CHECK(b.order_less(1, 0));
  auto c = w_of(2, {{3, 0}, {5, 0}});
  CHECK(c.order_less(0, 1));  // equal valuations, index tie-break
  CHECK_THROWS_AS(w_of(2, {{0, 0}, {1, 0}}).order_less(0, 1), IndexOutsideSupport);

  // total order on the support of random weights
  for (std::uint64_t n1 = 0; n1 < 4; ++n1)
    for (std::uint64_t n2 = 0; n2 < 4; ++n2)
      for (std::uint32_t d2 = 0; d2 < 2; ++d2) {
        auto w = w_of(2, {{n1, 0}, {n2, d2}, {1, 1}});
        auto s = w.support_sorted();
        for (std::size_t i = 0; i + 1 < s.size(); ++i) CHECK(w.order_less(s[i], s[i + 1]));
        CHECK(s.size() == w.support().size());
        if (!s.empty()) CHECK(w.min_index() == s[0]);
      }
}

TEST_CASE("segments partition the support") {
  {
    BasicDiffKey k(w_of(2, {{1, 0}, {1, 0}}), {1});
    auto seg = k.segments();
    REQUIRE(seg.size() == 2);
    CHECK(seg[0] == std::vector<std::uint32_t>{0});
    CHECK(seg[1] == std::vector<std::uint32_t>{1});
  }
  {
    BasicDiffKey k(w_of(2, {{1, 1}}), {0});
    auto seg = k.segments();
    CHECK(seg[0].empty());
    CHECK(seg[1] == std::vector<std::uint32_t>{0});
    CHECK(k.i0_empty());
  }
  {
    BasicDiffKey k(w_of(2, {{1, 0}, {2, 0}, {4, 0}}), {0});
    auto seg = k.segments();
    CHECK(seg[0].empty());
    CHECK(seg[1] == std::vector<std::uint32_t>{0, 1, 2});
  }
  // recombination reproduces Supp(a)
  for (std::uint64_t n1 = 1; n1 < 5; ++n1) {
    auto w = w_of(3, {{n1, 0}, {2, 1}, {1, 0}});
    for (auto& I : {std::vector<std::uint32_t>{}, {0}, {0, 1}, {0, 1, 2}}) {
      BasicDiffKey k(w, I);
      std::vector<std::uint32_t> all;
      for (auto& s : k.segments()) all.insert(all.end(), s.begin(), s.end());
      std::sort(all.begin(), all.end());
      CHECK(all == w.support());
    }
  }
}

TEST_CASE("coefficient modulus") {
  RingContext c(2, 1, 3);
  BasicDiffKey integral(w_of(2, {{1, 0}}), {});
  CHECK(coeff_modulus(integral, 3) == 3);
  BasicDiffKey frac2(w_of(2, {{1, 2}}), {});
  CHECK(coeff_modulus(frac2, 3) == 1);
  BasicDiffKey frac4(w_of(2, {{1, 4}}), {});
  CHECK(coeff_modulus(frac4, 3) == 0);
  CHECK(make_e(0, frac4, c).is_zero());
  CHECK_THROWS_AS(make_e(2, frac2, c), CoefficientOutOfRange);
}

TEST_CASE("make_e matches Witt-side constructions") {
  RingContext c(2, 1, 3);
  auto X = PolyFp::variable(2, 1, 0);
  // e(1, chi_{1}, {}) is the Teichmuller [X]
  DrwElement tx = make_e(1, BasicDiffKey(w_of(2, {{1, 0}}), {}), c);
  CHECK(to_witt(tx) == WittVec::teichmuller(c, X));
  // e(1, (1/2), {}) = V([X])
  DrwElement vx = make_e(1, BasicDiffKey(w_of(2, {{1, 1}}), {}), c);
  CHECK(to_witt(vx) == WittVec::teichmuller(c.with_len(2), X).verschiebung());
  // e(1, (1/2), {1}) = d(V([X]))
  DrwElement dvx = make_e(1, BasicDiffKey(w_of(2, {{1, 1}}), {0}), c);
  CHECK(dvx == vx.differential());
}

TEST_CASE("H and G enumerations") {
  RingContext c(2, 2, 3);
  CHECK(enumerate_H(1, c).size() == 2);
  CHECK(enumerate_H(0, c).size() == 1);
  CHECK(enumerate_H(2, c).size() == 1);
  for (std::uint32_t t = 0; t <= 2; ++t)
    CHECK(enumerate_H(t, RingContext(2, 2, 1)).size() == (t == 1 ? 2u : 1u));

  RingContext c1(2, 1, 3);
  auto g0 = enumerate_G(0, c1, 1, 1);
  REQUIRE(g0.size() == 1);
  CHECK(g0[0] == BasicDiffKey(w_of(2, {{1, 1}}), {}));
  CHECK(enumerate_G(-1, c, 3, 8).empty());

  // the generator-family side conditions hold for every emitted key
  RingContext c2(3, 2, 3);
  auto gs = enumerate_G(1, c2, 2, 6);
  CHECK(!gs.empty());
  for (auto& k : gs) {
    std::uint32_t u = k.weight.u();
    CHECK(u >= 1);
    CHECK(!k.i0_empty());            // min of the weight is outside the partition
    CHECK(k.degree() == 1);
    // entries are either fractional of depth <= u or integral of value 1 (the J-part)
    for (auto& e : k.weight.entries) {
      if (e.is_zero()) continue;
      if (e.is_integral()) CHECK(e.num == 1);
      else {
        // a_i < p^u for the fractional block
        CHECK(e.num < pow_u64(3, u) * 1.0);
        CHECK(e.pden <= u);
      }
    }
  }
  // duplicate-freeness
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = i + 1; j < gs.size(); ++j) CHECK(!(gs[i] == gs[j]));
}

TEST_CASE("rebar cages") {
  auto perfect = RebarCage::perfect(2);
  CHECK(perfect.labels(0, 0).size() == 1);
  CHECK(perfect.labels(3, 0).size() == 1);
  CHECK(perfect.labels(1, 1).empty());
  CHECK(perfect.labels(0, 2).empty());

  auto laurent = RebarCage::laurent(2);
  CHECK(laurent.labels(2, 0).size() == 4);          // T^0..T^3
  CHECK(laurent.labels(1, 1).size() == 4 - 2);      // i < 4, 2 !| i
  CHECK(laurent.labels(2, 2).size() == 16 - 4);     // i < 16, 4 !| i
  auto l21 = laurent.labels(2, 1);
  for (auto i : l21) CHECK(i % 2 != 0);
}
