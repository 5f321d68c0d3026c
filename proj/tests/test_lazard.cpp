#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wdrw/lazard.hpp"

using namespace wdrw;

namespace {
FrobLift perturbed2(std::uint32_t m = 3, std::uint32_t N = 6) {
  // p = 2, F(X) = X^2 + 2X
  RingContext c(2, 1, m);
  return FrobLift::from_deltas(c, N, {PolyZ::variable(1, 0)});
}

PolyZ random_liftpoly(std::mt19937& rng, std::uint32_t n, std::uint32_t maxdeg, std::uint32_t maxc) {
  PolyZ f(n);
  std::uniform_int_distribution<std::uint32_t> de(0, maxdeg), dc(0, maxc), dt(1, 3);
  for (std::uint32_t k = dt(rng); k; --k) {
    Expo e(n, 0);
    for (auto& x : e) x = de(rng);
    f.add_term(std::move(e), dc(rng));
  }
  return f;
}
}  // namespace

TEST_CASE("lift application") {
  RingContext c(2, 1, 3);
  FrobLift can = FrobLift::canonical(c, 5);
  CHECK(can.apply(PolyZ::variable(1, 0, 3)) == PolyZ::variable(1, 0, 6));

  FrobLift F = perturbed2();
  PolyZ X = PolyZ::variable(1, 0);
  CHECK(F.apply(X * X) == (X * X + X.scaled(2)) * (X * X + X.scaled(2)));
  // delta-ring condition: apply == p-power Frobenius mod p
  std::mt19937 rng(3);
  for (int it = 0; it < 20; ++it) {
    PolyZ P = random_liftpoly(rng, 1, 4, 7);
    CHECK((F.apply(P) - P.pow(2)).mod_p(2).is_zero());
  }
  // a non-lift is rejected
  CHECK_THROWS_AS(FrobLift(c, 5, {PolyZ::variable(1, 0)}), NonIntegralGhost);
}

TEST_CASE("t_F on the canonical lift is Teichmuller") {
  RingContext c(2, 2, 3);
  FrobLift can = FrobLift::canonical(c, 5);
  for (auto e : {Expo{1, 0}, Expo{2, 1}, Expo{0, 3}}) {
    WittVec t = t_F(can, PolyZ::monomial(e), 3);
    CHECK(t == WittVec::teichmuller(RingContext(2, 2, 3), PolyFp::monomial(2, e)));
  }
  // constants map to the Witt vectors of integers
  for (long z : {0L, 1L, 2L, 5L}) {
    WittVec t = t_F(can, PolyZ::constant(2, z), 3);
    CHECK(t == WittVec::from_integer(RingContext(2, 2, 3), z));
  }
}

TEST_CASE("worked perturbed lift value") {
  FrobLift F = perturbed2();
  WittVec t = t_F(F, PolyZ::variable(1, 0), 3);
  auto X = PolyFp::variable(2, 1, 0);
  CHECK(t.coords[0] == X);
  CHECK(t.coords[1] == X);
  CHECK(t.coords[2] == X.pow(3) + X.pow(2) + X);
  // v_F(X) = (0, X, X^3+X^2+X)
  WittVec v = v_F(F, PolyZ::variable(1, 0), 3);
  CHECK(v.coords[0].is_zero());
  CHECK(v.coords[1] == X);
  CHECK(v.coords[2] == X.pow(3) + X.pow(2) + X);
}

TEST_CASE("t_F is a ring morphism with ghost components F^u(P)") {
  std::mt19937 rng(11);
  FrobLift F = perturbed2();
  for (int it = 0; it < 15; ++it) {
    PolyZ P = random_liftpoly(rng, 1, 3, 5), Q = random_liftpoly(rng, 1, 3, 5);
    CHECK(t_F(F, P + Q, 3) == t_F(F, P, 3) + t_F(F, Q, 3));
    CHECK(t_F(F, P * Q, 3) == t_F(F, P, 3) * t_F(F, Q, 3));
    // ghost_u(s_F(P)) = F^u(P)
    auto coords = s_F(F, P, 3);
    auto g = ghost(coords, 2);
    PolyZ cur = P;
    for (std::uint32_t u = 0; u < 3; ++u) {
      CHECK(g[u] == cur);
      cur = F.apply(cur);
    }
  }
}

TEST_CASE("t_F on forms") {
  RingContext c(2, 1, 3);
  FrobLift can = FrobLift::canonical(c, 5);
  PolyZ X = PolyZ::variable(1, 0);
  // t_Frob~(dX) = d[X]
  DrwElement dX = t_F_forms(can, FormalForm::monomial_form(PolyZ::constant(1, 1), {X}), 3);
  CHECK(dX == teichmuller_elem(c, PolyFp::variable(2, 1, 0)).differential());

  // Leibniz transported: t_F(d(PQ)) = t_F(P dQ) + t_F(Q dP)
  std::mt19937 rng(17);
  FrobLift F = perturbed2();
  for (int it = 0; it < 10; ++it) {
    PolyZ P = random_liftpoly(rng, 1, 2, 3), Q = random_liftpoly(rng, 1, 2, 3);
    DrwElement lhs = t_F_forms(F, FormalForm::monomial_form(PolyZ::constant(1, 1), {P * Q}), 3);
    DrwElement rhs = t_F_forms(F, FormalForm::monomial_form(P, {Q}), 3) +
                     t_F_forms(F, FormalForm::monomial_form(Q, {P}), 3);
    CHECK(lhs == rhs);
  }
  // t_F commutes with d on scalars
  for (int it = 0; it < 10; ++it) {
    PolyZ P = random_liftpoly(rng, 1, 3, 3);
    CHECK(t_F_forms(F, FormalForm::scalar(P), 3).differential() ==
          t_F_forms(F, FormalForm::monomial_form(PolyZ::constant(1, 1), {P}), 3));
  }
}

TEST_CASE("mod p, t_F_forms is the identity on Omega") {
  // project t_F(X^a dX_J) to W_1 Omega = Omega and compare with [X^a] prod d[X_j]
  std::mt19937 rng(23);
  RingContext c1(2, 2, 1);
  FrobLift F(RingContext(2, 2, 3), 6,
             {PolyZ::variable(2, 0).pow(2) + PolyZ::variable(2, 1).scaled(2), PolyZ::variable(2, 1).pow(2)});
  for (std::uint32_t a1 = 0; a1 <= 2; ++a1)
    for (std::uint32_t a2 = 0; a2 <= 2; ++a2)
      for (int which : {0, 1, 2}) {
        std::vector<PolyZ> dqs;
        if (which == 0) dqs = {PolyZ::variable(2, 0)};
        if (which == 1) dqs = {PolyZ::variable(2, 1)};
        if (which == 2) dqs = {PolyZ::variable(2, 0), PolyZ::variable(2, 1)};
        auto omega = FormalForm::monomial_form(PolyZ::monomial({a1, a2}), dqs);
        DrwElement img = t_F_forms(F, omega, 3).truncated(1);
        DrwElement expect = teichmuller_elem(c1, PolyFp::monomial(2, {a1, a2}));
        for (auto& q : dqs) expect = multiply(expect, teichmuller_elem(c1, q.mod_p(2)).differential());
        CHECK(img == expect);
      }
}

TEST_CASE("v_F membership and product formula") {
  FrobLift F = perturbed2();
  FrobLift can = FrobLift::canonical(F.ctx, F.precision);
  CHECK(v_F(can, PolyZ::variable(1, 0).pow(4), 3).is_zero());

  std::mt19937 rng(29);
  for (int it = 0; it < 15; ++it) {
    PolyZ P = random_liftpoly(rng, 1, 3, 5);
    WittVec v = v_F(F, P, 3);
    CHECK(v.coords[0].is_zero());  // lands in V(W)
  }
  // product formula v_F(xy) = v_F(x)v_F(y) + t~(x)v_F(y) + v_F(x)t~(y)
  RingContext c2(2, 2, 3);
  FrobLift F2(c2, 6, {PolyZ::variable(2, 0).pow(2) + PolyZ::variable(2, 0).scaled(2), PolyZ::variable(2, 1).pow(2)});
  FrobLift can2 = FrobLift::canonical(c2, 6);
  PolyZ X = PolyZ::variable(2, 0), Y = PolyZ::variable(2, 1);
  WittVec lhs = v_F(F2, X * Y, 3);
  WittVec rhs = v_F(F2, X, 3) * v_F(F2, Y, 3) + t_F(can2, X, 3) * v_F(F2, Y, 3) +
                v_F(F2, X, 3) * t_F(can2, Y, 3);
  CHECK(lhs == rhs);
  for (int it = 0; it < 10; ++it) {
    PolyZ P = random_liftpoly(rng, 2, 2, 3), Q = random_liftpoly(rng, 2, 2, 3);
    WittVec l = v_F(F2, P * Q, 3);
    WittVec r = v_F(F2, P, 3) * v_F(F2, Q, 3) + t_F(can2, P, 3) * v_F(F2, Q, 3) +
                v_F(F2, P, 3) * t_F(can2, Q, 3);
    CHECK(l == r);
  }
  // form-valued v_F lands in Fil^1
  for (int it = 0; it < 8; ++it) {
    PolyZ P = random_liftpoly(rng, 1, 3, 5), Q = random_liftpoly(rng, 1, 3, 5);
    DrwElement v = v_F_forms(F, FormalForm::monomial_form(P, {Q}), 3);
    CHECK(v.in_fil(1));
  }
}

TEST_CASE("span of t_Frob~ monomial forms is the bounded integral slice") {
  // weight-homogeneous: for each integral weight a, |a| <= 4, and t <= 1 the
  // square system expressing e(1,a,I) in the t_Frob~(X^(a-chi_J) dX_J) solves
  // over Z/p^m.
  RingContext c(2, 2, 2);
  FrobLift can = FrobLift::canonical(c, 5);
  std::uint64_t pm = pow_u64(2, 2);
  for (std::uint32_t t : {0u, 1u}) {
    for (std::uint32_t a1 = 0; a1 <= 4; ++a1)
      for (std::uint32_t a2 = 0; a2 + a1 <= 4; ++a2) {
        WeightFn a = WeightFn::from_expo(2, {a1, a2});
        auto supp = a.support();
        if (supp.size() < t) continue;
        // candidates: J subset of {i : a_i >= 1}, #J = t
        std::vector<std::vector<std::uint32_t>> Js;
        detail::subsets_of_size(2, t, supp, Js);
        // targets: all partitions I of a with #I = t
        std::vector<std::vector<std::uint32_t>> Is = Js;
        std::map<BasicDiffKey, std::size_t, KeyLess> slot;
        std::vector<std::vector<std::uint64_t>> cols;
        for (auto& J : Js) {
          Expo e = {a1, a2};
          for (auto j : J) e[j] -= 1;
          std::vector<PolyZ> dqs;
          for (auto j : J) dqs.push_back(PolyZ::variable(2, j));
          DrwElement img = t_F_forms(can, FormalForm::monomial_form(PolyZ::monomial(e), dqs), 2);
          std::vector<std::uint64_t> col;
          for (auto& [k, coeff] : img.terms) {
            auto [it2, fresh] = slot.emplace(k, slot.size());
            if (fresh)
              for (auto& cc : cols) cc.resize(slot.size(), 0);
            col.resize(slot.size(), 0);
            col[it2->second] = coeff;
          }
          col.resize(slot.size(), 0);
          cols.push_back(std::move(col));
          for (auto& cc : cols) cc.resize(slot.size(), 0);
        }
        for (auto& I : Is) {
          BasicDiffKey key(a, I);
          if (coeff_modulus(key, 2) == 0) continue;
          std::vector<std::uint64_t> rhs(slot.size(), 0);
          auto it2 = slot.find(key);
          REQUIRE(it2 != slot.end());
          rhs[it2->second] = 1;
          // assemble row-major matrix
          std::vector<std::vector<std::uint64_t>> A(slot.size(), std::vector<std::uint64_t>(cols.size(), 0));
          for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t r = 0; r < cols[j].size(); ++r) A[r][j] = cols[j][r];
          auto sol = solve_mod_pk(A, rhs, 2, 2);
          CHECK(sol.has_value());
          (void)pm;
        }
      }
  }
}

TEST_CASE("estimated v_F bounds") {
  // canonical lift: v_F = 0, bounds hold at any epsilon
  RingContext c(2, 1, 3);
  FrobLift can = FrobLift::canonical(c, 6);
  std::vector<mpq_class> grid = {mpq_class(1), mpq_class(1, 2), mpq_class(1, 4)};
  std::vector<mpq_class> b = {1};
  auto est0 = estimate_v_F(can, 3, grid, b, mpq_class(1, 2), 4, {PolyZ::variable(1, 0)});
  CHECK(est0.found);
  CHECK(est0.delta == mpq_class(1));

  FrobLift F = perturbed2(3, 6);
  std::vector<PolyZ> samples = {PolyZ::variable(1, 0), PolyZ::variable(1, 0).pow(2),
                                PolyZ::variable(1, 0) + PolyZ::constant(1, 1)};
  std::vector<mpq_class> grid2 = {mpq_class(2), mpq_class(1), mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8),
                                  mpq_class(1, 16)};
  auto est = estimate_v_F(F, 3, grid2, b, mpq_class(1, 2), 8, samples);
  CHECK(est.found);
  // the reported delta certifies the bounds on the sample set
  WittVec vfx = v_F(F, PolyZ::variable(1, 0).pow(5), 3);
  mpq_class rhs = mpq_class(1, 2) - est.delta * 5;
  CHECK(gamma_id(vfx, est.delta, b).value >= XReal(rhs));
}
