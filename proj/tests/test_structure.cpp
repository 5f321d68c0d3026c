#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wdrw/format.hpp"

using namespace wdrw;

namespace {

// F_2[X][Y]/(Y^2 - Y - X) with basis (1, Y); relatively perfect over F_2[X].
EtalePresentation artin_schreier(std::uint32_t model = 1) {
  EtalePresentation pres;
  pres.p = 2;
  pres.n = 1;
  pres.localizer = PolyFp::constant(2, 1, 1);
  pres.rank = 2;
  LocRing R = LocRing::plain(2, 1);
  pres.alg.base = R;
  pres.alg.rank = 2;
  auto X = R.from_poly(PolyFp::variable(2, 1, 0));
  auto zero = R.zero(), one = R.one();
  pres.alg.table.assign(2, std::vector<std::vector<LocPoly>>(2, std::vector<LocPoly>(2, zero)));
  pres.alg.table[0][0] = {one, zero};
  pres.alg.table[0][1] = {zero, one};
  pres.alg.table[1][0] = {zero, one};
  pres.alg.table[1][1] = {X, one};  // Y^2 = X + Y
  if (model) {
    // S ~ F_2[W]: X -> W^2 + W, Z_0 -> 1, Z_1 -> W
    pres.model_n = 1;
    auto W = PolyFp::variable(2, 1, 0);
    pres.model_images = {W.pow(2) + W, PolyFp::constant(2, 1, 1), W};
  }
  return pres;
}

EtalePresentation trivial_ext() {
  EtalePresentation pres;
  pres.p = 2;
  pres.n = 1;
  pres.localizer = PolyFp::constant(2, 1, 1);
  pres.rank = 1;
  pres.alg.base = LocRing::plain(2, 1);
  pres.alg.rank = 1;
  pres.alg.table.assign(1, std::vector<std::vector<LocPoly>>(1, std::vector<LocPoly>(1, pres.alg.base.one())));
  pres.model_n = 1;
  pres.model_images = {PolyFp::variable(2, 1, 0), PolyFp::constant(2, 1, 1)};
  return pres;
}  // trivial extension: T-variables (X, Z_0)

EtalePresentation nilpotent_ext(std::uint32_t p = 2) {
  // F_p[X, Z]/(Z^p), basis (1, Z, .., Z^(p-1)); not relatively perfect
  EtalePresentation pres;
  pres.p = p;
  pres.n = 1;
  pres.localizer = PolyFp::constant(p, 1, 1);
  pres.rank = p;
  LocRing R = LocRing::plain(p, 1);
  pres.alg.base = R;
  pres.alg.rank = p;
  pres.alg.table.assign(p, std::vector<std::vector<LocPoly>>(p, std::vector<LocPoly>(p, R.zero())));
  for (std::uint32_t i = 0; i < p; ++i)
    for (std::uint32_t j = 0; j < p; ++j) {
      if (i + j < p) pres.alg.table[i][j][i + j] = R.one();
    }
  return pres;
}

GenWitt<TableAlgebra> random_alg_witt(std::mt19937& rng, const EtalePresentation& pres, std::uint32_t m,
                                      std::uint32_t maxdeg = 2) {
  const TableAlgebra& A = pres.alg;
  GenWitt<TableAlgebra> w = GenWitt<TableAlgebra>::zero(A, m);
  std::uniform_int_distribution<std::uint32_t> dc(0, pres.p - 1), de(0, maxdeg), dt(0, 2);
  for (std::uint32_t u = 0; u < m; ++u) {
    TableAlgebra::Elem x = A.zero();
    for (std::uint32_t i = 0; i < pres.rank; ++i) {
      PolyFp f(pres.p, pres.n);
      for (std::uint32_t k = dt(rng); k; --k) f.add_term({de(rng)}, dc(rng));
      x[i] = A.base.from_poly(f);
    }
    w.coords[u] = x;
  }
  return w;
}

WeightFn w_of(std::uint32_t p, std::vector<std::pair<std::uint64_t, std::uint32_t>> vals) {
  WeightFn a(p, (std::uint32_t)vals.size());
  for (std::uint32_t i = 0; i < vals.size(); ++i) a.entries[i] = PadicFrac(vals[i].first, vals[i].second, p);
  return a;
}

DrwElement random_elem(std::mt19937& rng, const RingContext& c, std::uint32_t t) {
  DrwElement x(c, t);
  std::uniform_int_distribution<std::uint32_t> dn(0, 2), dd(0, 1);
  for (int k = 0; k < 2; ++k) {
    WeightFn a(c.p, c.n);
    for (auto& e : a.entries) e = PadicFrac(dn(rng), dd(rng), c.p);
    auto supp = a.support();
    if (supp.size() < t) continue;
    std::shuffle(supp.begin(), supp.end(), rng);
    BasicDiffKey key(a, {supp.begin(), supp.begin() + t});
    std::uint32_t mod = coeff_modulus(key, c.m);
    if (mod == 0) continue;
    std::uniform_int_distribution<std::uint64_t> dc(1, pow_u64(c.p, mod) - 1);
    x.add_term(key, dc(rng));
  }
  return x;
}

}  // namespace

TEST_CASE("relative perfectness checks") {
  auto as = artin_schreier();
  auto chk = check_relatively_perfect(as);
  REQUIRE(chk.ok);
  // U0 = [[1,0],[X,1]]
  const LocRing& R = as.alg.base;
  CHECK(R.eq(chk.u0[0][0], R.one()));
  CHECK(R.eq(chk.u0[0][1], R.zero()));
  CHECK(R.eq(chk.u0[1][0], R.from_poly(PolyFp::variable(2, 1, 0))));
  CHECK(R.eq(chk.u0[1][1], R.one()));

  auto triv = check_relatively_perfect(trivial_ext());
  REQUIRE(triv.ok);
  CHECK(triv.u0.size() == 1);

  auto nil = check_relatively_perfect(nilpotent_ext(2));
  CHECK(!nil.ok);
  auto nil3 = check_relatively_perfect(nilpotent_ext(3));
  CHECK(!nil3.ok);
}

TEST_CASE("Witt basis decomposition over Artin-Schreier") {
  auto pres = artin_schreier();
  const TableAlgebra& A = pres.alg;
  std::uint32_t m = 3;

  // [Y] decomposes as (0, 1)
  auto r = witt_basis_decompose(GenWitt<TableAlgebra>::teichmuller(A, m, A.basis(1)), pres);
  CHECK(gw_vV(A.base, r[0]) == std::nullopt);
  CHECK(A.base.eq(r[1].coords[0], A.base.one()));
  CHECK(A.base.is_zero(r[1].coords[1]));

  // V([Y]): level-1 solve gives first coordinates (X, 1)
  auto vy = gw_verschiebung(A, GenWitt<TableAlgebra>::teichmuller(A, m - 1, A.basis(1)));
  auto rv = witt_basis_decompose(vy, pres);
  CHECK(A.base.is_zero(rv[0].coords[0]));
  CHECK(A.base.eq(rv[0].coords[1], A.base.from_poly(PolyFp::variable(2, 1, 0))));
  CHECK(A.base.eq(rv[1].coords[1], A.base.one()));

  // round trips, V-divisibility equivalence, zero => zero
  std::mt19937 rng(7);
  for (int it = 0; it < 25; ++it) {
    auto w = random_alg_witt(rng, pres, m);
    auto rs = witt_basis_decompose(w, pres);
    CHECK(gw_sub(A, 2, witt_basis_recompose(rs, pres, m), w).is_zero(A));
    std::uint32_t wd = gw_vV(A, w).value_or(m);
    std::uint32_t rd = m;
    for (auto& ri : rs) rd = std::min(rd, gw_vV(A.base, ri).value_or(m));
    CHECK(wd == rd);  // w in V^u iff all r(i) in V^u
  }
  auto zero = witt_basis_decompose(GenWitt<TableAlgebra>::zero(A, m), pres);
  for (auto& ri : zero) CHECK(gw_vV(A.base, ri) == std::nullopt);

  CHECK_THROWS_AS(
      witt_basis_decompose(GenWitt<TableAlgebra>::zero(nilpotent_ext(2).alg, 2), nilpotent_ext(2)),
      NotRelativelyPerfect);
}

TEST_CASE("polynomial overconvergent Witt decomposition") {
  RingContext c(2, 1, 3);
  FrobLift F = FrobLift::canonical(c, 5);
  auto X = PolyFp::variable(2, 1, 0);

  auto h1 = overconv_witt_decompose_poly(WittVec::teichmuller(c, X), F);
  REQUIRE(h1.size() == 1);
  CHECK(h1.begin()->first.is_zero());
  CHECK(h1.begin()->second == PolyZ::variable(1, 0));

  auto h2 = overconv_witt_decompose_poly(WittVec::teichmuller(c.with_len(2), X).verschiebung(), F);
  REQUIRE(h2.size() == 1);
  CHECK(h2.begin()->first == w_of(2, {{1, 1}}));
  CHECK(h2.begin()->second == PolyZ::constant(1, 1));

  std::mt19937 rng(13);
  for (int it = 0; it < 25; ++it) {
    RingContext cc(it % 2 ? 2 : 3, 2, 3);
    FrobLift FF = it % 3 == 0 ? FrobLift::from_deltas(cc, 5, {PolyZ::variable(2, 0), PolyZ(2)})
                              : FrobLift::canonical(cc, 5);
    std::vector<PolyFp> coords;
    std::uniform_int_distribution<std::uint32_t> dc(0, cc.p - 1), de(0, 2);
    for (std::uint32_t u = 0; u < cc.m; ++u) {
      PolyFp f(cc.p, 2);
      for (int k = 0; k < 2; ++k) f.add_term({de(rng), de(rng)}, dc(rng));
      coords.push_back(f);
    }
    WittVec w(cc, coords);
    auto h = overconv_witt_decompose_poly(w, FF);
    CHECK(overconv_witt_recompose_poly(h, FF, cc) == w);
    // divisibility pattern after forcing depth l
    for (std::uint32_t l : {1u, 2u}) {
      WittVec wl = w.truncated(cc.m - l);
      for (std::uint32_t s = 0; s < l; ++s) wl = wl.verschiebung();
      auto hl = overconv_witt_decompose_poly(wl, FF);
      for (auto& [a, ha] : hl) {
        std::uint32_t need = l > a.u() ? l - a.u() : 0;
        mpz_class pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), cc.p, need);
        for (auto& [e, coeff] : ha.terms) CHECK(mpz_divisible_p(coeff.get_mpz_t(), pk.get_mpz_t()));
      }
    }
  }
}

TEST_CASE("etale overconvergent Witt decomposition") {
  auto pres = artin_schreier();
  const TableAlgebra& A = pres.alg;
  std::uint32_t m = 2;
  std::vector<mpq_class> grid = {mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8)};

  // [Y]: recomposition is checked internally; inspect the output shape
  auto d1 = overconv_witt_decompose(GenWitt<TableAlgebra>::teichmuller(A, m, A.basis(1)), pres, m,
                                    mpq_class(1, 4), grid);
  CHECK(!d1.h.empty());
  CHECK(d1.cert.certified);

  std::mt19937 rng(31);
  for (int it = 0; it < 10; ++it) {
    auto w = random_alg_witt(rng, pres, m);
    auto dec = overconv_witt_decompose(w, pres, m, mpq_class(1, 4), grid);
    // division-by-p-sum divisibility pattern
    std::uint32_t u = dec.input_depth;
    for (auto& [a, ha] : dec.h) {
      std::uint32_t need = u > a.u() ? u - a.u() : 0;
      mpz_class pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), 2, need);
      for (auto& [e, coeff] : ha.terms) CHECK(mpz_divisible_p(coeff.get_mpz_t(), pk.get_mpz_t()));
    }
    // certificate re-verifies
    if (dec.cert.certified) {
      std::vector<mpq_class> b(pres.n_T(), 1);
      std::vector<PolyFp> wpre;
      for (auto& cc2 : w.coords) wpre.push_back(pres.preimage(cc2));
      GammaResult low = gamma_presented(wpre, dec.cert.eps, b, 2);
      CHECK(!low.exact);
      RingContext cT = pres.ctx_T(m);
      FrobLift F = pres.lift(m);
      for (auto& [a, ha] : dec.h) {
        std::uint32_t ua = a.u();
        Expo frac(cT.n, 0);
        for (std::uint32_t i = 0; i < cT.n; ++i) frac[i] = (std::uint32_t)a.entries[i].mul_p(2, ua).num;
        WittVec e = WittVec::teichmuller(cT.with_len(m - ua), PolyFp::monomial(2, frac));
        for (std::uint32_t s2 = 0; s2 < ua; ++s2) e = e.verschiebung();
        CHECK(gamma_id(t_F(F, ha, m) * e, dec.cert.eps, b).value >= low.value + XReal(-mpq_class(1, 4)));
      }
    }
  }
}

TEST_CASE("polynomial-ring structure decomposition") {
  RingContext c(2, 1, 3);
  FrobLift can = FrobLift::canonical(c, 6);

  // d[X]: s = 1 on H(1)
  DrwElement dX = teichmuller_elem(c, PolyFp::variable(2, 1, 0)).differential();
  auto r1 = poly_structure_decompose(dX, can, 3);
  REQUIRE(r1.h_coeff.size() == 1);
  CHECK(r1.h_coeff.begin()->second == PolyZ::constant(1, 1));
  CHECK(r1.g_coeff.empty());
  CHECK(r1.dg_coeff.empty());
  CHECK(recompose(r1, can) == dX);

  // V[X] with the canonical lift: s = 1 on e(1,(1/2),0) in G(0)
  DrwElement vX = make_e(1, BasicDiffKey(w_of(2, {{1, 1}}), {}), c);
  auto r2 = poly_structure_decompose(vX, can, 3);
  CHECK(r2.h_coeff.empty());
  REQUIRE(r2.g_coeff.size() == 1);
  CHECK(r2.g_coeff.begin()->first == BasicDiffKey(w_of(2, {{1, 1}}), {}));
  CHECK(r2.g_coeff.begin()->second == PolyZ::constant(1, 1));
  CHECK(recompose(r2, can) == vX);

  // the worked perturbed-lift example: t_F(X) has s = X on the trivial H(0) key
  FrobLift F = FrobLift::from_deltas(c, 6, {PolyZ::variable(1, 0)});
  DrwElement tfx = from_witt(t_F(F, PolyZ::variable(1, 0), 3));
  auto r3 = poly_structure_decompose(tfx, F, 3);
  REQUIRE(r3.h_coeff.size() == 1);
  CHECK(r3.h_coeff.begin()->second == PolyZ::variable(1, 0));
  CHECK(r3.g_coeff.empty());
  CHECK(recompose(r3, F) == tfx);

  // random round trips; zero maps to zero
  std::mt19937 rng(17);
  for (int it = 0; it < 20; ++it) {
    RingContext cc(it % 2 ? 2 : 3, 2, it % 3 == 0 ? 3 : 2);
    FrobLift FF = it % 2 ? FrobLift::from_deltas(cc, 6, {PolyZ::variable(2, 1), PolyZ(2)})
                         : FrobLift::canonical(cc, 6);
    DrwElement x = random_elem(rng, cc, it % 3 == 2 ? 1 : (it % 3));
    auto res = poly_structure_decompose(x, FF, cc.m);
    CHECK(recompose(res, FF) == x);
  }
  auto rz = poly_structure_decompose(DrwElement::zero(c, 1), can, 3);
  CHECK(rz.trivial());
}

TEST_CASE("divisibility and Fil criteria of the structure decomposition") {
  std::mt19937 rng(23);
  RingContext c(2, 2, 3);
  FrobLift F = FrobLift::from_deltas(c, 6, {PolyZ::variable(2, 0), PolyZ(2)});
  auto divides_all = [&](const DecompositionResult& res, std::uint32_t l) {
    mpz_class pl;
    mpz_ui_pow_ui(pl.get_mpz_t(), 2, l);
    auto chk = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, bool fil, std::uint32_t u0) {
      for (auto& [k, s] : mp) {
        std::uint32_t need = fil ? (l > k.weight.u() ? l - k.weight.u() : 0) : l;
        std::uint32_t kmod = fil ? coeff_modulus(k, res.level) : res.level;
        need = std::min(need, kmod);
        mpz_class pn;
        mpz_ui_pow_ui(pn.get_mpz_t(), 2, need);
        for (auto& [e, coeff] : s.terms)
          if (!mpz_divisible_p(coeff.get_mpz_t(), pn.get_mpz_t())) return false;
      }
      (void)u0;
      return true;
    };
    return chk(res.h_coeff, false, 0) && chk(res.g_coeff, false, 0) && chk(res.dg_coeff, false, 0);
  };
  for (int it = 0; it < 12; ++it) {
    DrwElement x = random_elem(rng, c, it % 2);
    if (x.is_zero()) continue;
    // p^l | x  iff  p^l | all s(e)
    DrwElement px = x.scaled(2);
    auto rx = poly_structure_decompose(px, F, c.m);
    CHECK(divides_all(rx, 1));
    // Fil^u criterion: V-image lies in Fil^1 and its s(e) obey the clamped divisibility
    DrwElement vx = x.verschiebung_op().truncated(c.m);
    CHECK(vx.in_fil(1));
    auto rv = poly_structure_decompose(vx, F, c.m);
    auto fil_ok = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, std::uint32_t ufil) {
      for (auto& [k, s] : mp) {
        std::uint32_t need = ufil > k.weight.u() ? ufil - k.weight.u() : 0;
        need = std::min(need, coeff_modulus(k, c.m));
        mpz_class pn;
        mpz_ui_pow_ui(pn.get_mpz_t(), 2, need);
        for (auto& [e, coeff] : s.terms)
          if (!mpz_divisible_p(coeff.get_mpz_t(), pn.get_mpz_t())) return false;
      }
      return true;
    };
    CHECK(fil_ok(rv.h_coeff, 1));
    CHECK(fil_ok(rv.g_coeff, 1));
    CHECK(fil_ok(rv.dg_coeff, 1));
  }
}

TEST_CASE("etale structure decomposition over Artin-Schreier") {
  auto pres = artin_schreier();
  std::uint32_t m = 2;
  RingContext cT = pres.ctx_T(m);
  FrobLift F = pres.lift(m);

  // image of d[X]: s = 1 on d[X] in H(1)
  DrwElement dX = teichmuller_elem(cT, PolyFp::variable(2, cT.n, 0)).differential();
  auto r1 = etale_structure_decompose(dX, pres, m, mpq_class(1, 4));
  REQUIRE(r1.h_coeff.size() == 1);
  CHECK(r1.h_coeff.begin()->second == PolyZ::constant(cT.n, 1));
  CHECK(r1.g_coeff.empty());

  // d of the Y-class (the Z variable): decomposes through H(1)/G(0)
  DrwElement dZ = teichmuller_elem(cT, PolyFp::variable(2, cT.n, pres.z_slot(1))).differential();
  auto r2 = etale_structure_decompose(dZ, pres, m, mpq_class(1, 4));
  CHECK(!r2.trivial());
  // recomposition through W(phi) is verified inside; also re-check here
  DrwElement re = recompose(r2, F);
  CHECK(induced_map(pres.model_images, re, pres.ctx_model(m)) ==
        induced_map(pres.model_images, dZ, pres.ctx_model(m)));

  // degree-0 sample and zero
  DrwElement tz = from_witt(t_F(F, PolyZ::variable(cT.n, pres.z_slot(1)), m));
  auto r3 = etale_structure_decompose(tz, pres, m, mpq_class(1, 4));
  CHECK(!r3.trivial());
  auto rz = etale_structure_decompose(DrwElement::zero(cT, 1), pres, m, mpq_class(1, 4));
  CHECK(rz.trivial());

  // certificates re-verify
  if (r2.cert.certified) {
    mpq_class eps = r2.cert.eps;
    XReal zx = zeta(dZ, eps);
    for (auto& [key, s] : r2.h_coeff) {
      DrwElement e(cT, 1);
      e.add_term(key, 1);
      CHECK(zeta(from_witt(t_F(F, s, m)), eps) >= XReal(zx.v - zeta(e, eps).v - mpq_class(1, 4)));
    }
  }
}

TEST_CASE("constants report") {
  auto triv = compute_constants(trivial_ext());
  CHECK(triv.C == 0);
  CHECK(triv.D == 0);
  CHECK(triv.E == 0);
  CHECK(triv.delta > 0);

  auto pres = artin_schreier();
  auto rep = compute_constants(pres);
  CHECK(rep.C == 2);   // max relation degree: X Z_0 + Z_1 from Y^2 = X + Y
  CHECK(rep.D == 1);   // U0 entry X has weighted valuation -1; D = 1/(p-1)
  CHECK(rep.E == 3);
  CHECK(rep.delta > 0);
  REQUIRE(rep.b.size() == 3);
  CHECK(rep.b[0] == 1);
  CHECK(rep.b[1] == 2);
  CHECK(rep.b[2] == 2);

  // certification: gamma(r(i)) >= gamma(sum r(i) s(i)) - eps E at eps <= delta
  std::uint32_t m = 3;
  std::mt19937 rng(41);
  std::vector<mpq_class> bxz = {rep.b[0], rep.b[1], rep.b[2]};
  for (int it = 0; it < 10; ++it) {
    auto w = random_alg_witt(rng, pres, m);
    auto rs = witt_basis_decompose(w, pres);
    std::vector<PolyFp> wpre;
    for (auto& cc : w.coords) wpre.push_back(pres.preimage(cc));
    for (mpq_class eps : std::vector<mpq_class>{rep.delta, mpq_class(rep.delta / 2)}) {
      GammaResult low = gamma_presented(wpre, eps, bxz, 2);
      for (std::uint32_t i = 0; i < pres.rank; ++i) {
        // r(i) lives over the plain base ring: evaluate gamma exactly
        std::vector<PolyFp> coords;
        for (auto& q : rs[i].coords) coords.push_back(q.num);
        WittVec ri(RingContext(2, 1, m), coords);
        CHECK(gamma_id(ri, eps, {rep.b[0]}).value >= low.value + XReal(-eps * rep.E));
      }
    }
  }
}

namespace {
// k[X]_<X>[Y]/(Y^2 - X) at p = 3: etale over the localized base, with
// genuine localizer denominators in U0.
EtalePresentation kummer3() {
  EtalePresentation pres;
  pres.p = 3;
  pres.n = 1;
  pres.localizer = PolyFp::variable(3, 1, 0);
  pres.rank = 2;
  LocRing R(3, 1, pres.localizer);
  pres.alg.base = R;
  pres.alg.rank = 2;
  auto X = R.from_poly(PolyFp::variable(3, 1, 0));
  pres.alg.table.assign(2, std::vector<std::vector<LocPoly>>(2, std::vector<LocPoly>(2, R.zero())));
  pres.alg.table[0][0] = {R.one(), R.zero()};
  pres.alg.table[0][1] = {R.zero(), R.one()};
  pres.alg.table[1][0] = {R.zero(), R.one()};
  pres.alg.table[1][1] = {X, R.zero()};  // Y^2 = X
  return pres;
}
}  // namespace

TEST_CASE("localized etale extension (Kummer at p = 3)") {
  auto pres = kummer3();
  CHECK(pres.has_localizer());
  CHECK(pres.n_T() == 4);  // X, Y (localizer slot), Z1, Z2
  auto chk = check_relatively_perfect(pres);
  REQUIRE(chk.ok);
  // U0 = diag(1, 1/X): the denominator block is real
  const LocRing& R = pres.alg.base;
  CHECK(R.eq(chk.u0[0][0], R.one()));
  CHECK(R.eq(chk.u0[1][1], LocPoly{PolyFp::constant(3, 1, 1), 1}));

  const TableAlgebra& A = pres.alg;
  std::uint32_t m = 2;
  std::mt19937 rng(77);
  // Witt basis decomposition with denominators
  for (int it = 0; it < 10; ++it) {
    GenWitt<TableAlgebra> w = GenWitt<TableAlgebra>::zero(A, m);
    std::uniform_int_distribution<std::uint32_t> de(0, 2), dc(0, 2), dd(0, 1);
    for (std::uint32_t u = 0; u < m; ++u)
      for (std::uint32_t i = 0; i < 2; ++i) {
        PolyFp f(3, 1);
        f.add_term({de(rng)}, dc(rng));
        w.coords[u][i] = R.normalize(LocPoly{f, dd(rng)});
      }
    auto rs = witt_basis_decompose(w, pres);
    CHECK(gw_sub(A, 3, witt_basis_recompose(rs, pres, m), w).is_zero(A));
  }
  // the overconvergent decomposition exercises the localizer-clearing branch
  std::vector<mpq_class> grid = {mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8)};
  for (int it = 0; it < 5; ++it) {
    GenWitt<TableAlgebra> w = GenWitt<TableAlgebra>::zero(A, m);
    std::uniform_int_distribution<std::uint32_t> de(0, 2), dc(0, 2), dd(0, 1);
    for (std::uint32_t u = 0; u < m; ++u)
      for (std::uint32_t i = 0; i < 2; ++i) {
        PolyFp f(3, 1);
        f.add_term({de(rng)}, dc(rng));
        w.coords[u][i] = R.normalize(LocPoly{f, dd(rng)});
      }
    auto dec = overconv_witt_decompose(w, pres, m, mpq_class(1, 4), grid);
    // exactness is verified inside; the h-keys live on the X-block only
    for (auto& [a, ha] : dec.h)
      for (std::uint32_t i = pres.n; i < pres.n_T(); ++i) CHECK(a.entries[i].is_zero());
  }
  // constants carry the localizer degree through the preimages
  auto rep = compute_constants(pres);
  CHECK(rep.delta > 0);
  CHECK(rep.b.size() == 4);
}

TEST_CASE("presentation file with a localizer") {
  std::string text =
      "# wdrw-format 1\n"
      "etale p=3 n=1 rank=2 P=X1\n"
      "mul s_1 s_1 = s_1\n"
      "mul s_1 s_2 = s_2\n"
      "mul s_2 s_2 = X1 s_1\n"
      "frob s_1 = s_1^p\n"
      "frob s_2 = /P s_2^p\n";
  EtalePresentation pres = parse_presentation_file(text);
  CHECK(pres.has_localizer());
  auto chk = check_relatively_perfect(pres);
  CHECK(chk.ok);
}

TEST_CASE("compatible lifts are checked, not solved for") {
  auto pres = artin_schreier();
  std::uint32_t N = 2;
  RingContext cT = pres.ctx_T(N), cm(2, 1, N);
  // G(W) = W^2 + 2W^3 forces F(Z1) = Z1^2 + 2 Z1^3 through phi(Z1) = W,
  // and commutes with phi(X) = W^2 + W mod 4
  FrobLift FT = FrobLift::from_deltas(cT, N, {PolyZ(cT.n), PolyZ(cT.n), PolyZ::variable(cT.n, 2, 3)});
  FrobLift Ggood = FrobLift::from_deltas(cm, N, {PolyZ::variable(1, 0, 3)});
  CHECK(!check_compatible_lift(pres, FT, Ggood, N).has_value());
  // swapping in the canonical lift on either side breaks the commutation
  CHECK(check_compatible_lift(pres, FrobLift::canonical(cT, N), Ggood, N).has_value());
  CHECK(check_compatible_lift(pres, FT, FrobLift::canonical(cm, N), N).has_value());
  // the fully canonical pair does not commute either (phi(X) is not a p-th
  // power compatible choice mod 4)
  CHECK(check_compatible_lift(pres, FrobLift::canonical(cT, N), FrobLift::canonical(cm, N), N).has_value());
}

TEST_CASE("rank-1 Witt freeness matches the mod-p basis test") {
  // whencanitbewittfree converse: decompose succeeds on a spanning sample and
  // the mod-p check passes; the nilpotent algebra fails the check and the
  // decomposition refuses to run.
  auto pres = artin_schreier();
  CHECK(check_relatively_perfect(pres).ok);
  std::mt19937 rng(3);
  for (int it = 0; it < 5; ++it) {
    auto w = random_alg_witt(rng, pres, 2);
    CHECK_NOTHROW(witt_basis_decompose(w, pres));
  }
  auto nil = nilpotent_ext(2);
  CHECK(!check_relatively_perfect(nil).ok);
}
