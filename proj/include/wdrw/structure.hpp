#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wdrw/lazard.hpp"
#include "wdrw/tablering.hpp"
#include "wdrw/zpk_solve.hpp"

namespace wdrw {

struct WeightLess {
  bool operator()(const WeightFn& a, const WeightFn& b) const { return a.cmp(b) < 0; }
};

/// Finite free (relatively perfect) algebra over a localized polynomial
/// ring, with optional Frobenius-lift data on the presentation variables
/// and an optional polynomial model of the algebra used for exact equality
/// checks through W(phi).
///
/// Variable layout of the presentation ring k[T]: X_1..X_n, then Y (only
/// when the localizer is nontrivial; phi(Y) = P^{-1}), then Z_1..Z_r with
/// phi(Z_i) = s_i.
struct EtalePresentation {
  std::uint32_t p = 2, n = 1;
  PolyFp localizer;  // over the X-block
  std::uint32_t rank = 1;
  TableAlgebra alg;

  std::vector<PolyZ> lift_images;  // optional FrobLift images on k[T]; empty = canonical

  // optional polynomial model: S ~ F_p[W_1..W_model_n], with the images of
  // the presentation variables under phi composed with the model iso
  std::uint32_t model_n = 0;
  std::vector<PolyFp> model_images;  // one per T-variable; empty = no model

  bool has_localizer() const { return !(localizer == PolyFp::constant(p, n, 1)); }
  std::uint32_t y_slot() const { return n; }
  std::uint32_t z_slot(std::uint32_t i) const { return n + (has_localizer() ? 1 : 0) + i; }
  std::uint32_t n_T() const { return n + (has_localizer() ? 1 : 0) + rank; }
  bool has_model() const { return !model_images.empty(); }
  bool has_lift() const { return !lift_images.empty(); }

  RingContext ctx_T(std::uint32_t m) const { return RingContext(p, n_T(), m); }
  RingContext ctx_model(std::uint32_t m) const { return RingContext(p, model_n, m); }

  FrobLift lift(std::uint32_t m) const {
    RingContext c = ctx_T(m);
    if (!has_lift()) return FrobLift::canonical(c, std::max(m + 2, 4u));
    return FrobLift(c, std::max(m + 2, 4u), lift_images);
  }

  // phi on the presentation ring, valued in the table algebra
  TableAlgebra::Elem phi(const PolyFp& f) const {
    std::vector<TableAlgebra::Elem> imgs;
    for (std::uint32_t i = 0; i < n; ++i)
      imgs.push_back(alg.from_base(alg.base.from_poly(PolyFp::variable(p, n, i))));
    if (has_localizer()) imgs.push_back(alg.from_base(LocPoly{PolyFp::constant(p, n, 1), 1}));
    for (std::uint32_t i = 0; i < rank; ++i) imgs.push_back(alg.basis(i));
    return eval_poly_fp(alg, f, imgs);
  }
  GenWitt<TableAlgebra> phi_witt(const WittVec& w) const {
    GenWitt<TableAlgebra> r = GenWitt<TableAlgebra>::zero(alg, w.ctx.m);
    for (std::uint32_t u = 0; u < w.ctx.m; ++u) r.coords[u] = phi(w.coords[u]);
    return r;
  }

  // canonical preimage of a localized base element: num(X) Y^den
  PolyFp preimage_base(const LocPoly& q) const {
    PolyFp f(p, n_T());
    for (auto& [e, c] : q.num.terms) {
      Expo e2(n_T(), 0);
      for (std::uint32_t i = 0; i < n; ++i) e2[i] = e[i];
      if (q.den) {
        if (!has_localizer()) throw Error("preimage: denominator without localizer");
        e2[y_slot()] = q.den;
      }
      f.add_term(std::move(e2), c);
    }
    return f;
  }
  // canonical preimage of an algebra element: sum_i preimage(coords_i) Z_i
  PolyFp preimage(const TableAlgebra::Elem& x) const {
    PolyFp f(p, n_T());
    for (std::uint32_t i = 0; i < rank; ++i) {
      PolyFp zi = PolyFp::variable(p, n_T(), z_slot(i));
      f = f + preimage_base(x[i]) * zi;
    }
    return f;
  }
  WittVec preimage_witt(const GenWitt<TableAlgebra>& w, std::uint32_t m) const {
    std::vector<PolyFp> coords;
    for (std::uint32_t u = 0; u < m; ++u) coords.push_back(preimage(w.coords[u]));
    return WittVec(ctx_T(m), std::move(coords));
  }
};

struct PerfectnessCheck {
  bool ok = false;
  std::vector<std::vector<LocPoly>> u0;  // s_i = sum_j u0[i][j] s_j^p when ok
  std::string witness;
};

namespace detail {
inline LocPoly loc_det(const LocRing& R, const std::vector<std::vector<LocPoly>>& m) {
  std::size_t r = m.size();
  if (r == 1) return m[0][0];
  LocPoly acc = R.zero();
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<std::vector<LocPoly>> minor;
    for (std::size_t i = 1; i < r; ++i) {
      std::vector<LocPoly> row;
      for (std::size_t k = 0; k < r; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    LocPoly term = R.mul(m[0][j], loc_det(R, minor));
    acc = (j % 2 == 0) ? R.add(acc, term) : R.add(acc, R.neg(term));
  }
  return acc;
}

// unit of the localized ring iff the numerator is a nonzero constant times a
// power of the localizer
inline std::optional<LocPoly> loc_unit_inverse(const LocRing& R, const LocPoly& q) {
  PolyFp cur = q.num;
  std::uint32_t j = 0;
  PolyFp quo(R.p, R.n);
  if (!R.trivial_localizer())
    while (cur.divexact(R.P, quo)) {
      cur = quo;
      ++j;
    }
  if (cur.is_zero() || cur.degree() != 0) return std::nullopt;
  std::uint64_t c = cur.terms.begin()->second;
  std::uint64_t cinv = 1;
  for (std::uint64_t x = 1; x < R.p; ++x)
    if ((x * c) % R.p == 1) cinv = x;
  // inverse of (c P^j / P^den) is (1/c) P^den / P^j
  LocPoly inv{PolyFp::constant(R.p, R.n, cinv) * R.P.pow(q.den), j};
  return R.normalize(inv);
}
}  // namespace detail

/// Condition (3) of the relative-perfectness characterisation: (s_i^p) is a
/// basis.  Expresses each s_i in the span of the (s_j^p) via the table and
/// demands an invertible base-change matrix.
inline PerfectnessCheck check_relatively_perfect(const EtalePresentation& pres) {
  pres.alg.validate();
  const LocRing& R = pres.alg.base;
  std::uint32_t r = pres.rank;
  // M[i][j]: s_i^p in the basis
  std::vector<std::vector<LocPoly>> M;
  for (std::uint32_t i = 0; i < r; ++i) M.push_back(pres.alg.pow(pres.alg.basis(i), pres.p));
  LocPoly det = detail::loc_det(R, M);
  PerfectnessCheck out;
  auto inv = detail::loc_unit_inverse(R, det);
  if (!inv) {
    out.ok = false;
    out.witness = "det of the p-power matrix is not a unit in the localized ring";
    return out;
  }
  // adjugate
  std::vector<std::vector<LocPoly>> adj(r, std::vector<LocPoly>(r, R.zero()));
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) {
      std::vector<std::vector<LocPoly>> minor;
      for (std::uint32_t a = 0; a < r; ++a) {
        if (a == i) continue;
        std::vector<LocPoly> row;
        for (std::uint32_t b = 0; b < r; ++b)
          if (b != j) row.push_back(M[a][b]);
        minor.push_back(std::move(row));
      }
      LocPoly cof = (r == 1) ? R.one() : detail::loc_det(R, minor);
      if ((i + j) % 2) cof = R.neg(cof);
      adj[j][i] = cof;
    }
  out.u0.assign(r, std::vector<LocPoly>(r, R.zero()));
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) out.u0[i][j] = R.mul(adj[i][j], *inv);
  // verify U0 M = Id
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) {
      LocPoly s = R.zero();
      for (std::uint32_t k = 0; k < r; ++k) s = R.add(s, R.mul(out.u0[i][k], M[k][j]));
      if (!R.eq(s, i == j ? R.one() : R.zero())) {
        out.ok = false;
        out.witness = "U0 verification failed";
        return out;
      }
    }
  out.ok = true;
  return out;
}

/// Unique writing w = sum_i r(i) s(i) over a relatively perfect finite free
/// extension; level-by-level V-adic peeling.  The basis lifts default to the
/// Teichmuller lifts of the basis.
inline std::vector<GenWitt<LocRing>> witt_basis_decompose(
    const GenWitt<TableAlgebra>& w, const EtalePresentation& pres,
    const std::vector<GenWitt<TableAlgebra>>* basis_lifts = nullptr) {
  auto chk = check_relatively_perfect(pres);
  if (!chk.ok) throw NotRelativelyPerfect(chk.witness);
  const LocRing& R = pres.alg.base;
  const TableAlgebra& A = pres.alg;
  std::uint32_t r = pres.rank, m = w.m, p = pres.p;

  std::vector<GenWitt<TableAlgebra>> lifts;
  if (basis_lifts) {
    lifts = *basis_lifts;
  } else {
    for (std::uint32_t i = 0; i < r; ++i) lifts.push_back(GenWitt<TableAlgebra>::teichmuller(A, m, A.basis(i)));
  }

  // W_u = U0 U0^[p] ... U0^[p^(u-1)] inverts the matrix of the p^u-powers.
  std::vector<std::vector<std::vector<LocPoly>>> Winv(m + 1);
  Winv[0].assign(r, std::vector<LocPoly>(r, R.zero()));
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < r; ++j) Winv[0][i][j] = (i == j) ? R.one() : R.zero();
  std::vector<std::vector<LocPoly>> u0pow = chk.u0;  // U0^[p^u]
  for (std::uint32_t u = 1; u <= m; ++u) {
    Winv[u].assign(r, std::vector<LocPoly>(r, R.zero()));
    // Winv[u] = Winv[u-1] * U0^[p^(u-1)]  applied on the right
    std::vector<std::vector<LocPoly>> lhs = (u == 1) ? Winv[0] : Winv[u - 1];
    for (std::uint32_t i = 0; i < r; ++i)
      for (std::uint32_t j = 0; j < r; ++j) {
        LocPoly s = R.zero();
        for (std::uint32_t k = 0; k < r; ++k) s = R.add(s, R.mul(lhs[i][k], u0pow[k][j]));
        Winv[u][i][j] = s;
      }
    // advance U0^[p^u]
    for (auto& row : u0pow)
      for (auto& x : row) x = R.frob(x);
  }

  std::vector<GenWitt<LocRing>> out(r, GenWitt<LocRing>::zero(R, m));
  GenWitt<TableAlgebra> rem = w;
  for (std::uint32_t u = 0; u < m; ++u) {
    if (rem.is_zero(A)) break;
    if (gw_vV(A, rem).value_or(m) < u) throw NonIntegralResult("witt_basis_decompose: peeling drift");
    const TableAlgebra::Elem& xu = rem.coords[u];
    // rho = xu-row * Winv[u]
    std::vector<LocPoly> rho(r, R.zero());
    for (std::uint32_t i = 0; i < r; ++i) {
      LocPoly s = R.zero();
      for (std::uint32_t j = 0; j < r; ++j) s = R.add(s, R.mul(xu[j], Winv[u][j][i]));
      rho[i] = s;
    }
    // verify rho . (s^(p^u) matrix) reproduces xu
    TableAlgebra::Elem check = A.zero();
    for (std::uint32_t i = 0; i < r; ++i)
      check = A.add(check, A.scale(rho[i], A.pow(A.basis(i), pow_u64(p, u))));
    if (!A.eq(check, xu)) throw NonIntegralResult("witt_basis_decompose: solve failed");

    for (std::uint32_t i = 0; i < r; ++i) {
      GenWitt<LocRing> piece = GenWitt<LocRing>::teichmuller(R, m - u, rho[i]);
      for (std::uint32_t s2 = 0; s2 < u; ++s2) piece = gw_verschiebung(R, piece);
      out[i] = gw_add(R, p, out[i], piece);
      // embed into the algebra and subtract piece * s(i)
      GenWitt<TableAlgebra> alg_piece = GenWitt<TableAlgebra>::zero(A, m);
      for (std::uint32_t t = 0; t < m; ++t) alg_piece.coords[t] = A.from_base(piece.coords[t]);
      rem = gw_sub(A, p, rem, gw_mul(A, p, alg_piece, lifts[i]));
    }
  }
  if (!rem.is_zero(A)) throw NonIntegralResult("witt_basis_decompose: nonzero remainder");
  return out;
}

inline GenWitt<TableAlgebra> witt_basis_recompose(const std::vector<GenWitt<LocRing>>& rs,
                                                  const EtalePresentation& pres, std::uint32_t m,
                                                  const std::vector<GenWitt<TableAlgebra>>* basis_lifts = nullptr) {
  const TableAlgebra& A = pres.alg;
  GenWitt<TableAlgebra> acc = GenWitt<TableAlgebra>::zero(A, m);
  for (std::uint32_t i = 0; i < pres.rank; ++i) {
    GenWitt<TableAlgebra> lift_i =
        basis_lifts ? (*basis_lifts)[i] : GenWitt<TableAlgebra>::teichmuller(A, m, A.basis(i));
    GenWitt<TableAlgebra> alg_piece = GenWitt<TableAlgebra>::zero(A, m);
    for (std::uint32_t t = 0; t < m; ++t) alg_piece.coords[t] = A.from_base(rs[i].coords[t]);
    acc = gw_add(A, pres.p, acc, gw_mul(A, pres.p, alg_piece, lift_i));
  }
  return acc;
}

// Teichmuller-coefficient lift of a polynomial (the rho/sigma maps): each
// coefficient c goes to its Teichmuller representative mod p^k.
inline PolyZ teich_lift(const PolyFp& f, std::uint32_t k) {
  PolyZ r(f.n);
  for (auto& [e, c] : f.terms) {
    std::uint64_t t = teichmuller_residue(c, f.p, k);
    if (t) r.terms.emplace(e, mpz_class((unsigned long)t));
  }
  return r;
}

/// Certification block attached to decompositions: the largest grid epsilon
/// at which every recorded inequality verified, plus the evaluated bounds.
struct CertBlock {
  bool certified = false;
  mpq_class eps = 0;
  std::vector<std::string> notes;
};

/// Result of the main-theorem decompositions: coefficients indexed by
/// H(t) / G(t) / G(t-1) keys.  Coefficient polynomials are canonical mod
/// p^(level - u(key)).
struct DecompositionResult {
  RingContext ctx;  // ring the coefficients live over (X-block or T-block)
  std::uint32_t degree = 0;
  std::uint32_t level = 0;
  std::map<BasicDiffKey, PolyZ, KeyLess> h_coeff;
  std::map<BasicDiffKey, PolyZ, KeyLess> g_coeff;
  std::map<BasicDiffKey, PolyZ, KeyLess> dg_coeff;
  CertBlock cert;

  bool trivial() const { return h_coeff.empty() && g_coeff.empty() && dg_coeff.empty(); }
};

namespace detail {
// Omega-expansion of a level-1 element through the model: W_1 Omega^t is the
// free module on the dX_J, and X^b dlog_S = X^(b - chi_S) dX_S.
inline std::map<std::uint64_t, PolyFp> omega_expand(const DrwElement& x) {
  std::map<std::uint64_t, PolyFp> out;
  if (x.ctx.m != 1) throw LengthUnderflow("omega_expand wants a level-1 element");
  ModelForm f = embed(x);
  for (auto& [k, c] : f.terms) {
    Expo e(x.ctx.n, 0);
    for (std::uint32_t i = 0; i < x.ctx.n; ++i) {
      PadicFrac w = k.expo.entries[i];
      if (!w.is_integral()) throw NonIntegralResult("omega_expand: fractional exponent at level 1");
      e[i] = (std::uint32_t)w.num - (((k.dlog >> i) & 1) ? 1 : 0);
    }
    auto [it, fresh] = out.emplace(k.dlog, PolyFp(x.ctx.p, x.ctx.n));
    it->second.add_term(std::move(e), c.residue(x.ctx.p, 1));
  }
  return out;
}
}  // namespace detail

/// Structure decomposition over the polynomial ring (truncated): the mod-p
/// iteration — split off the Omega-part via t_F, rewrite the d-image and
/// pure fractional sectors in the G bases, subtract, divide by p.  A zeta
/// certificate (the inequality zeta(t_F(s_e)) >= zeta(x) - zeta(e) - eta at
/// the largest passing grid epsilon) is attached when a grid is supplied.
inline DecompositionResult poly_structure_decompose(const DrwElement& x, const FrobLift& F, std::uint32_t m,
                                                    const std::vector<mpq_class>& eps_grid = {},
                                                    const mpq_class& eta_tol = mpq_class(1, 4)) {
  if (x.ctx.m != m) throw ContextMismatch("poly_structure_decompose: element level != m");
  RingContext c = x.ctx;
  std::uint32_t t = x.degree;
  DecompositionResult res;
  res.ctx = c;
  res.degree = t;
  res.level = m;

  DrwElement y = x;
  for (std::uint32_t l = 0; l < m; ++l) {
    std::uint32_t mlev = m - l;
    if (y.is_zero()) break;
    mpz_class pl;
    mpz_ui_pow_ui(pl.get_mpz_t(), c.p, l);

    // H-step: the image in W_1 Omega^t = Omega^t
    auto omega = detail::omega_expand(y.truncated(1));
    for (auto& [mask, Q] : omega) {
      if (Q.is_zero()) continue;
      std::vector<std::uint32_t> J;
      for (std::uint32_t i = 0; i < c.n; ++i)
        if ((mask >> i) & 1) J.push_back(i);
      BasicDiffKey hkey(WeightFn::indicator(c.p, c.n, J), J);
      PolyZ piece = teich_lift(Q, m);
      auto [it, fresh] = res.h_coeff.emplace(hkey, PolyZ(c.n));
      it->second = (it->second + piece.scaled(pl)).mod_pk(c.p, m);
      std::vector<PolyZ> dqs;
      for (auto j : J) dqs.push_back(PolyZ::variable(c.n, j));
      y = y - t_F_forms(F, FormalForm::monomial_form(piece, dqs), mlev);
    }

    // dG-step: the I_0-empty fractional sector is d of a pure fractional
    // element, read off termwise and rewritten in the G(t-1) basis.
    auto rewrite_sector = [&](const DrwElement& sector) {
      // returns accumulated polynomial coefficients per G-key
      std::map<BasicDiffKey, PolyFp, KeyLess> twist;
      for (auto& [key, eta] : sector.terms) {
        std::uint32_t u = key.weight.u();
        auto rw = rewrite_mod_p(eta % c.p, key.weight.mul_p(u), key.parts, u, c);
        for (auto& rt : rw) {
          if (rt.coeff == 0) continue;
          WeightFn gw = rt.key.weight;
          for (std::uint32_t s = 0; s < u; ++s) gw = gw.div_p();
          BasicDiffKey gkey(gw, rt.key.parts);
          auto [it, fresh] = twist.emplace(gkey, PolyFp(c.p, c.n));
          it->second.add_term(rt.cofactor, rt.coeff);
        }
      }
      return twist;
    };

    DrwElement zsec(c.with_len(mlev), t >= 1 ? t - 1 : 0);
    if (t >= 1) {
      for (auto& [key, eta] : y.terms) {
        if (key.weight.u() == 0 || !key.i0_empty()) continue;
        if (eta % c.p == 0) continue;
        std::vector<std::uint32_t> I2;
        std::uint32_t mn = key.weight.min_index();
        for (auto i : key.parts)
          if (i != mn) I2.push_back(i);
        zsec.add_term(BasicDiffKey(key.weight, I2), eta % c.p);
      }
    }
    if (!zsec.is_zero()) {
      auto twist = rewrite_sector(zsec);
      DrwElement inner(c.with_len(mlev), t - 1);
      for (auto& [gkey, Q] : twist) {
        if (Q.is_zero()) continue;
        PolyZ piece = teich_lift(Q, m);
        auto [it, fresh] = res.dg_coeff.emplace(gkey, PolyZ(c.n));
        it->second = (it->second + piece.scaled(pl)).mod_pk(c.p, m);
        DrwElement e(c.with_len(mlev), t - 1);
        e.add_term(gkey, 1);
        inner = inner + multiply(from_witt(t_F(F, piece, mlev)), e);
      }
      y = y - inner.differential();
    }

    // G-step: pure fractional sector mod p
    DrwElement psec(c.with_len(mlev), t);
    for (auto& [key, eta] : y.terms) {
      if (key.weight.u() == 0 || key.i0_empty()) continue;
      if (eta % c.p == 0) continue;
      psec.add_term(key, eta % c.p);
    }
    if (!psec.is_zero()) {
      auto twist = rewrite_sector(psec);
      for (auto& [gkey, Q] : twist) {
        if (Q.is_zero()) continue;
        PolyZ piece = teich_lift(Q, m);
        auto [it, fresh] = res.g_coeff.emplace(gkey, PolyZ(c.n));
        it->second = (it->second + piece.scaled(pl)).mod_pk(c.p, m);
        DrwElement e(c.with_len(mlev), t);
        e.add_term(gkey, 1);
        y = y - multiply(from_witt(t_F(F, piece, mlev)), e);
      }
    }

    if (!y.divisible_by_p()) throw NonIntegralResult("structure iteration: residue not divisible by p");
    y = y.div_p();
  }

  // canonical reduction of the coefficients and removal of zero entries
  auto tidy = [&](std::map<BasicDiffKey, PolyZ, KeyLess>& mp) {
    for (auto it = mp.begin(); it != mp.end();) {
      std::uint32_t kmod = coeff_modulus(it->first, m);
      it->second = it->second.mod_pk(c.p, kmod == 0 ? 0 : kmod);
      if (it->second.is_zero()) it = mp.erase(it);
      else ++it;
    }
  };
  // H-keys carry the full level
  for (auto it = res.h_coeff.begin(); it != res.h_coeff.end();) {
    it->second = it->second.mod_pk(c.p, m);
    if (it->second.is_zero()) it = res.h_coeff.erase(it);
    else ++it;
  }
  tidy(res.g_coeff);
  tidy(res.dg_coeff);

  if (!eps_grid.empty()) {
    std::vector<mpq_class> grid = eps_grid;
    std::sort(grid.begin(), grid.end(), [](auto& a, auto& b) { return a > b; });
    for (auto& eps : grid) {
      XReal zx = zeta(x, eps);
      bool all = true;
      auto chkmap = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, std::uint32_t deg) {
        if (!zx.finite()) return true;
        for (auto& [key, s] : mp) {
          DrwElement e(c, deg);
          e.add_term(key, 1);
          XReal ze = zeta(e, eps);
          if (!ze.finite()) continue;
          if (!(zeta(from_witt(t_F(F, s, m)), eps) >= XReal(zx.v - ze.v - eta_tol))) return false;
        }
        return true;
      };
      all = chkmap(res.h_coeff, t) && chkmap(res.g_coeff, t) && (t == 0 || chkmap(res.dg_coeff, t - 1));
      if (all) {
        res.cert.certified = true;
        res.cert.eps = eps;
        res.cert.notes.push_back("zeta(t_F(s_e)) >= zeta(x) - zeta(e) - eta at eps=" + eps.get_str());
        break;
      }
    }
  }
  return res;
}

/// Unique overconvergent-Witt-vector decomposition over the polynomial ring
/// (truncated): w = sum_{a in A} t_F(h_a) e(1,a,0) with h_a in W(k)[X]~,
/// where A is the set of weight functions with entries in [0,1).
inline std::map<WeightFn, PolyZ, WeightLess> overconv_witt_decompose_poly(const WittVec& w, const FrobLift& F) {
  const RingContext& c = w.ctx;
  std::uint32_t m = c.m;
  std::map<WeightFn, PolyZ, WeightLess> h;
  WittVec rem = w;
  for (std::uint32_t l = 0; l < m; ++l) {
    if (rem.is_zero()) break;
    if (rem.vV().value_or(m) < l) throw NonIntegralResult("witt decompose: peeling drift");
    const PolyFp wl = rem.coords[l];  // copy: rem is reassigned below
    for (auto& [j, coef] : wl.terms) {
      // v_p of the exponent vector
      std::uint32_t v = l;
      for (std::uint32_t k2 = 0; k2 < c.n; ++k2) {
        if (j[k2] == 0) continue;
        std::uint32_t vk = 0;
        std::uint32_t x = j[k2];
        while (x % c.p == 0) {
          x /= c.p;
          ++vk;
        }
        v = std::min(v, vk);
      }
      std::uint32_t i = std::min(v, l);
      std::uint32_t delta = l - i;  // u(a)
      std::uint64_t pd = pow_u64(c.p, delta), pi = pow_u64(c.p, i);
      WeightFn a(c.p, c.n);
      Expo q(c.n, 0), frac(c.n, 0);
      for (std::uint32_t k2 = 0; k2 < c.n; ++k2) {
        std::uint32_t ek = j[k2] / (std::uint32_t)pi;  // e' = j / p^i
        a.entries[k2] = PadicFrac(ek % pd, delta, c.p);
        q[k2] = ek / (std::uint32_t)pd;
        frac[k2] = (std::uint32_t)(ek % pd);
      }
      PolyZ piece = teich_lift(PolyFp::monomial(c.p, q, coef), m);
      mpz_class piz;
      mpz_ui_pow_ui(piz.get_mpz_t(), c.p, i);
      auto [it, fresh] = h.emplace(a, PolyZ(c.n));
      it->second = (it->second + piece.scaled(piz)).mod_pk(c.p, m);
      // subtract t_F(p^i rho(c X^q)) * V^delta([X^frac])
      WittVec tf = t_F(F, piece, m).scaled_int(piz);
      WittVec ea = WittVec::teichmuller(c.with_len(m - delta), PolyFp::monomial(c.p, frac));
      for (std::uint32_t s2 = 0; s2 < delta; ++s2) ea = ea.verschiebung();
      rem = rem - tf * ea;
    }
  }
  if (!rem.is_zero()) throw NonIntegralResult("witt decompose: nonzero remainder");
  for (auto it = h.begin(); it != h.end();) {
    std::uint32_t kmod = m > it->first.u() ? m - it->first.u() : 0;
    it->second = it->second.mod_pk(c.p, kmod);
    if (it->second.is_zero()) it = h.erase(it);
    else ++it;
  }
  return h;
}

inline WittVec overconv_witt_recompose_poly(const std::map<WeightFn, PolyZ, WeightLess>& h, const FrobLift& F,
                                            const RingContext& c) {
  WittVec acc = WittVec::zero(c);
  for (auto& [a, ha] : h) {
    std::uint32_t u = a.u();
    Expo frac(c.n, 0);
    for (std::uint32_t i = 0; i < c.n; ++i) frac[i] = (std::uint32_t)a.entries[i].mul_p(c.p, u).num;
    WittVec ea = WittVec::teichmuller(c.with_len(c.m - u), PolyFp::monomial(c.p, frac));
    for (std::uint32_t s2 = 0; s2 < u; ++s2) ea = ea.verschiebung();
    acc = acc + t_F(F, ha, c.m) * ea;
  }
  return acc;
}

/// Overconvergent-Witt-vector structure over the localized etale algebra:
/// finds h: A_n -> W(k)[T]~ with W(phi)(sum t_F(h_a) e(1,a,0)) = w at level
/// m: decompose a preimage in the Witt basis upstairs, clear fractional
/// localizer digits, and twist by the basis slots.  Divisibility pattern
/// and a gamma certificate are attached.
struct OverconvWittDecomposition {
  std::map<WeightFn, PolyZ, WeightLess> h;  // A_n-indexed, values over k[T]
  std::uint32_t input_depth = 0;            // detected u with w in V^u
  CertBlock cert;
};

inline OverconvWittDecomposition overconv_witt_decompose(const GenWitt<TableAlgebra>& w,
                                                         const EtalePresentation& pres, std::uint32_t m,
                                                         const mpq_class& eta_tol,
                                                         const std::vector<mpq_class>& eps_grid = {}) {
  auto chk = check_relatively_perfect(pres);
  if (!chk.ok) throw NotRelativelyPerfect(chk.witness);
  const TableAlgebra& A = pres.alg;
  RingContext cT = pres.ctx_T(m);
  FrobLift F = pres.lift(m);
  std::uint32_t p = pres.p, r = pres.rank;

  OverconvWittDecomposition out;
  out.input_depth = gw_vV(A, w).value_or(m);

  // basis lifts s(i) = W(phi)(t_F(Z_i))
  std::vector<GenWitt<TableAlgebra>> lifts;
  for (std::uint32_t i = 0; i < r; ++i)
    lifts.push_back(pres.phi_witt(t_F(F, PolyZ::variable(cT.n, pres.z_slot(i)), m)));

  auto a_has_only_x_digits = [&](const WeightFn& a) {
    for (std::uint32_t i = pres.n; i < cT.n; ++i)
      if (!a.entries[i].is_zero()) return false;
    return true;
  };
  auto e_witt = [&](const WeightFn& a) {
    std::uint32_t u = a.u();
    Expo frac(cT.n, 0);
    for (std::uint32_t i = 0; i < cT.n; ++i) frac[i] = (std::uint32_t)a.entries[i].mul_p(p, u).num;
    WittVec e = WittVec::teichmuller(cT.with_len(m - u), PolyFp::monomial(p, frac));
    for (std::uint32_t s2 = 0; s2 < u; ++s2) e = e.verschiebung();
    return e;
  };

  // Because t_F is a ring morphism, the correction recursion telescopes to a
  // single pass at finite truncation: decompose the preimage in the Witt
  // basis, clear fractional localizer digits, and twist by the Z_i.
  std::map<WeightFn, PolyZ, WeightLess> hmap;  // X-block weights, padded to n_T slots
  {
    std::vector<PolyFp> coords;
    for (std::uint32_t u = 0; u < m; ++u) coords.push_back(pres.preimage(w.coords[u]));
    WittVec rho(cT, coords);
    auto R_i = witt_basis_decompose(pres.phi_witt(rho), pres, &lifts);
    for (std::uint32_t i = 0; i < r; ++i) {
      std::vector<PolyFp> ci;
      for (std::uint32_t u = 0; u < m; ++u) ci.push_back(pres.preimage_base(R_i[i].coords[u]));
      WittVec rho_si(cT, ci);
      WittVec c_si = WittVec::zero(cT);
      if (!pres.has_localizer()) {
        c_si = rho_si;
      } else {
        // replace each e(1,a',0) with f(a')[Y]; same image under W(phi)
        auto hs = overconv_witt_decompose_poly(rho_si, F);
        std::uint32_t y = pres.y_slot();
        PolyFp Ppoly(p, cT.n);
        for (auto& [e, cc] : pres.localizer.terms) {
          Expo e2(cT.n, 0);
          for (std::uint32_t k2 = 0; k2 < pres.n; ++k2) e2[k2] = e[k2];
          Ppoly.add_term(std::move(e2), cc);
        }
        WittVec yteich = WittVec::teichmuller(cT, PolyFp::variable(p, cT.n, y));
        for (auto& [ap, hap] : hs) {
          std::uint32_t u = ap.u();
          std::uint64_t pu = pow_u64(p, u);
          Expo fr(cT.n, 0);
          for (std::uint32_t k2 = 0; k2 < pres.n; ++k2) fr[k2] = (std::uint32_t)ap.entries[k2].mul_p(p, u).num;
          std::uint64_t ay = ap.entries[y].mul_p(p, u).num;  // p^u a'_Y
          PolyFp inner = PolyFp::monomial(p, fr) * Ppoly.pow(pu - ay);
          WittVec f = WittVec::teichmuller(cT.with_len(m - u), inner);
          for (std::uint32_t s2 = 0; s2 < u; ++s2) f = f.verschiebung();
          c_si = c_si + t_F(F, hap, m) * f * yteich;
        }
      }
      auto hc = overconv_witt_decompose_poly(c_si, F);
      PolyZ zi = PolyZ::variable(cT.n, pres.z_slot(i));
      for (auto& [a, hca] : hc) {
        if (!a_has_only_x_digits(a)) throw NonIntegralResult("etale witt decompose: stray fractional digit");
        auto [it, fresh] = hmap.emplace(a, PolyZ(cT.n));
        it->second = (it->second + zi * hca).mod_pk(p, m);
      }
    }
  }

  for (auto it = hmap.begin(); it != hmap.end();) {
    std::uint32_t kmod = m > it->first.u() ? m - it->first.u() : 0;
    it->second = it->second.mod_pk(p, kmod);
    if (it->second.is_zero()) it = hmap.erase(it);
    else ++it;
  }
  out.h = std::move(hmap);

  // exactness through W(phi)
  GenWitt<TableAlgebra> acc = GenWitt<TableAlgebra>::zero(A, m);
  for (auto& [a, ha] : out.h) acc = gw_add(A, p, acc, pres.phi_witt(t_F(F, ha, m) * e_witt(a)));
  if (!gw_sub(A, p, acc, w).is_zero(A)) throw NonIntegralResult("etale witt decompose: recomposition mismatch");

  // gamma certificate on a grid
  if (!eps_grid.empty()) {
    std::vector<mpq_class> b(cT.n, 1);
    std::vector<mpq_class> grid = eps_grid;
    std::sort(grid.begin(), grid.end(), [](auto& x, auto& y) { return x > y; });
    std::vector<PolyFp> wpre;
    for (auto& cc : w.coords) wpre.push_back(pres.preimage(cc));
    for (auto& eps : grid) {
      GammaResult gw_lower = gamma_presented(wpre, eps, b, p);
      bool all = true;
      for (auto& [a, ha] : out.h) {
        WittVec piece = t_F(F, ha, m) * e_witt(a);
        if (!(gamma_id(piece, eps, b).value >= gw_lower.value + XReal(-eta_tol))) {
          all = false;
          break;
        }
      }
      if (all) {
        out.cert.certified = true;
        out.cert.eps = eps;
        out.cert.notes.push_back("gamma(t_F(h_a) e(1,a,0)) >= gamma_phi(w) - eta at eps=" + eps.get_str() +
                                 " (right side is a chosen-preimage lower bound)");
        break;
      }
    }
  }
  return out;
}

inline DrwElement recompose(const DecompositionResult& res, const FrobLift& F) {
  RingContext c = res.ctx.with_len(res.level);
  DrwElement acc(c, res.degree);
  for (auto& [key, s] : res.h_coeff) {
    std::vector<PolyZ> dqs;
    for (auto j : key.parts) dqs.push_back(PolyZ::variable(c.n, j));
    acc = acc + t_F_forms(F, FormalForm::monomial_form(s, dqs), res.level);
  }
  for (auto& [key, s] : res.g_coeff) {
    DrwElement e(c, res.degree);
    e.add_term(key, 1);
    acc = acc + multiply(from_witt(t_F(F, s, res.level)), e);
  }
  if (res.degree >= 1) {
    DrwElement inner(c, res.degree - 1);
    for (auto& [key, s] : res.dg_coeff) {
      DrwElement e(c, res.degree - 1);
      e.add_term(key, 1);
      inner = inner + multiply(from_witt(t_F(F, s, res.level)), e);
    }
    acc = acc + inner.differential();
  }
  return acc;
}

struct EtaleDecomposeOptions {
  std::uint32_t max_u = 2;         // fractional depth of the enumerated G keys
  std::uint64_t max_weight = 4;    // |a| bound in the G enumeration
  std::uint64_t max_poly_deg = 6;  // degree bound of the coefficient monomials
  std::vector<mpq_class> eps_grid = {mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8), mpq_class(1, 16)};
};

// H/G/G(t-1) keys over the X-block, written in the n_T-variable ring.
inline std::vector<BasicDiffKey> pad_keys(const std::vector<BasicDiffKey>& keys, std::uint32_t p,
                                          std::uint32_t n_T) {
  std::vector<BasicDiffKey> out;
  for (auto& k : keys) {
    WeightFn a(p, n_T);
    for (std::uint32_t i = 0; i < k.weight.n(); ++i) a.entries[i] = k.weight.entries[i];
    out.emplace_back(std::move(a), k.parts);
  }
  return out;
}

/// Main-theorem engine over the localized etale algebra at truncation m.
/// The input is a form over the presentation ring k[T] standing for its
/// W(phi)-image; the output expresses that image as
/// sum_H t_F(s_e e) + sum_G t_F(s_e) e + d(sum_{G(t-1)} t_F(s_e) e) with
/// coefficients in the truncated weak completion of W(k)[T].  Solved by a
/// deterministic exact Z/p^m system on bounded-weight generator slices
/// through the presentation's polynomial model.
inline DecompositionResult etale_structure_decompose(const DrwElement& x, const EtalePresentation& pres,
                                                     std::uint32_t m, const mpq_class& eta_tol,
                                                     const EtaleDecomposeOptions& opt = {}) {
  auto chk = check_relatively_perfect(pres);
  if (!chk.ok) throw NotRelativelyPerfect(chk.witness);
  if (!pres.has_model()) throw Error("etale_structure_decompose needs the presentation's polynomial model");
  RingContext cT = pres.ctx_T(m);
  if (!(x.ctx == cT)) throw ContextMismatch("etale_structure_decompose: element not over the presentation ring");
  RingContext cM = pres.ctx_model(m);
  FrobLift F = pres.lift(m);
  std::uint32_t t = x.degree;

  DrwElement target = induced_map(pres.model_images, x, cM);

  RingContext cX(pres.p, pres.n, m);
  auto hk = pad_keys(enumerate_H(t, cX), pres.p, cT.n);
  auto gk = pad_keys(enumerate_G((std::int64_t)t, cX, opt.max_u, opt.max_weight), pres.p, cT.n);
  auto dgk = pad_keys(enumerate_G((std::int64_t)t - 1, cX, opt.max_u, opt.max_weight), pres.p, cT.n);

  // monomials over the presentation variables
  std::vector<Expo> mons;
  {
    Expo cur(cT.n, 0);
    auto rec = [&](auto&& self, std::uint32_t i, std::uint64_t left) -> void {
      if (i == cT.n) {
        mons.push_back(cur);
        return;
      }
      for (std::uint64_t v = 0; v <= left; ++v) {
        cur[i] = (std::uint32_t)v;
        self(self, i + 1, left - v);
      }
      cur[i] = 0;
    };
    rec(rec, 0, opt.max_poly_deg);
  }

  struct Column {
    int family;  // 0 = H, 1 = G, 2 = dG
    std::size_t key_index;
    Expo mono;
    DrwElement pushed;  // over the model ring
  };
  std::vector<Column> cols;
  auto push_through = [&](const DrwElement& piece) { return induced_map(pres.model_images, piece, cM); };
  for (std::size_t ki = 0; ki < hk.size(); ++ki)
    for (auto& al : mons) {
      std::vector<PolyZ> dqs;
      for (auto j : hk[ki].parts) dqs.push_back(PolyZ::variable(cT.n, j));
      DrwElement piece = t_F_forms(F, FormalForm::monomial_form(PolyZ::monomial(al), dqs), m);
      cols.push_back({0, ki, al, push_through(piece)});
    }
  auto g_cols = [&](const std::vector<BasicDiffKey>& keys, int family, std::uint32_t deg) {
    for (std::size_t ki = 0; ki < keys.size(); ++ki) {
      if (coeff_modulus(keys[ki], m) == 0) continue;
      DrwElement e(cT, deg);
      e.add_term(keys[ki], 1);
      for (auto& al : mons) {
        DrwElement piece = multiply(from_witt(t_F(F, PolyZ::monomial(al), m)), e);
        if (family == 2) piece = piece.differential();
        cols.push_back({family, ki, al, push_through(piece)});
      }
    }
  };
  g_cols(gk, 1, t);
  if (t >= 1) g_cols(dgk, 2, t - 1);

  // assemble the Z/p^m system over the model key space
  std::map<BasicDiffKey, std::size_t, KeyLess> slot;
  auto row_of = [&](const BasicDiffKey& k) { return slot.emplace(k, slot.size()).first->second; };
  for (auto& c2 : cols)
    for (auto& [k, coeff] : c2.pushed.terms) row_of(k);
  for (auto& [k, coeff] : target.terms) row_of(k);
  std::vector<std::vector<std::uint64_t>> A(slot.size(), std::vector<std::uint64_t>(cols.size(), 0));
  std::vector<std::uint64_t> rhs(slot.size(), 0);
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (auto& [k, coeff] : cols[j].pushed.terms) A[row_of(k)][j] = coeff;
  for (auto& [k, coeff] : target.terms) rhs[row_of(k)] = coeff;

  auto sol = solve_mod_pk(A, rhs, pres.p, m);
  if (!sol) throw WeightBoundExceeded("etale decomposition: no solution within the configured bounds");

  DecompositionResult res;
  res.ctx = cT;
  res.degree = t;
  res.level = m;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if ((*sol)[j] == 0) continue;
    auto& mp = cols[j].family == 0 ? res.h_coeff : (cols[j].family == 1 ? res.g_coeff : res.dg_coeff);
    const BasicDiffKey& key =
        cols[j].family == 0 ? hk[cols[j].key_index] : (cols[j].family == 1 ? gk[cols[j].key_index] : dgk[cols[j].key_index]);
    auto [it, fresh] = mp.emplace(key, PolyZ(cT.n));
    it->second.add_term(cols[j].mono, mpz_class((unsigned long)(*sol)[j]));
  }
  auto tidy = [&](std::map<BasicDiffKey, PolyZ, KeyLess>& mp, bool full_level) {
    for (auto it = mp.begin(); it != mp.end();) {
      std::uint32_t kmod = full_level ? m : coeff_modulus(it->first, m);
      it->second = it->second.mod_pk(pres.p, kmod);
      if (it->second.is_zero()) it = mp.erase(it);
      else ++it;
    }
  };
  tidy(res.h_coeff, true);
  tidy(res.g_coeff, false);
  tidy(res.dg_coeff, false);

  // verify the recomposition through W(phi)
  DrwElement re = recompose(res, F);
  if (!(push_through(re) == target)) throw NonIntegralResult("etale decomposition: recomposition mismatch");

  // zeta certificates on the grid
  std::vector<mpq_class> grid = opt.eps_grid;
  std::sort(grid.begin(), grid.end(), [](auto& a, auto& b) { return a > b; });
  for (auto& eps : grid) {
    bool all = true;
    // require zeta(t_F(s_e)) >= zeta(x) - zeta(e) - eta per key
    auto check_map = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, std::uint32_t deg) {
      XReal zx = zeta(x, eps);
      if (!zx.finite()) return true;
      for (auto& [key, s] : mp) {
        DrwElement e(cT, deg);
        e.add_term(key, 1);
        XReal ze = zeta(e, eps);
        if (!ze.finite()) continue;
        if (!(zeta(from_witt(t_F(F, s, m)), eps) >= XReal(zx.v - ze.v - eta_tol))) return false;
      }
      return true;
    };
    all = check_map(res.h_coeff, t) && check_map(res.g_coeff, t) && (t == 0 || check_map(res.dg_coeff, t - 1));
    if (all) {
      res.cert.certified = true;
      res.cert.eps = eps;
      res.cert.notes.push_back("zeta(t_F(s_e)) >= zeta(x) - zeta(e) - eta at eps=" + eps.get_str());
      break;
    }
  }
  return res;
}

/// Compatible-lift verification: the supplied Frobenius lift on the
/// presentation ring and the lift G on the polynomial model commute with the
/// (lifted) model map mod p^N, i.e. G(phi(v)) = phi(F(v)) for every
/// presentation variable.  The commutation is checked, never solved for.
/// Returns nullopt on success and a witness line otherwise.
inline std::optional<std::string> check_compatible_lift(const EtalePresentation& pres, const FrobLift& FT,
                                                        const FrobLift& Gmodel, std::uint32_t N,
                                                        const std::vector<PolyZ>* model_lift_images = nullptr) {
  if (!pres.has_model()) return "presentation has no polynomial model";
  std::vector<PolyZ> phihat;
  if (model_lift_images) phihat = *model_lift_images;
  else
    for (auto& f : pres.model_images) phihat.push_back(teich_lift(f, N));
  for (std::uint32_t v = 0; v < pres.n_T(); ++v) {
    PolyZ lhs = Gmodel.apply(phihat[v]).mod_pk(pres.p, N);
    PolyZ rhs = FT.images[v].subst(phihat).mod_pk(pres.p, N);
    if (!(lhs == rhs))
      return "G(phi(v)) != phi(F(v)) mod p^N at presentation variable " + std::to_string(v + 1);
  }
  return std::nullopt;
}

/// Constants of the overconvergence-control lemmas, computed from the
/// presentation by the constructive recipes in the proofs.
struct ConstantsReport {
  std::vector<mpq_class> b;  // radii for the presentation variables
  mpq_class C = 0, D = 0, E = 0;
  mpq_class delta = 0;  // positive threshold; certificates are re-verified at eps <= delta
};

inline ConstantsReport compute_constants(const EtalePresentation& pres) {
  auto chk = check_relatively_perfect(pres);
  if (!chk.ok) throw NotRelativelyPerfect(chk.witness);
  ConstantsReport rep;
  if (pres.rank == 1 && !pres.has_localizer()) {
    // the extension is the base itself: the decomposition is the identity
    rep.b.assign(pres.n + 1, mpq_class(1));
    rep.delta = 1;
    return rep;
  }
  // d: max plain degree of the chosen preimages of the products s_i s_j
  std::int64_t d = 1;
  for (std::uint32_t i = 0; i < pres.rank; ++i)
    for (std::uint32_t j = 0; j < pres.rank; ++j) {
      PolyFp pre = pres.preimage(pres.alg.mul(pres.alg.basis(i), pres.alg.basis(j)));
      d = std::max(d, pre.degree());
    }
  std::uint32_t nxy = pres.n + (pres.has_localizer() ? 1 : 0);
  rep.b.assign(nxy, mpq_class(1));
  for (std::uint32_t i = 0; i < pres.rank; ++i) rep.b.push_back(mpq_class((long)d));
  // C = -v_b(preimage of 1) with the preimage Z_1
  rep.C = mpq_class((long)d);
  // d' = min base-valuation of the U0 entries, D = -d'/(p-1)
  mpq_class dprime = 0;
  for (auto& row : chk.u0)
    for (auto& q : row) {
      if (pres.alg.base.is_zero(q)) continue;
      mpq_class v = -mpq_class((long)(q.num.degree() + (std::int64_t)q.den));
      dprime = std::min(dprime, v);
    }
  rep.D = -dprime / mpq_class((long)(pres.p - 1));
  rep.E = rep.C + rep.D;
  mpq_class s1 = 1 / (2 * (rep.C + rep.D) + 1);
  mpq_class s2 = 1 / (rep.C + rep.D + rep.E + 1);
  rep.delta = std::min(s1, s2);
  return rep;
}

}  // namespace wdrw
