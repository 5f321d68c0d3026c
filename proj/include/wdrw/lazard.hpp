#pragma once

#include <string>
#include <vector>

#include "wdrw/pseudoval.hpp"
#include "wdrw/zpk_solve.hpp"

namespace wdrw {

/// Frobenius lift on the (truncated) weak completion of W(F_p)[X_1..X_n]:
/// X_i -> X_i^p + p delta_i with integer delta_i; the base action on W(F_p)
/// is the Witt Frobenius (the identity).  The canonical lift has delta = 0.
struct FrobLift {
  RingContext ctx;            // carries p and n
  std::uint32_t precision;    // N >= ctx.m; LiftPoly arithmetic is mod p^N
  std::vector<PolyZ> images;  // exact integer polynomials X_i^p + p delta_i

  FrobLift(RingContext c, std::uint32_t N, std::vector<PolyZ> imgs)
      : ctx(c), precision(N), images(std::move(imgs)) {
    if (images.size() != ctx.n) throw Error("FrobLift: one image per variable");
    for (std::uint32_t i = 0; i < ctx.n; ++i) {
      PolyZ diff = images[i] - PolyZ::variable(ctx.n, i).pow(ctx.p);
      if (!diff.mod_p(ctx.p).is_zero()) throw NonIntegralGhost("lift violates the delta-ring condition");
    }
  }

  static FrobLift canonical(RingContext c, std::uint32_t N) {
    std::vector<PolyZ> imgs;
    for (std::uint32_t i = 0; i < c.n; ++i) imgs.push_back(PolyZ::variable(c.n, i).pow(c.p));
    return FrobLift(c, N, std::move(imgs));
  }
  static FrobLift from_deltas(RingContext c, std::uint32_t N, const std::vector<PolyZ>& deltas) {
    std::vector<PolyZ> imgs;
    for (std::uint32_t i = 0; i < c.n; ++i)
      imgs.push_back(PolyZ::variable(c.n, i).pow(c.p) + deltas.at(i).scaled(c.p));
    return FrobLift(c, N, std::move(imgs));
  }

  bool is_canonical() const {
    for (std::uint32_t i = 0; i < ctx.n; ++i)
      if (!(images[i] == PolyZ::variable(ctx.n, i).pow(ctx.p))) return false;
    return true;
  }

  // substitution homomorphism; exact over Z
  PolyZ apply(const PolyZ& P) const { return P.subst(images); }
  // the LiftPoly variant, reduced mod p^N
  PolyZ apply_mod(const PolyZ& P) const { return apply(P).mod_pk(ctx.p, precision); }
};

/// s_F: ghost inversion of (P, F(P), ..., F^(m-1)(P)) over exact integers.
inline std::vector<PolyZ> s_F(const FrobLift& F, const PolyZ& P, std::uint32_t m) {
  std::vector<PolyZ> g;
  g.reserve(m);
  PolyZ cur = P;
  for (std::uint32_t u = 0; u < m; ++u) {
    g.push_back(cur);
    if (u + 1 < m) cur = F.apply(cur);
  }
  return unghost(g, F.ctx.p);
}

/// Lazard morphism t_F: coordinatewise reduction of s_F mod p; a ring
/// morphism into W_m with ghost components (P, F(P), ..., F^(m-1)(P)).
inline WittVec t_F(const FrobLift& F, const PolyZ& P, std::uint32_t m) {
  auto coords = s_F(F, P, m);
  std::vector<PolyFp> v;
  v.reserve(m);
  for (auto& q : coords) v.push_back(q.mod_p(F.ctx.p));
  return WittVec(RingContext(F.ctx.p, F.ctx.n, m), std::move(v));
}

/// Formal differential form sum_alpha P_alpha dQ_(alpha,1) ^ ... ^ dQ_(alpha,t)
/// over the truncated weak completion.
struct FormalForm {
  std::uint32_t degree = 0;
  std::vector<std::pair<PolyZ, std::vector<PolyZ>>> terms;

  static FormalForm scalar(PolyZ P) { return FormalForm{0, {{std::move(P), {}}}}; }
  static FormalForm monomial_form(PolyZ P, std::vector<PolyZ> dQs) {
    FormalForm f;
    f.degree = (std::uint32_t)dQs.size();
    f.terms.push_back({std::move(P), std::move(dQs)});
    return f;
  }
};

/// t_F on forms: t_F(P) d(t_F(Q_1)) ... d(t_F(Q_t)), in normal form.
inline DrwElement t_F_forms(const FrobLift& F, const FormalForm& omega, std::uint32_t m) {
  RingContext c(F.ctx.p, F.ctx.n, m);
  DrwElement acc(c, omega.degree);
  for (auto& [P, Qs] : omega.terms) {
    DrwElement term = from_witt(t_F(F, P, m));
    for (auto& Q : Qs) term = multiply(term, from_witt(t_F(F, Q, m)).differential());
    acc = acc + term;
  }
  return acc;
}

/// v_F = t_F - t_Frob~ (degree 0): lands in V(W).
inline WittVec v_F(const FrobLift& F, const PolyZ& P, std::uint32_t m) {
  FrobLift can = FrobLift::canonical(F.ctx, F.precision);
  return t_F(F, P, m) - t_F(can, P, m);
}

/// v_F on forms: lands in Fil^1.
inline DrwElement v_F_forms(const FrobLift& F, const FormalForm& omega, std::uint32_t m) {
  FrobLift can = FrobLift::canonical(F.ctx, F.precision);
  return t_F_forms(F, omega, m) - t_F_forms(can, omega, m);
}

/// Empirical largest grid epsilon at which the v_F lower bounds hold:
/// gamma(v_F(X^a)) >= 1 - mu - eps sum b_i a_i on monomials |a| <= bound, and
/// gamma(v_F(x)) >= 1 - mu + gamma(x), zeta(v_F(x)) >= 1 - mu + zeta(x) on
/// the sampled lifts.
struct VfEstimate {
  bool found = false;
  mpq_class delta = 0;
  std::vector<std::string> witnesses;  // violations at larger grid epsilons
};

inline VfEstimate estimate_v_F(const FrobLift& F, std::uint32_t m, std::vector<mpq_class> grid,
                               const std::vector<mpq_class>& b, const mpq_class& mu, std::uint64_t weight_bound,
                               const std::vector<PolyZ>& samples) {
  std::sort(grid.begin(), grid.end(), [](const mpq_class& x, const mpq_class& y) { return x > y; });
  FrobLift can = FrobLift::canonical(F.ctx, F.precision);
  VfEstimate est;
  // monomial list |a| <= bound
  std::vector<Expo> mons;
  Expo cur(F.ctx.n, 0);
  auto rec = [&](auto&& self, std::uint32_t i, std::uint64_t left) -> void {
    if (i == F.ctx.n) {
      mons.push_back(cur);
      return;
    }
    for (std::uint64_t v = 0; v <= left; ++v) {
      cur[i] = (std::uint32_t)v;
      self(self, i + 1, left - v);
    }
    cur[i] = 0;
  };
  rec(rec, 0, weight_bound);

  for (auto& eps : grid) {
    bool ok = true;
    std::string witness;
    for (auto& e : mons) {
      WittVec vf = t_F(F, PolyZ::monomial(e), m) - t_F(can, PolyZ::monomial(e), m);
      mpq_class rhs = 1 - mu;
      for (std::uint32_t i = 0; i < F.ctx.n; ++i) rhs -= eps * b[i] * (unsigned long)e[i];
      if (!(gamma_id(vf, eps, b).value >= XReal(rhs))) {
        ok = false;
        witness = "mingammaepsilon bound fails on a monomial at eps=" + eps.get_str();
        break;
      }
    }
    for (auto& P : samples) {
      if (!ok) break;
      WittVec tcan = t_F(can, P, m);
      WittVec vf = t_F(F, P, m) - tcan;
      XReal g = gamma_id(tcan, eps, b).value;
      XReal z = zeta(from_witt(tcan), eps);
      if (!(gamma_id(vf, eps, b).value >= g + (1 - mu)) || !(zeta(from_witt(vf), eps) >= z + (1 - mu))) {
        ok = false;
        witness = "vfgamma bound fails on a sample at eps=" + eps.get_str();
      }
    }
    if (ok) {
      est.found = true;
      est.delta = eps;
      return est;
    }
    est.witnesses.push_back(witness);
  }
  return est;
}

}  // namespace wdrw
