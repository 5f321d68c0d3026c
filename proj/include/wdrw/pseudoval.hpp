#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "wdrw/algebra.hpp"

namespace wdrw {

/// Exact extended real: a rational, +inf, or -inf.
struct XReal {
  enum Kind { NegInf = -1, Finite = 0, PosInf = 1 } kind = Finite;
  mpq_class v = 0;

  XReal() = default;
  XReal(mpq_class q) : kind(Finite), v(std::move(q)) {}
  static XReal pos_inf() { return XReal(PosInf); }
  static XReal neg_inf() { return XReal(NegInf); }

  bool finite() const { return kind == Finite; }
  bool operator==(const XReal& o) const { return kind == o.kind && (kind != Finite || v == o.v); }
  bool operator<(const XReal& o) const {
    if (kind != o.kind) return kind < o.kind;
    return kind == Finite && v < o.v;
  }
  bool operator<=(const XReal& o) const { return *this < o || *this == o; }
  bool operator>=(const XReal& o) const { return o <= *this; }

  XReal operator+(const mpq_class& q) const { return finite() ? XReal(v + q) : *this; }
  XReal operator+(const XReal& o) const {
    if (kind == NegInf || o.kind == NegInf) return neg_inf();
    if (kind == PosInf || o.kind == PosInf) return pos_inf();
    return XReal(v + o.v);
  }
  XReal scaled(const mpq_class& q) const { return finite() ? XReal(v * q) : *this; }  // q > 0
  static XReal min(const XReal& a, const XReal& b) { return a < b ? a : b; }

  std::string str() const {
    if (kind == PosInf) return "+inf";
    if (kind == NegInf) return "-inf";
    return v.get_str();
  }

 private:
  explicit XReal(Kind k) : kind(k) {}
};

inline std::uint32_t vp_of_residue(std::uint64_t c, std::uint32_t p) {
  std::uint32_t v = 0;
  while (c && c % p == 0) {
    c /= p;
    ++v;
  }
  return v;
}

/// zeta_eps on the canonical decomposition: min over terms of
/// 2n v_V(eta) + (#I + [I_0 nonempty]) u(a) - eps |a|.
inline XReal zeta(const DrwElement& x, const mpq_class& eps) {
  if (x.is_zero()) return XReal::pos_inf();
  XReal best = XReal::pos_inf();
  mpq_class twon((unsigned long)(2 * x.ctx.n));
  for (auto& [k, c] : x.terms) {
    mpq_class val = twon * (unsigned long)vp_of_residue(c, x.ctx.p);
    std::uint64_t mult = k.degree() + (k.i0_empty() ? 0 : 1);
    val += mpq_class((unsigned long)mult) * (unsigned long)k.weight.u();
    val -= eps * k.weight.total();
    best = XReal::min(best, XReal(val));
  }
  return best;
}

/// v_b: min over monomials of -sum b_i j_i, with v_b(0) = +inf.
inline XReal v_weighted(const PolyFp& P, const std::vector<mpq_class>& b) {
  if (P.is_zero()) return XReal::pos_inf();
  XReal best = XReal::pos_inf();
  for (auto& [e, c] : P.terms) {
    mpq_class s = 0;
    for (std::size_t i = 0; i < e.size(); ++i) s -= b[i] * (unsigned long)e[i];
    best = XReal::min(best, XReal(s));
  }
  return best;
}

struct GammaResult {
  XReal value;
  bool exact = true;  // false when v_{phi,b} was evaluated on chosen preimages only
};

/// gamma_{eps, Id, b} on Witt vectors over the polynomial ring itself:
/// inf over u of u + eps p^{-u} v_b(w_u).  Exact.
inline GammaResult gamma_id(const WittVec& w, const mpq_class& eps, const std::vector<mpq_class>& b) {
  XReal best = XReal::pos_inf();
  mpz_class pu = 1;
  for (std::uint32_t u = 0; u < w.ctx.m; ++u) {
    XReal vb = v_weighted(w.coords[u], b);
    if (vb.finite()) best = XReal::min(best, XReal(mpq_class((unsigned long)u) + eps * vb.v / mpq_class(pu)));
    pu *= w.ctx.p;
  }
  return GammaResult{best, true};
}

/// gamma_{eps, phi, b} evaluated through caller-chosen preimages of the
/// coordinates (a certified lower bound; the sup over all preimages is not
/// algorithmic).
inline GammaResult gamma_presented(const std::vector<PolyFp>& coord_preimages, const mpq_class& eps,
                                   const std::vector<mpq_class>& b, std::uint32_t p) {
  XReal best = XReal::pos_inf();
  mpz_class pu = 1;
  for (std::uint32_t u = 0; u < coord_preimages.size(); ++u) {
    XReal vb = v_weighted(coord_preimages[u], b);
    if (vb.finite()) best = XReal::min(best, XReal(mpq_class((unsigned long)u) + eps * vb.v / mpq_class(pu)));
    pu *= p;
  }
  return GammaResult{best, false};
}

inline mpq_class radii_min_ratio(const std::vector<mpq_class>& b, const std::vector<mpq_class>& c) {
  mpq_class m = c.at(0) / b.at(0);
  for (std::size_t i = 1; i < b.size(); ++i) m = std::min(m, mpq_class(c[i] / b[i]));
  return m;
}
inline mpq_class radii_max_ratio(const std::vector<mpq_class>& b, const std::vector<mpq_class>& c) {
  mpq_class m = c.at(0) / b.at(0);
  for (std::size_t i = 1; i < b.size(); ++i) m = std::max(m, mpq_class(c[i] / b[i]));
  return m;
}

/// Overconvergence report: finitely supported truncated elements are always
/// overconvergent; the slopes table evaluates zeta on a caller-supplied grid.
struct OverconvergenceReport {
  bool is_overconvergent_trivially = true;
  std::vector<std::pair<mpq_class, XReal>> slopes;
};

inline OverconvergenceReport overconvergence_report(const DrwElement& x, const std::vector<mpq_class>& grid) {
  OverconvergenceReport r;
  for (auto& eps : grid) r.slopes.emplace_back(eps, zeta(x, eps));
  return r;
}

struct CheckReport {
  std::string name;
  int checked = 0;
  std::vector<std::string> violations;

  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}
  bool ok() const { return violations.empty() && checked > 0; }
};

namespace checks {

inline void expect(CheckReport& r, bool cond, const std::string& witness) {
  ++r.checked;
  if (!cond) r.violations.push_back(witness);
}

// the five pseudovaluation axioms for zeta on sampled elements
inline void zeta_axioms(CheckReport& r, const std::vector<DrwElement>& xs, const mpq_class& eps,
                        const RingContext& ctx) {
  expect(r, zeta(DrwElement::zero(ctx, 0), eps) == XReal::pos_inf(), "zeta(0) != +inf");
  expect(r, zeta(DrwElement::one(ctx), eps) == XReal(mpq_class(0)), "zeta(1) != 0");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const DrwElement& x = xs[i];
    expect(r, zeta(x, eps) == zeta(-x, eps), "zeta(x) != zeta(-x)");
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const DrwElement& y = xs[j];
      if (x.degree == y.degree && x.ctx == y.ctx)
        expect(r, zeta(x + y, eps) >= XReal::min(zeta(x, eps), zeta(y, eps)), "zeta(x+y) < min");
      if (x.ctx == y.ctx && x.degree + y.degree <= 2) {
        XReal zx = zeta(x, eps), zy = zeta(y, eps);
        if (zx.kind != XReal::NegInf && zy.kind != XReal::NegInf)
          expect(r, zeta(multiply(x, y), eps) >= zx + zy, "zeta(xy) < zeta(x)+zeta(y)");
      }
    }
  }
}

inline void gamma_axioms(CheckReport& r, const std::vector<WittVec>& ws, const mpq_class& eps,
                         const std::vector<mpq_class>& b, const RingContext& ctx) {
  expect(r, gamma_id(WittVec::zero(ctx), eps, b).value == XReal::pos_inf(), "gamma(0) != +inf");
  expect(r, gamma_id(WittVec::teichmuller(ctx, PolyFp::constant(ctx.p, ctx.n, 1)), eps, b).value == XReal(mpq_class(0)),
         "gamma(1) != 0");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    expect(r, gamma_id(ws[i], eps, b).value == gamma_id(-ws[i], eps, b).value, "gamma(w) != gamma(-w)");
    for (std::size_t j = i + 1; j < ws.size(); ++j) {
      expect(r, gamma_id(ws[i] + ws[j], eps, b).value >=
                    XReal::min(gamma_id(ws[i], eps, b).value, gamma_id(ws[j], eps, b).value),
             "gamma(x+y) < min");
      expect(r, gamma_id(ws[i] * ws[j], eps, b).value >= gamma_id(ws[i], eps, b).value + gamma_id(ws[j], eps, b).value,
             "gamma(xy) < gamma(x)+gamma(y)");
    }
  }
}

}  // namespace checks

}  // namespace wdrw
