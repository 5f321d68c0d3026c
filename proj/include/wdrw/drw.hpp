#pragma once

#include <cstdint>
#include <map>

#include "wdrw/weight.hpp"
#include "wdrw/witt.hpp"

namespace wdrw {

/// Element of W_m Omega^t_{F_p[X]/F_p} in canonical normal form: a finite
/// map from basic-differential keys to coefficients in Z/p^(m-u(a)),
/// stored as least nonnegative residues.  Keys all have #I = degree.
class DrwElement {
 public:
  RingContext ctx;            // ctx.m is the truncation level of this element
  std::uint32_t degree = 0;   // t
  std::map<BasicDiffKey, std::uint64_t, KeyLess> terms;

  DrwElement() = default;
  DrwElement(RingContext c, std::uint32_t t) : ctx(c), degree(t) {}

  static DrwElement zero(RingContext c, std::uint32_t t) { return DrwElement(c, t); }
  static DrwElement one(RingContext c) {
    DrwElement r(c, 0);
    r.add_term(BasicDiffKey(WeightFn(c.p, c.n), {}), 1);
    return r;
  }

  bool is_zero() const { return terms.empty(); }
  bool operator==(const DrwElement& o) const {
    return ctx == o.ctx && degree == o.degree && terms == o.terms;
  }

  std::uint64_t modulus_of(const BasicDiffKey& k) const { return pow_u64(ctx.p, coeff_modulus(k, ctx.m)); }

  void add_term(const BasicDiffKey& k, std::uint64_t c) {
    if (k.degree() != degree) throw DegreeMismatch();
    std::uint64_t mod = modulus_of(k);
    if (mod <= 1) return;
    c %= mod;
    if (c == 0) return;
    auto it = terms.find(k);
    if (it == terms.end()) {
      terms.emplace(k, c);
    } else {
      it->second = (it->second + c) % mod;
      if (it->second == 0) terms.erase(it);
    }
  }

  DrwElement operator+(const DrwElement& o) const {
    require_compatible(o);
    DrwElement r = *this;
    for (auto& [k, c] : o.terms) r.add_term(k, c);
    return r;
  }
  DrwElement operator-() const {
    DrwElement r(ctx, degree);
    for (auto& [k, c] : terms) r.add_term(k, modulus_of(k) - c);
    return r;
  }
  DrwElement operator-(const DrwElement& o) const { return *this + (-o); }
  DrwElement scaled(std::uint64_t s) const {
    DrwElement r(ctx, degree);
    for (auto& [k, c] : terms) r.add_term(k, (c % modulus_of(k)) * (s % modulus_of(k)) % modulus_of(k));
    return r;
  }

  DrwElement truncated(std::uint32_t m2) const {
    if (m2 > ctx.m) throw LengthUnderflow("truncated: target longer than source");
    DrwElement r(ctx.with_len(m2), degree);
    for (auto& [k, c] : terms) r.add_term(k, c);
    return r;
  }

  // Fil^u = Ker(W_m Omega -> W_u Omega): every coefficient vanishes mod
  // p^(u - u(a)).
  bool in_fil(std::uint32_t u) const {
    for (auto& [k, c] : terms) {
      std::uint32_t ua = k.weight.u();
      if (u > ua && c % pow_u64(ctx.p, u - ua) != 0) return false;
    }
    return true;
  }

  bool divisible_by_p(std::uint32_t l = 1) const {
    std::uint64_t pl = pow_u64(ctx.p, l);
    for (auto& [k, c] : terms)
      if (c % pl != 0) return false;
    return true;
  }

  // Exact inverse of multiplication by p^l, landing at level m - l.
  DrwElement div_p(std::uint32_t l = 1) const {
    if (!divisible_by_p(l)) throw NonIntegralResult("div_p: not divisible");
    if (ctx.m < l) throw LengthUnderflow();
    DrwElement r(ctx.with_len(ctx.m - l), degree);
    std::uint64_t pl = pow_u64(ctx.p, l);
    for (auto& [k, c] : terms) r.add_term(k, c / pl);
    return r;
  }

  DrwElement scaled_p(std::uint32_t l) const {  // multiply by p^l at level m
    return scaled(pow_u64(ctx.p, l) % std::max<std::uint64_t>(ctx.modulus(), 1));
  }

  /// d, termwise: 0 if I_0 empty; e(eta,a,I+{min a}) if v_p(a) <= 0; else
  /// p^(v_p a) e(eta,a,I+{min a}).
  DrwElement differential() const {
    DrwElement r(ctx, degree + 1);
    for (auto& [k, c] : terms) {
      if (k.i0_empty()) continue;
      std::vector<std::uint32_t> I2 = k.parts;
      I2.push_back(k.weight.min_index());
      BasicDiffKey k2(k.weight, I2);
      std::int32_t v = k.weight.vp();
      std::uint64_t c2 = c;
      if (v > 0 && v != VP_INF) c2 = c2 * (pow_u64(ctx.p, (std::uint32_t)v) % modulus_of(k2)) % modulus_of(k2);
      r.add_term(k2, c2);
    }
    return r;
  }

  /// V, termwise (level m -> m+1): e(V eta, a/p, I) / e(p eta, a/p, I) /
  /// e(eta, a/p, I) per the sign of v_p(a) and emptiness of I_0.
  /// On W(F_p), V(eta) = p eta.
  DrwElement verschiebung_op() const {
    DrwElement r(ctx.with_len(ctx.m + 1), degree);
    for (auto& [k, c] : terms) {
      BasicDiffKey k2(k.weight.div_p(), k.parts);
      std::int32_t v = k.weight.vp();
      std::uint64_t mod2 = r.modulus_of(k2);
      std::uint64_t c2;
      if (v != VP_INF && v > 0) c2 = (c % mod2) * (ctx.p % mod2) % mod2;        // V(eta) = p eta
      else if (k.i0_empty()) c2 = (c % mod2) * (ctx.p % mod2) % mod2;           // e(p eta, a/p, I)
      else c2 = c % mod2;                                                        // e(eta, a/p, I)
      r.add_term(k2, c2);
    }
    return r;
  }

  void require_compatible(const DrwElement& o) const {
    if (!(ctx == o.ctx)) throw ContextMismatch();
    if (degree != o.degree) throw DegreeMismatch();
  }

  // fracture-class projectors of the canonical decomposition:
  // integral (u(a) = 0), fractional (u(a) != 0), pure fractional
  // (additionally I_0 nonempty) and the d-image sector (I_0 empty).
  DrwElement filtered(bool integral_sector, bool pure_only = false, bool d_image_only = false) const {
    DrwElement r(ctx, degree);
    for (auto& [k, c] : terms) {
      bool is_int = k.weight.u() == 0;
      if (is_int != integral_sector) continue;
      if (!is_int) {
        bool i0 = k.i0_empty();
        if (pure_only && i0) continue;
        if (d_image_only && !i0) continue;
      }
      r.add_term(k, c);
    }
    return r;
  }
  DrwElement integral_part() const { return filtered(true); }
  DrwElement fractional_part() const { return filtered(false); }
  DrwElement pure_fractional_part() const { return filtered(false, true); }
  DrwElement d_image_part() const { return filtered(false, false, true); }
};

// Single-term constructor; eta must be reduced mod p^(m-u(a)).
inline DrwElement make_e(std::uint64_t eta, const BasicDiffKey& key, const RingContext& ctx) {
  DrwElement r(ctx, key.degree());
  std::uint64_t mod = pow_u64(ctx.p, coeff_modulus(key, ctx.m));
  if (mod > 1 && eta >= mod) throw CoefficientOutOfRange("make_e: eta not reduced");
  r.add_term(key, eta);
  return r;
}

// Degree-0 canonical form of a Witt vector: peel V-adically, one canonical
// term per monomial per level.  Exact at truncation m.
inline DrwElement from_witt(const WittVec& w) {
  const RingContext& c = w.ctx;
  DrwElement out(c, 0);
  WittVec rem = w;
  for (std::uint32_t u = 0; u < c.m; ++u) {
    const PolyFp& wu = rem.coords[u];
    if (wu.is_zero()) continue;
    WittVec peel = WittVec::zero(c);
    for (auto& [e, coef] : wu.terms) {
      // term V^u([coef * X^e])
      WeightFn a(c.p, c.n);
      for (std::uint32_t i = 0; i < c.n; ++i) a.entries[i] = PadicFrac(e[i], u, c.p);
      BasicDiffKey key(a, {});
      std::uint32_t ua = a.u();                    // u - v_p(e) clamped at 0
      std::uint32_t delta = u - ua;                // extra V-depth absorbed into eta
      std::uint32_t kmod = coeff_modulus(key, c.m);
      std::uint64_t pk = pow_u64(c.p, kmod);
      std::uint64_t eta = teichmuller_residue(coef, c.p, kmod);
      eta = eta * (pow_u64(c.p, std::min(delta, kmod)) % std::max<std::uint64_t>(pk, 1)) % std::max<std::uint64_t>(pk, 1);
      if (delta >= kmod) eta = 0;
      out.add_term(key, eta);
      WittVec t = WittVec::teichmuller(c.with_len(c.m - u), PolyFp::monomial(c.p, e, coef));
      for (std::uint32_t s = 0; s < u; ++s) t = t.verschiebung();
      peel = peel + t;
    }
    rem = rem - peel;
  }
  if (!rem.is_zero()) throw NonIntegralResult("from_witt: peeling failed");
  return out;
}

// Inverse bridge: evaluate a degree-0 element as a Witt vector.
inline WittVec to_witt(const DrwElement& x) {
  if (x.degree != 0) throw DegreeMismatch("to_witt: degree > 0");
  const RingContext& c = x.ctx;
  WittVec acc = WittVec::zero(c);
  for (auto& [k, eta] : x.terms) {
    std::uint32_t u = k.weight.u();
    Expo e(c.n, 0);
    for (std::uint32_t i = 0; i < c.n; ++i) {
      PadicFrac f = k.weight.entries[i].mul_p(c.p, u);  // p^u * a_i, integral
      if (!f.is_integral()) throw NonIntegralResult("to_witt: weight depth");
      e[i] = (std::uint32_t)f.num;
    }
    WittVec t = WittVec::teichmuller(c.with_len(c.m - u), PolyFp::monomial(c.p, e));
    t = t.scaled_int(mpz_class((unsigned long)eta));
    for (std::uint32_t s = 0; s < u; ++s) t = t.verschiebung();
    acc = acc + t;
  }
  return acc;
}

inline WittVec scaled_int(const WittVec& w, const mpz_class& z) { return w.scaled_int(z); }

}  // namespace wdrw
