#pragma once

#include <optional>
#include <vector>

#include "wdrw/context.hpp"
#include "wdrw/poly.hpp"

namespace wdrw {

// Ghost components g_u = sum_{i<=u} p^i x_i^{p^(u-i)} of a list of integer
// lifts, padded with zeros to length len.
inline std::vector<PolyZ> ghost(std::vector<PolyZ> lifts, std::uint32_t p, std::uint32_t len = 0) {
  if (len == 0) len = (std::uint32_t)lifts.size();
  std::uint32_t n = lifts.empty() ? 0 : lifts[0].n;
  lifts.resize(len, PolyZ(n));
  std::vector<PolyZ> g;
  g.reserve(len);
  mpz_class pi;
  for (std::uint32_t u = 0; u < len; ++u) {
    PolyZ gu(n);
    for (std::uint32_t i = 0; i <= u; ++i) {
      mpz_ui_pow_ui(pi.get_mpz_t(), p, i);
      gu = gu + lifts[i].pow(pow_u64(p, u - i)).scaled(pi);
    }
    g.push_back(std::move(gu));
  }
  return g;
}

// Inverse of ghost over exact integers.  Throws NonIntegralGhost when the
// input is not a Witt point.
inline std::vector<PolyZ> unghost(const std::vector<PolyZ>& g, std::uint32_t p) {
  std::vector<PolyZ> x;
  x.reserve(g.size());
  mpz_class pi;
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    PolyZ acc = g[u];
    for (std::uint32_t i = 0; i < u; ++i) {
      mpz_ui_pow_ui(pi.get_mpz_t(), p, i);
      acc = acc - x[i].pow(pow_u64(p, u - i)).scaled(pi);
    }
    x.push_back(acc.divexact_p(p, u));
  }
  return x;
}

/// Truncated Witt vector in W_m(F_p[X_1..X_n]); coords[i] is the i-th Witt
/// coordinate.  Immutable by convention after construction.
class WittVec {
 public:
  RingContext ctx;
  std::vector<PolyFp> coords;  // length ctx.m

  WittVec() = default;
  explicit WittVec(RingContext c) : ctx(c), coords(c.m, PolyFp(c.p, c.n)) {}
  WittVec(RingContext c, std::vector<PolyFp> v) : ctx(c), coords(std::move(v)) {
    if (coords.size() != ctx.m) throw Error("WittVec: length mismatch");
    for (auto& w : coords)
      if (w.n != ctx.n || w.p != ctx.p) throw ContextMismatch("WittVec: coordinate ring mismatch");
  }

  static WittVec zero(RingContext c) { return WittVec(c); }
  static WittVec teichmuller(RingContext c, const PolyFp& r) {
    if (r.n != c.n || r.p != c.p) throw ContextMismatch("teichmuller: ring mismatch");
    WittVec w(c);
    if (c.m > 0) w.coords[0] = r;
    return w;
  }
  // Witt vector of an ordinary integer (constant ghost).
  static WittVec from_integer(RingContext c, const mpz_class& z) {
    std::vector<PolyZ> g(c.m, PolyZ::constant(c.n, z));
    auto x = unghost(g, c.p);
    std::vector<PolyFp> v;
    v.reserve(c.m);
    for (auto& q : x) v.push_back(q.mod_p(c.p));
    return WittVec(c, std::move(v));
  }

  bool is_zero() const {
    for (auto& w : coords)
      if (!w.is_zero()) return false;
    return true;
  }
  bool operator==(const WittVec& o) const { return ctx == o.ctx && coords == o.coords; }

  std::vector<PolyZ> lifts() const {
    std::vector<PolyZ> v;
    v.reserve(coords.size());
    for (auto& w : coords) v.push_back(lift(w));
    return v;
  }

  WittVec operator+(const WittVec& o) const { return combine(o, false); }
  WittVec operator*(const WittVec& o) const { return combine(o, true); }
  WittVec operator-() const {
    if (ctx.m == 0) return *this;
    auto g = ghost(lifts(), ctx.p);
    for (auto& gu : g) gu = -gu;
    return from_ghost(ctx, g);
  }
  WittVec operator-(const WittVec& o) const { return *this + (-o); }

  // V: W_m -> W_{m+1} prepends a zero coordinate.
  WittVec verschiebung() const {
    RingContext c2 = ctx.with_len(ctx.m + 1);
    std::vector<PolyFp> v;
    v.reserve(c2.m);
    v.push_back(PolyFp(ctx.p, ctx.n));
    for (auto& w : coords) v.push_back(w);
    return WittVec(c2, std::move(v));
  }

  // F: W_m -> W_{m-1}; ghost components shift down one slot.
  WittVec frobenius() const {
    if (ctx.m == 0) throw LengthUnderflow();
    RingContext c2 = ctx.with_len(ctx.m - 1);
    auto g = ghost(lifts(), ctx.p);
    g.erase(g.begin());
    return from_ghost(c2, g);
  }

  WittVec truncated(std::uint32_t m2) const {
    if (m2 > ctx.m) throw LengthUnderflow("truncated: target longer than source");
    std::vector<PolyFp> v(coords.begin(), coords.begin() + m2);
    return WittVec(ctx.with_len(m2), std::move(v));
  }

  // V-adic pseudovaluation: largest u with coords 0..u-1 zero; nullopt = +inf.
  std::optional<std::uint32_t> vV() const {
    std::uint32_t u = 0;
    for (auto& w : coords) {
      if (!w.is_zero()) return u;
      ++u;
    }
    return std::nullopt;
  }

  WittVec scaled_int(const mpz_class& z) const { return *this * from_integer(ctx, z); }

 private:
  static WittVec from_ghost(RingContext c, const std::vector<PolyZ>& g) {
    auto x = unghost(g, c.p);
    std::vector<PolyFp> v;
    v.reserve(c.m);
    for (auto& q : x) v.push_back(q.mod_p(c.p));
    return WittVec(c, std::move(v));
  }
  WittVec combine(const WittVec& o, bool mul) const {
    require_same_ring(ctx, o.ctx);
    std::uint32_t m2 = std::min(ctx.m, o.ctx.m);
    RingContext c2 = ctx.with_len(m2);
    if (m2 == 0) return WittVec(c2);
    auto ga = ghost(truncated(m2).lifts(), ctx.p);
    auto gb = ghost(o.truncated(m2).lifts(), ctx.p);
    for (std::uint32_t u = 0; u < m2; ++u) ga[u] = mul ? ga[u] * gb[u] : ga[u] + gb[u];
    return from_ghost(c2, ga);
  }
};

inline WittVec operator*(const PolyFp& r, const WittVec& w) {  // [r] * w
  return WittVec::teichmuller(w.ctx, r) * w;
}

// Teichmuller representative of c in W(F_p) = Z_p, reduced mod p^k:
// omega(c) = c^(p^(k-1)) mod p^k.
inline std::uint64_t teichmuller_residue(std::uint64_t c, std::uint32_t p, std::uint32_t k) {
  if (k == 0) return 0;
  std::uint64_t pk = pow_u64(p, k);
  std::uint64_t r = 1, b = c % pk, e = pow_u64(p, k - 1);
  while (e) {
    if (e & 1) r = (r * b) % pk;
    b = (b * b) % pk;
    e >>= 1;
  }
  return r;
}

}  // namespace wdrw
