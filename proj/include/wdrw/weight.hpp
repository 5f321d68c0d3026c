#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "wdrw/context.hpp"
#include "wdrw/poly.hpp"

namespace wdrw {

constexpr std::int32_t VP_INF = std::numeric_limits<std::int32_t>::max();

/// One entry of a weight function: num / p^pden, normalized so that p never
/// divides both num and p^pden (num == 0 forces pden == 0).
struct PadicFrac {
  std::uint64_t num = 0;
  std::uint32_t pden = 0;

  PadicFrac() = default;
  PadicFrac(std::uint64_t nu, std::uint32_t de, std::uint32_t p) : num(nu), pden(de) { normalize(p); }

  void normalize(std::uint32_t p) {
    if (num == 0) {
      pden = 0;
      return;
    }
    while (pden > 0 && num % p == 0) {
      num /= p;
      --pden;
    }
  }
  bool is_zero() const { return num == 0; }
  bool is_integral() const { return pden == 0; }
  std::int32_t vp(std::uint32_t p) const {
    if (num == 0) return VP_INF;
    if (pden > 0) return -(std::int32_t)pden;
    std::int32_t v = 0;
    std::uint64_t x = num;
    while (x % p == 0) {
      x /= p;
      ++v;
    }
    return v;
  }
  mpq_class value(std::uint32_t p) const {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), p, pden);
    mpq_class q(mpz_from_u64(num), den);
    q.canonicalize();
    return q;
  }
  PadicFrac div_p(std::uint32_t p) const { return PadicFrac(num, pden + 1, p); }
  PadicFrac mul_p(std::uint32_t p, std::uint32_t k = 1) const {
    if (num == 0) return *this;
    if (pden >= k) return PadicFrac(num, pden - k, p);
    PadicFrac r(num * pow_u64(p, k - pden), 0, p);
    return r;
  }
  bool operator==(const PadicFrac& o) const { return num == o.num && pden == o.pden; }
  // exact compare of num/p^pden vs o (same p assumed)
  int cmp(const PadicFrac& o, std::uint32_t p) const {
    std::uint32_t d = std::max(pden, o.pden);
    mpz_class l = mpz_from_u64(num), r = mpz_from_u64(o.num);
    mpz_class pl, pr;
    mpz_ui_pow_ui(pl.get_mpz_t(), p, d - pden);
    mpz_ui_pow_ui(pr.get_mpz_t(), p, d - o.pden);
    l *= pl;
    r *= pr;
    return ::cmp(l, r);
  }
  static mpz_class mpz_from_u64(std::uint64_t x) {
    mpz_class hi((unsigned long)(x >> 32));
    return (hi << 32) + mpz_class((unsigned long)(x & 0xffffffffu));
  }
};

/// Weight function a: [1,n] -> N[1/p].
class WeightFn {
 public:
  std::uint32_t p = 2;
  std::vector<PadicFrac> entries;

  WeightFn() = default;
  WeightFn(std::uint32_t p_, std::uint32_t n) : p(p_), entries(n) {}

  std::uint32_t n() const { return (std::uint32_t)entries.size(); }
  bool is_zero() const {
    for (auto& e : entries)
      if (!e.is_zero()) return false;
    return true;
  }
  bool is_integral() const {
    for (auto& e : entries)
      if (!e.is_integral()) return false;
    return true;
  }
  bool operator==(const WeightFn& o) const { return entries == o.entries; }

  static WeightFn indicator(std::uint32_t p, std::uint32_t n, const std::vector<std::uint32_t>& I) {
    WeightFn a(p, n);
    for (auto i : I) a.entries.at(i) = PadicFrac(1, 0, p);
    return a;
  }
  static WeightFn from_expo(std::uint32_t p, const std::vector<std::uint32_t>& e) {
    WeightFn a(p, (std::uint32_t)e.size());
    for (size_t i = 0; i < e.size(); ++i) a.entries[i] = PadicFrac(e[i], 0, p);
    return a;
  }

  std::vector<std::uint32_t> support() const {
    std::vector<std::uint32_t> s;
    for (std::uint32_t i = 0; i < n(); ++i)
      if (!entries[i].is_zero()) s.push_back(i);
    return s;
  }
  std::int32_t vp() const {
    std::int32_t v = VP_INF;
    for (auto& e : entries) v = std::min(v, e.vp(p));
    return v;
  }
  std::uint32_t u() const {
    std::int32_t v = vp();
    return (v == VP_INF || v >= 0) ? 0 : (std::uint32_t)(-v);
  }
  mpq_class total() const {  // |a|
    mpq_class s = 0;
    for (auto& e : entries) s += e.value(p);
    return s;
  }
  WeightFn restrict_to(const std::vector<std::uint32_t>& J) const {
    WeightFn a(p, n());
    for (auto j : J) a.entries[j] = entries[j];
    return a;
  }
  WeightFn div_p() const {
    WeightFn a(p, n());
    for (std::uint32_t i = 0; i < n(); ++i) a.entries[i] = entries[i].div_p(p);
    return a;
  }
  WeightFn mul_p(std::uint32_t k = 1) const {
    WeightFn a(p, n());
    for (std::uint32_t i = 0; i < n(); ++i) a.entries[i] = entries[i].mul_p(p, k);
    return a;
  }
  WeightFn operator+(const WeightFn& o) const {
    WeightFn a(p, n());
    for (std::uint32_t i = 0; i < n(); ++i) {
      const PadicFrac &x = entries[i], &y = o.entries[i];
      std::uint32_t d = std::max(x.pden, y.pden);
      std::uint64_t nu = x.num * pow_u64(p, d - x.pden) + y.num * pow_u64(p, d - y.pden);
      a.entries[i] = PadicFrac(nu, d, p);
    }
    return a;
  }

  // Total order of eq-style (valuation, index): i precedes i' iff
  // vp(a_i) < vp(a_i') or equal valuations and i <= i'.
  bool order_leq(std::uint32_t i, std::uint32_t ip) const {
    if (entries.at(i).is_zero() || entries.at(ip).is_zero()) throw IndexOutsideSupport();
    std::int32_t vi = entries[i].vp(p), vj = entries[ip].vp(p);
    if (vi != vj) return vi < vj;
    return i <= ip;
  }
  bool order_less(std::uint32_t i, std::uint32_t ip) const { return i != ip && order_leq(i, ip); }

  std::vector<std::uint32_t> support_sorted() const {  // increasing for the order above
    auto s = support();
    std::sort(s.begin(), s.end(), [&](std::uint32_t a, std::uint32_t b) { return order_less(a, b); });
    return s;
  }
  std::uint32_t min_index() const {
    auto s = support_sorted();
    if (s.empty()) throw IndexOutsideSupport("min of empty support");
    return s[0];
  }

  // deterministic comparison used for normal-form term ordering
  int cmp(const WeightFn& o) const {
    if (n() != o.n()) return n() < o.n() ? -1 : 1;
    for (std::uint32_t i = 0; i < n(); ++i) {
      int c = entries[i].cmp(o.entries[i], p);
      if (c) return c;
    }
    return 0;
  }
};

/// (weight, partition) pair indexing a basic Witt differential e(eta, a, I).
/// parts is a subset of Supp(weight) stored increasingly for the support
/// order; the degree of the differential is parts.size().
struct BasicDiffKey {
  WeightFn weight;
  std::vector<std::uint32_t> parts;

  BasicDiffKey() = default;
  BasicDiffKey(WeightFn a, std::vector<std::uint32_t> I) : weight(std::move(a)), parts(std::move(I)) {
    auto supp = weight.support();
    for (auto i : parts)
      if (!std::binary_search(supp.begin(), supp.end(), i)) throw IndexOutsideSupport("partition outside support");
    std::sort(parts.begin(), parts.end(),
              [&](std::uint32_t x, std::uint32_t y) { return weight.order_less(x, y); });
  }

  std::uint32_t degree() const { return (std::uint32_t)parts.size(); }
  bool operator==(const BasicDiffKey& o) const { return weight == o.weight && parts == o.parts; }

  // I_0 .. I_#I: I_l = {i in Supp | i_l <= i < i_(l+1)} for the support order;
  // each support index goes to the last part not after it.
  std::vector<std::vector<std::uint32_t>> segments() const {
    auto supp = weight.support_sorted();
    std::vector<std::vector<std::uint32_t>> seg(parts.size() + 1);
    for (auto i : supp) {
      std::size_t slot = 0;
      for (std::size_t k = 0; k < parts.size(); ++k)
        if (parts[k] == i || weight.order_less(parts[k], i)) slot = k + 1;
      seg[slot].push_back(i);
    }
    return seg;
  }
  bool i0_empty() const {
    if (parts.empty()) return weight.support().empty() ? true : false;
    // I_0 empty iff min(a) is the first part
    return weight.min_index() == parts[0];
  }
  // integral iff u(a)=0; pure fractional iff u(a)!=0 and I_0 != empty
  bool integral() const { return weight.u() == 0; }
  bool pure_fractional() const { return weight.u() != 0 && !i0_empty(); }

  int cmp(const BasicDiffKey& o) const {
    std::uint32_t ua = weight.u(), ub = o.weight.u();
    if (ua != ub) return ua < ub ? -1 : 1;
    int c = ::cmp(weight.total(), o.weight.total());
    if (c) return c;
    c = weight.cmp(o.weight);
    if (c) return c;
    if (parts != o.parts) return parts < o.parts ? -1 : 1;
    return 0;
  }
};

struct KeyLess {
  bool operator()(const BasicDiffKey& a, const BasicDiffKey& b) const { return a.cmp(b) < 0; }
};

// Modulus exponent of the canonical coefficient at truncation m: the term
// survives an element of W_m Omega iff eta != 0 mod p^(m - u(a)).
inline std::uint32_t coeff_modulus(const BasicDiffKey& key, std::uint32_t m) {
  std::uint32_t u = key.weight.u();
  return m > u ? m - u : 0;
}

namespace detail {
inline void subsets_of_size(std::uint32_t n, std::uint32_t t, const std::vector<std::uint32_t>& pool,
                            std::vector<std::vector<std::uint32_t>>& out) {
  std::vector<std::uint32_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == t) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  (void)n;
  rec(rec, 0);
}
}  // namespace detail

// H(t): the keys of prod_{i in I} d[X_i], one per subset I of size t.
inline std::vector<BasicDiffKey> enumerate_H(std::uint32_t t, const RingContext& ctx) {
  std::vector<std::uint32_t> pool(ctx.n);
  for (std::uint32_t i = 0; i < ctx.n; ++i) pool[i] = i;
  std::vector<std::vector<std::uint32_t>> subs;
  detail::subsets_of_size(ctx.n, t, pool, subs);
  std::vector<BasicDiffKey> out;
  for (auto& I : subs) out.emplace_back(WeightFn::indicator(ctx.p, ctx.n, I), I);
  return out;
}

// G(t) within bounds: keys e(1, (a + p^u chi_J)/p^u, I u J) with u >= 1,
// v_p(a) = 0, a_i < p^u, I_0 != empty, J disjoint from Supp(a),
// #I + #J = t, |a| <= max_weight.  G(-1) is empty.
inline std::vector<BasicDiffKey> enumerate_G(std::int64_t t, const RingContext& ctx, std::uint32_t max_u,
                                             std::uint64_t max_weight) {
  std::vector<BasicDiffKey> out;
  if (t < 0) return out;
  for (std::uint32_t u = 1; u <= max_u; ++u) {
    std::uint64_t pu = pow_u64(ctx.p, u);
    // integral vectors a with entries < p^u, |a| <= max_weight, by total then lex
    std::vector<Expo> weights;
    Expo cur(ctx.n, 0);
    auto rec = [&](auto&& self, std::uint32_t idx, std::uint64_t left) -> void {
      if (idx == ctx.n) {
        weights.push_back(cur);
        return;
      }
      for (std::uint64_t v = 0; v < pu && v <= left; ++v) {
        cur[idx] = (std::uint32_t)v;
        self(self, idx + 1, left - v);
      }
      cur[idx] = 0;
    };
    rec(rec, 0, max_weight);
    std::sort(weights.begin(), weights.end(), [](const Expo& a, const Expo& b) {
      auto ta = expo_total(a), tb = expo_total(b);
      if (ta != tb) return ta < tb;
      return a < b;
    });
    for (auto& e : weights) {
      WeightFn a = WeightFn::from_expo(ctx.p, e);
      if (a.vp() != 0) continue;  // excludes a = 0 as well
      auto supp = a.support();
      std::vector<std::uint32_t> co;
      for (std::uint32_t i = 0; i < ctx.n; ++i)
        if (std::find(supp.begin(), supp.end(), i) == supp.end()) co.push_back(i);
      for (std::uint32_t tI = 0; tI <= (std::uint32_t)t; ++tI) {
        std::uint32_t tJ = (std::uint32_t)t - tI;
        std::vector<std::vector<std::uint32_t>> Is, Js;
        detail::subsets_of_size(ctx.n, tI, supp, Is);
        detail::subsets_of_size(ctx.n, tJ, co, Js);
        for (auto& I : Is) {
          BasicDiffKey probe(a, I);
          if (probe.i0_empty()) continue;  // needs I_0 != empty w.r.t. a
          for (auto& J : Js) {
            WeightFn b = (a + WeightFn::indicator(ctx.p, ctx.n, J).mul_p(u)).div_p();
            for (std::uint32_t k = 1; k < u; ++k) b = b.div_p();
            std::vector<std::uint32_t> IJ = I;
            IJ.insert(IJ.end(), J.begin(), J.end());
            out.emplace_back(std::move(b), std::move(IJ));
          }
        }
      }
    }
  }
  return out;
}

/// Rebar cage: index sets B(u,m) organizing the mod-p splitting of the base.
/// Only enumeration is exposed; labels are powers of the distinguished
/// element (T-exponent for the Laurent instance, always 0 for the perfect
/// one, i.e. the label 1).
struct RebarCage {
  enum Kind { Perfect, Laurent } kind = Perfect;
  std::uint32_t p = 2;

  static RebarCage perfect(std::uint32_t p) { return RebarCage{Perfect, p}; }
  static RebarCage laurent(std::uint32_t p) { return RebarCage{Laurent, p}; }

  std::vector<std::uint64_t> labels(std::uint32_t u, std::uint32_t m) const {
    std::vector<std::uint64_t> out;
    if (kind == Perfect) {
      if (m == 0) out.push_back(0);
      return out;
    }
    if (m == 0) {
      for (std::uint64_t i = 0; i < pow_u64(p, u); ++i) out.push_back(i);
    } else {
      std::uint64_t pm = pow_u64(p, m);
      for (std::uint64_t i = 0; i < pow_u64(p, u + m); ++i)
        if (i % pm != 0) out.push_back(i);
    }
    return out;
  }
};

}  // namespace wdrw
