#pragma once

#include <map>
#include <vector>

#include "wdrw/poly.hpp"
#include "wdrw/witt.hpp"

namespace wdrw {

/// Element of the localized polynomial ring F_p[X]_<P>: num / P^den.
struct LocPoly {
  PolyFp num;
  std::uint32_t den = 0;
};

/// The localized ring F_p[X_1..X_n]_<P>; P = 1 gives the plain polynomial
/// ring.  Ring operations normalize by cancelling P-powers when exact.
struct LocRing {
  std::uint32_t p = 2, n = 0;
  PolyFp P;

  using Elem = LocPoly;

  LocRing() = default;
  LocRing(std::uint32_t p_, std::uint32_t n_, PolyFp loc) : p(p_), n(n_), P(std::move(loc)) {
    if (P.is_zero()) throw MalformedTable("localizer must be nonzero");
  }
  static LocRing plain(std::uint32_t p, std::uint32_t n) { return LocRing(p, n, PolyFp::constant(p, n, 1)); }

  bool trivial_localizer() const { return P == PolyFp::constant(p, n, 1); }

  Elem normalize(Elem e) const {
    PolyFp q(p, n);
    while (e.den > 0 && e.num.divexact(P, q)) {
      e.num = q;
      --e.den;
    }
    if (e.num.is_zero()) e.den = 0;
    return e;
  }
  Elem zero() const { return Elem{PolyFp(p, n), 0}; }
  Elem one() const { return Elem{PolyFp::constant(p, n, 1), 0}; }
  Elem from_fp(std::uint64_t c) const { return Elem{PolyFp::constant(p, n, c), 0}; }
  Elem from_poly(PolyFp f) const { return Elem{std::move(f), 0}; }
  Elem add(const Elem& a, const Elem& b) const {
    std::uint32_t d = std::max(a.den, b.den);
    return normalize(Elem{a.num * P.pow(d - a.den) + b.num * P.pow(d - b.den), d});
  }
  Elem neg(const Elem& a) const { return Elem{-a.num, a.den}; }
  Elem mul(const Elem& a, const Elem& b) const { return normalize(Elem{a.num * b.num, a.den + b.den}); }
  Elem pow(const Elem& a, std::uint64_t k) const {
    Elem r = one();
    Elem b = a;
    while (k) {
      if (k & 1) r = mul(r, b);
      b = mul(b, b);
      k >>= 1;
    }
    return r;
  }
  bool is_zero(const Elem& a) const { return a.num.is_zero(); }
  bool eq(const Elem& a, const Elem& b) const {
    // cross-multiply; P is a nonzerodivisor
    return (a.num * P.pow(b.den)) == (b.num * P.pow(a.den));
  }
  // p-power Frobenius of the ring
  Elem frob(const Elem& a, std::uint32_t times = 1) const {
    Elem r = a;
    for (std::uint32_t i = 0; i < times; ++i) r = Elem{r.num.pow(p), r.den * p};
    return normalize(r);
  }
};

/// Finite free algebra over a localized polynomial ring, presented by a
/// basis s_1 = 1, s_2, ..., s_r and a multiplication table
/// s_i s_j = sum_k c[i][j][k] s_k.
struct TableAlgebra {
  LocRing base;
  std::uint32_t rank = 1;
  std::vector<std::vector<std::vector<LocPoly>>> table;  // [i][j] -> coeff vector

  using Elem = std::vector<LocPoly>;  // coordinates in the basis

  Elem zero() const { return Elem(rank, base.zero()); }
  Elem one() const {
    Elem e = zero();
    e[0] = base.one();
    return e;
  }
  Elem basis(std::uint32_t i) const {
    Elem e = zero();
    e.at(i) = base.one();
    return e;
  }
  Elem from_fp(std::uint64_t c) const {
    Elem e = zero();
    e[0] = base.from_fp(c);
    return e;
  }
  Elem from_base(const LocPoly& q) const {
    Elem e = zero();
    e[0] = q;
    return e;
  }
  Elem add(const Elem& a, const Elem& b) const {
    Elem r = zero();
    for (std::uint32_t i = 0; i < rank; ++i) r[i] = base.add(a[i], b[i]);
    return r;
  }
  Elem neg(const Elem& a) const {
    Elem r = a;
    for (auto& x : r) x = base.neg(x);
    return r;
  }
  Elem scale(const LocPoly& q, const Elem& a) const {
    Elem r = zero();
    for (std::uint32_t i = 0; i < rank; ++i) r[i] = base.mul(q, a[i]);
    return r;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    Elem r = zero();
    for (std::uint32_t i = 0; i < rank; ++i)
      for (std::uint32_t j = 0; j < rank; ++j) {
        LocPoly c = base.mul(a[i], b[j]);
        if (base.is_zero(c)) continue;
        for (std::uint32_t k = 0; k < rank; ++k) r[k] = base.add(r[k], base.mul(c, table[i][j][k]));
      }
    return r;
  }
  Elem pow(const Elem& a, std::uint64_t k) const {
    Elem r = one(), b = a;
    while (k) {
      if (k & 1) r = mul(r, b);
      b = mul(b, b);
      k >>= 1;
    }
    return r;
  }
  bool is_zero(const Elem& a) const {
    for (auto& x : a)
      if (!base.is_zero(x)) return false;
    return true;
  }
  bool eq(const Elem& a, const Elem& b) const {
    for (std::uint32_t i = 0; i < rank; ++i)
      if (!base.eq(a[i], b[i])) return false;
    return true;
  }

  void validate() const {
    if (rank == 0 || table.size() != rank) throw MalformedTable("table size");
    for (auto& row : table) {
      if (row.size() != rank) throw MalformedTable("table row size");
      for (auto& cell : row)
        if (cell.size() != rank) throw MalformedTable("table cell size");
    }
    // unital in the first slot, commutative, associative on generators
    for (std::uint32_t j = 0; j < rank; ++j)
      if (!eq(mul(basis(0), basis(j)), basis(j))) throw MalformedTable("s_1 is not a unit");
    for (std::uint32_t i = 0; i < rank; ++i)
      for (std::uint32_t j = i; j < rank; ++j) {
        if (!eq(mul(basis(i), basis(j)), mul(basis(j), basis(i)))) throw MalformedTable("table not commutative");
        for (std::uint32_t k = 0; k < rank; ++k)
          if (!eq(mul(mul(basis(i), basis(j)), basis(k)), mul(basis(i), mul(basis(j), basis(k)))))
            throw MalformedTable("table not associative");
      }
  }
};

/// Universal Witt sum/product/negation polynomials mod p (the base rings all
/// have characteristic p), computed once per (p, m) by ghost inversion over
/// Z[a_0..a_{m-1}, b_0..b_{m-1}].
struct WittLaws {
  std::vector<PolyFp> sum;   // in 2m variables
  std::vector<PolyFp> prod;  // in 2m variables
  std::vector<PolyFp> neg;   // in m variables
};

inline const WittLaws& witt_laws(std::uint32_t p, std::uint32_t m) {
  static std::map<std::pair<std::uint32_t, std::uint32_t>, WittLaws> cache;
  auto it = cache.find({p, m});
  if (it != cache.end()) return it->second;
  WittLaws laws;
  std::vector<PolyZ> avars, bvars, abvars;
  for (std::uint32_t i = 0; i < m; ++i) {
    avars.push_back(PolyZ::variable(2 * m, i));
    bvars.push_back(PolyZ::variable(2 * m, m + i));
    abvars.push_back(PolyZ::variable(m, i));
  }
  auto ga = ghost(avars, p), gb = ghost(bvars, p), g1 = ghost(abvars, p);
  std::vector<PolyZ> gsum, gprod, gneg;
  for (std::uint32_t u = 0; u < m; ++u) {
    gsum.push_back(ga[u] + gb[u]);
    gprod.push_back(ga[u] * gb[u]);
    gneg.push_back(-g1[u]);
  }
  for (auto& q : unghost(gsum, p)) laws.sum.push_back(q.mod_p(p));
  for (auto& q : unghost(gprod, p)) laws.prod.push_back(q.mod_p(p));
  for (auto& q : unghost(gneg, p)) laws.neg.push_back(q.mod_p(p));
  return cache.emplace(std::make_pair(p, m), std::move(laws)).first->second;
}

/// Truncated Witt vector over an arbitrary F_p-algebra given by ring
/// operations; addition and multiplication evaluate the universal laws, the
/// Frobenius is coordinatewise p-th power (characteristic p).
template <class Ring>
struct GenWitt {
  using Elem = typename Ring::Elem;
  std::uint32_t m = 0;
  std::vector<Elem> coords;

  static GenWitt zero(const Ring& R, std::uint32_t m) {
    GenWitt w;
    w.m = m;
    w.coords.assign(m, R.zero());
    return w;
  }
  static GenWitt teichmuller(const Ring& R, std::uint32_t m, const Elem& x) {
    GenWitt w = zero(R, m);
    if (m > 0) w.coords[0] = x;
    return w;
  }

  bool is_zero(const Ring& R) const {
    for (auto& c : coords)
      if (!R.is_zero(c)) return false;
    return true;
  }
};

template <class Ring>
typename Ring::Elem eval_poly_fp(const Ring& R, const PolyFp& f, const std::vector<typename Ring::Elem>& vars) {
  auto acc = R.zero();
  for (auto& [e, c] : f.terms) {
    auto t = R.from_fp(c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = R.mul(t, R.pow(vars[i], e[i]));
    acc = R.add(acc, t);
  }
  return acc;
}

template <class Ring>
GenWitt<Ring> gw_add(const Ring& R, std::uint32_t p, const GenWitt<Ring>& x, const GenWitt<Ring>& y) {
  std::uint32_t m = std::min(x.m, y.m);
  const WittLaws& laws = witt_laws(p, m);
  std::vector<typename Ring::Elem> vars;
  for (std::uint32_t i = 0; i < m; ++i) vars.push_back(x.coords[i]);
  for (std::uint32_t i = 0; i < m; ++i) vars.push_back(y.coords[i]);
  GenWitt<Ring> r = GenWitt<Ring>::zero(R, m);
  for (std::uint32_t u = 0; u < m; ++u) r.coords[u] = eval_poly_fp(R, laws.sum[u], vars);
  return r;
}

template <class Ring>
GenWitt<Ring> gw_mul(const Ring& R, std::uint32_t p, const GenWitt<Ring>& x, const GenWitt<Ring>& y) {
  std::uint32_t m = std::min(x.m, y.m);
  const WittLaws& laws = witt_laws(p, m);
  std::vector<typename Ring::Elem> vars;
  for (std::uint32_t i = 0; i < m; ++i) vars.push_back(x.coords[i]);
  for (std::uint32_t i = 0; i < m; ++i) vars.push_back(y.coords[i]);
  GenWitt<Ring> r = GenWitt<Ring>::zero(R, m);
  for (std::uint32_t u = 0; u < m; ++u) r.coords[u] = eval_poly_fp(R, laws.prod[u], vars);
  return r;
}

template <class Ring>
GenWitt<Ring> gw_neg(const Ring& R, std::uint32_t p, const GenWitt<Ring>& x) {
  const WittLaws& laws = witt_laws(p, x.m);
  GenWitt<Ring> r = GenWitt<Ring>::zero(R, x.m);
  for (std::uint32_t u = 0; u < x.m; ++u) r.coords[u] = eval_poly_fp(R, laws.neg[u], x.coords);
  return r;
}

template <class Ring>
GenWitt<Ring> gw_sub(const Ring& R, std::uint32_t p, const GenWitt<Ring>& x, const GenWitt<Ring>& y) {
  return gw_add(R, p, x, gw_neg(R, p, y));
}

template <class Ring>
GenWitt<Ring> gw_verschiebung(const Ring& R, const GenWitt<Ring>& x) {
  GenWitt<Ring> r = GenWitt<Ring>::zero(R, x.m + 1);
  for (std::uint32_t u = 0; u < x.m; ++u) r.coords[u + 1] = x.coords[u];
  return r;
}

template <class Ring>
std::optional<std::uint32_t> gw_vV(const Ring& R, const GenWitt<Ring>& x) {
  for (std::uint32_t u = 0; u < x.m; ++u)
    if (!R.is_zero(x.coords[u])) return u;
  return std::nullopt;
}

}  // namespace wdrw
