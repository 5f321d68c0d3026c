#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <vector>

#include "wdrw/context.hpp"
#include "wdrw/errors.hpp"

namespace wdrw {

using Expo = std::vector<std::uint32_t>;  // exponent vector in N^n

inline Expo expo_add(const Expo& a, const Expo& b) {
  Expo r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline std::uint64_t expo_total(const Expo& a) {
  std::uint64_t t = 0;
  for (auto e : a) t += e;
  return t;
}

/// Sparse multivariate polynomial over F_p.  No zero coefficients stored.
class PolyFp {
 public:
  std::uint32_t p = 2;
  std::uint32_t n = 0;
  std::map<Expo, std::uint64_t> terms;  // coeff in [1, p)

  PolyFp() = default;
  PolyFp(std::uint32_t p_, std::uint32_t n_) : p(p_), n(n_) {}

  static PolyFp constant(std::uint32_t p, std::uint32_t n, std::uint64_t c) {
    PolyFp r(p, n);
    r.add_term(Expo(n, 0), c);
    return r;
  }
  static PolyFp monomial(std::uint32_t p, Expo e, std::uint64_t c = 1) {
    PolyFp r(p, (std::uint32_t)e.size());
    r.add_term(std::move(e), c);
    return r;
  }
  static PolyFp variable(std::uint32_t p, std::uint32_t n, std::uint32_t i, std::uint32_t deg = 1) {
    Expo e(n, 0);
    e.at(i) = deg;
    return monomial(p, std::move(e));
  }

  bool is_zero() const { return terms.empty(); }
  bool operator==(const PolyFp& o) const { return p == o.p && terms == o.terms; }

  void add_term(Expo e, std::uint64_t c) {
    c %= p;
    if (c == 0) return;
    auto [it, fresh] = terms.emplace(std::move(e), c);
    if (!fresh) {
      it->second = (it->second + c) % p;
      if (it->second == 0) terms.erase(it);
    }
  }

  PolyFp operator+(const PolyFp& o) const {
    PolyFp r = *this;
    for (auto& [e, c] : o.terms) r.add_term(e, c);
    return r;
  }
  PolyFp operator-() const {
    PolyFp r(p, n);
    for (auto& [e, c] : terms) r.add_term(e, p - c);
    return r;
  }
  PolyFp operator-(const PolyFp& o) const { return *this + (-o); }
  PolyFp operator*(const PolyFp& o) const {
    PolyFp r(p, n);
    for (auto& [e1, c1] : terms)
      for (auto& [e2, c2] : o.terms) r.add_term(expo_add(e1, e2), (c1 * c2) % p);
    return r;
  }
  PolyFp scaled(std::uint64_t c) const {
    PolyFp r(p, n);
    for (auto& [e, k] : terms) r.add_term(e, (k * (c % p)) % p);
    return r;
  }
  PolyFp pow(std::uint64_t k) const {
    PolyFp r = constant(p, n, 1), b = *this;
    while (k) {
      if (k & 1) r = r * b;
      b = b * b;
      k >>= 1;
    }
    return r;
  }
  // p-power Frobenius: exponents scaled by p^u (F_p coefficients are fixed).
  PolyFp frob(std::uint32_t u = 1) const {
    std::uint64_t s = pow_u64(p, u);
    PolyFp r(p, n);
    for (auto& [e, c] : terms) {
      Expo f = e;
      for (auto& x : f) x = (std::uint32_t)(x * s);
      r.add_term(std::move(f), c);
    }
    return r;
  }
  // Substitution homomorphism X_i -> images[i]; images live in any PolyFp ring.
  PolyFp subst(const std::vector<PolyFp>& images) const {
    if (images.size() != n) throw Error("subst: arity");
    std::uint32_t np = images.empty() ? n : images[0].n;
    PolyFp r(p, np);
    for (auto& [e, c] : terms) {
      PolyFp t = PolyFp::constant(p, np, c);
      for (size_t i = 0; i < e.size(); ++i)
        if (e[i]) t = t * images[i].pow(e[i]);
      r = r + t;
    }
    return r;
  }
  std::int64_t degree() const {  // total degree; -1 for zero
    std::int64_t d = -1;
    for (auto& [e, c] : terms) d = std::max<std::int64_t>(d, (std::int64_t)expo_total(e));
    return d;
  }
  // Remainder-checked division by another polynomial (used for P-power unit
  // tests in localized rings): returns true and sets q when o | this exactly.
  bool divexact(const PolyFp& o, PolyFp& q) const;
};

/// Sparse multivariate polynomial with mpz coefficients (integer lifts).
class PolyZ {
 public:
  std::uint32_t n = 0;
  std::map<Expo, mpz_class> terms;

  PolyZ() = default;
  explicit PolyZ(std::uint32_t n_) : n(n_) {}

  static PolyZ constant(std::uint32_t n, mpz_class c) {
    PolyZ r(n);
    r.add_term(Expo(n, 0), std::move(c));
    return r;
  }
  static PolyZ monomial(Expo e, mpz_class c = 1) {
    PolyZ r((std::uint32_t)e.size());
    r.add_term(std::move(e), std::move(c));
    return r;
  }
  static PolyZ variable(std::uint32_t n, std::uint32_t i, std::uint32_t deg = 1) {
    Expo e(n, 0);
    e.at(i) = deg;
    return monomial(std::move(e));
  }

  bool is_zero() const { return terms.empty(); }
  bool operator==(const PolyZ& o) const { return terms == o.terms; }

  void add_term(Expo e, mpz_class c) {
    if (c == 0) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
      terms.emplace(std::move(e), std::move(c));
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  PolyZ operator+(const PolyZ& o) const {
    PolyZ r = *this;
    for (auto& [e, c] : o.terms) r.add_term(e, c);
    return r;
  }
  PolyZ operator-() const {
    PolyZ r(n);
    for (auto& [e, c] : terms) r.terms.emplace(e, -c);
    return r;
  }
  PolyZ operator-(const PolyZ& o) const { return *this + (-o); }
  PolyZ operator*(const PolyZ& o) const {
    PolyZ r(n);
    for (auto& [e1, c1] : terms)
      for (auto& [e2, c2] : o.terms) r.add_term(expo_add(e1, e2), c1 * c2);
    return r;
  }
  PolyZ scaled(const mpz_class& c) const {
    PolyZ r(n);
    if (c == 0) return r;
    for (auto& [e, k] : terms) r.terms.emplace(e, k * c);
    return r;
  }
  PolyZ pow(std::uint64_t k) const {
    PolyZ r = constant(n, 1), b = *this;
    while (k) {
      if (k & 1) r = r * b;
      b = b * b;
      k >>= 1;
    }
    return r;
  }
  // Exact division by p^k; throws NonIntegralGhost when not exact.
  PolyZ divexact_p(std::uint32_t p, std::uint32_t k) const {
    mpz_class q;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
    PolyZ r(n);
    for (auto& [e, c] : terms) {
      if (!mpz_divisible_p(c.get_mpz_t(), pk.get_mpz_t())) throw NonIntegralGhost();
      mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), pk.get_mpz_t());
      r.terms.emplace(e, q);
    }
    return r;
  }
  PolyFp mod_p(std::uint32_t p) const {
    PolyFp r(p, n);
    for (auto& [e, c] : terms) {
      mpz_class rem = c % p;
      if (rem < 0) rem += p;
      r.add_term(e, rem.get_ui());
    }
    return r;
  }
  // Coefficients reduced to least nonnegative residues mod p^k.
  PolyZ mod_pk(std::uint32_t p, std::uint32_t k) const {
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
    PolyZ r(n);
    for (auto& [e, c] : terms) {
      mpz_class rem = c % pk;
      if (rem < 0) rem += pk;
      if (rem != 0) r.terms.emplace(e, rem);
    }
    return r;
  }
  PolyZ subst(const std::vector<PolyZ>& images) const {
    if (images.size() != n) throw Error("subst: arity");
    std::uint32_t np = images.empty() ? n : images[0].n;
    PolyZ r(np);
    for (auto& [e, c] : terms) {
      PolyZ t = PolyZ::constant(np, c);
      for (size_t i = 0; i < e.size(); ++i)
        if (e[i]) t = t * images[i].pow(e[i]);
      r = r + t;
    }
    return r;
  }
  std::int64_t degree() const {
    std::int64_t d = -1;
    for (auto& [e, c] : terms) d = std::max<std::int64_t>(d, (std::int64_t)expo_total(e));
    return d;
  }
};

// Canonical lift with coefficients in {0..p-1}.
inline PolyZ lift(const PolyFp& f) {
  PolyZ r(f.n);
  for (auto& [e, c] : f.terms) r.terms.emplace(e, mpz_class((unsigned long)c));
  return r;
}

inline bool PolyFp::divexact(const PolyFp& o, PolyFp& q) const {
  // Long division by leading term in the map's lex order.
  if (o.is_zero()) return false;
  PolyFp rem = *this;
  q = PolyFp(p, n);
  auto lead = *o.terms.rbegin();
  // Modular inverse of the leading coefficient.
  std::uint64_t inv = 1;
  for (std::uint64_t x = 1; x < p; ++x)
    if ((x * lead.second) % p == 1) inv = x;
  while (!rem.is_zero()) {
    auto [re, rc] = *rem.terms.rbegin();
    Expo d(n, 0);
    for (size_t i = 0; i < n; ++i) {
      if (re[i] < lead.first[i]) return false;
      d[i] = re[i] - lead.first[i];
    }
    std::uint64_t qc = (rc * inv) % p;
    PolyFp piece = PolyFp::monomial(p, d, qc);
    q = q + piece;
    rem = rem - piece * o;
  }
  return true;
}

}  // namespace wdrw
