#pragma once

#include <cstdint>

#include "wdrw/errors.hpp"

namespace wdrw {

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// p^e with overflow guard; residue moduli are kept below 2^31 so that
// products of two residues fit in 64 bits.
inline std::uint64_t pow_u64(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) {
    if (b != 0 && r > (std::uint64_t(1) << 62) / b) throw CoefficientOutOfRange("modulus overflow");
    r *= b;
  }
  return r;
}

/// Ambient ring data: W_m(F_p[X_1..X_n]).  Values carry the context of
/// their creation; mixing contexts raises ContextMismatch.
struct RingContext {
  std::uint32_t p = 2;   // prime
  std::uint32_t n = 1;   // variable count
  std::uint32_t m = 1;   // truncation length; m = 0 is the zero ring

  RingContext() = default;
  RingContext(std::uint32_t p_, std::uint32_t n_, std::uint32_t m_) : p(p_), n(n_), m(m_) {
    if (!is_prime(p)) throw Error("RingContext: p must be prime");
    if (pow_u64(p, m) > (std::uint64_t(1) << 31)) throw CoefficientOutOfRange("p^m too large");
  }

  bool same_ring(const RingContext& o) const { return p == o.p && n == o.n; }
  bool operator==(const RingContext& o) const { return p == o.p && n == o.n && m == o.m; }

  RingContext with_len(std::uint32_t m2) const { return RingContext(p, n, m2); }

  std::uint64_t modulus() const { return pow_u64(p, m); }  // p^m
};

inline void require_same_ring(const RingContext& a, const RingContext& b) {
  if (!a.same_ring(b)) throw ContextMismatch();
}

}  // namespace wdrw
