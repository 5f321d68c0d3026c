#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wdrw/context.hpp"

namespace wdrw {

inline std::uint64_t inv_mod_pk(std::uint64_t u, std::uint64_t pk) {
  std::int64_t a = (std::int64_t)(u % pk), b = (std::int64_t)pk, x0 = 1, x1 = 0;
  while (b) {
    std::int64_t q = a / b;
    a -= q * b;
    std::swap(a, b);
    x0 -= q * x1;
    std::swap(x0, x1);
  }
  std::int64_t r = x0 % (std::int64_t)pk;
  if (r < 0) r += (std::int64_t)pk;
  return (std::uint64_t)r;
}

/// Deterministic linear solve over Z/p^k.  Greedy minimal-valuation pivoting
/// over the remaining (row, column) pairs keeps every later entry of a pivot
/// row at valuation >= the pivot's, which makes the bottom-up divisibility
/// test a complete consistency check.  Free variables are set to zero.
/// Returns nullopt when the system has no solution.
inline std::optional<std::vector<std::uint64_t>> solve_mod_pk(std::vector<std::vector<std::uint64_t>> a,
                                                              std::vector<std::uint64_t> rhs, std::uint32_t p,
                                                              std::uint32_t k) {
  const std::uint64_t pk = pow_u64(p, k);
  const std::size_t nrows = a.size(), ncols = nrows ? a[0].size() : 0;
  for (auto& row : a)
    for (auto& x : row) x %= pk;
  for (auto& x : rhs) x %= pk;
  auto vp = [&](std::uint64_t x) -> std::uint32_t {
    if (x == 0) return k;
    std::uint32_t v = 0;
    while (x % p == 0) {
      x /= p;
      ++v;
    }
    return v < k ? v : k;
  };

  const auto a0 = a;
  const auto rhs0 = rhs;

  std::vector<bool> col_used(ncols, false);
  std::vector<std::size_t> pivot_col;
  std::vector<std::uint32_t> pivot_v;
  std::size_t cur = 0;
  while (cur < nrows) {
    std::size_t br = SIZE_MAX, bc = SIZE_MAX;
    std::uint32_t bv = k;
    for (std::size_t r = cur; r < nrows; ++r)
      for (std::size_t c = 0; c < ncols; ++c) {
        if (col_used[c]) continue;
        std::uint32_t v = vp(a[r][c]);
        if (v < bv) {
          bv = v;
          br = r;
          bc = c;
        }
      }
    if (br == SIZE_MAX) break;  // all remaining entries vanish mod p^k
    std::swap(a[cur], a[br]);
    std::swap(rhs[cur], rhs[br]);
    std::uint64_t pv = pow_u64(p, bv);
    std::uint64_t unit = (a[cur][bc] / pv) % pk;
    std::uint64_t uinv = inv_mod_pk(unit, pk);
    for (auto& x : a[cur]) x = (x * uinv) % pk;
    rhs[cur] = (rhs[cur] * uinv) % pk;
    for (std::size_t r = cur + 1; r < nrows; ++r) {
      if (a[r][bc] == 0) continue;
      std::uint64_t f = (a[r][bc] / pv) % pk;  // valuation >= bv by pivot choice
      for (std::size_t c = 0; c < ncols; ++c) a[r][c] = (a[r][c] + pk - (f * a[cur][c]) % pk) % pk;
      rhs[r] = (rhs[r] + pk - (f * rhs[cur]) % pk) % pk;
    }
    col_used[bc] = true;
    pivot_col.push_back(bc);
    pivot_v.push_back(bv);
    ++cur;
  }
  for (std::size_t r = cur; r < nrows; ++r)
    if (rhs[r] != 0) return std::nullopt;

  std::vector<std::uint64_t> x(ncols, 0);
  for (std::size_t r = cur; r-- > 0;) {
    std::uint64_t t = rhs[r];
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == pivot_col[r] || a[r][c] == 0 || x[c] == 0) continue;
      t = (t + pk - (a[r][c] * x[c]) % pk) % pk;
    }
    std::uint64_t pv = pow_u64(p, pivot_v[r]);
    if (t % pv != 0) return std::nullopt;
    x[pivot_col[r]] = (t / pv) % pk;
  }
  for (std::size_t r = 0; r < nrows; ++r) {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < ncols; ++c) s = (s + a0[r][c] * x[c]) % pk;
    if (s != rhs0[r]) return std::nullopt;
  }
  return x;
}

}  // namespace wdrw
