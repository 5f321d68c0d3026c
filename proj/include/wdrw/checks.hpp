#pragma once

#include <functional>
#include <random>

#include "wdrw/format.hpp"

namespace wdrw {
namespace checks {

inline PolyFp rand_poly(std::mt19937& rng, std::uint32_t p, std::uint32_t n, std::uint32_t maxdeg,
                        std::uint32_t maxterms = 3) {
  PolyFp f(p, n);
  std::uniform_int_distribution<std::uint32_t> dt(0, maxterms), dc(0, p - 1), de(0, maxdeg);
  for (std::uint32_t k = dt(rng); k; --k) {
    Expo e(n, 0);
    for (auto& x : e) x = de(rng);
    f.add_term(std::move(e), dc(rng));
  }
  return f;
}

inline WittVec rand_witt(std::mt19937& rng, const RingContext& c, std::uint32_t maxdeg) {
  std::vector<PolyFp> v;
  for (std::uint32_t i = 0; i < c.m; ++i) v.push_back(rand_poly(rng, c.p, c.n, maxdeg));
  return WittVec(c, std::move(v));
}

inline DrwElement rand_elem(std::mt19937& rng, const RingContext& c, std::uint32_t t, int terms = 2,
                            std::uint32_t max_num = 3, std::uint32_t max_pden = 1) {
  DrwElement x(c, t);
  std::uniform_int_distribution<std::uint32_t> dn(0, max_num), dd(0, max_pden);
  for (int k = 0; k < terms; ++k) {
    WeightFn a(c.p, c.n);
    for (auto& e : a.entries) e = PadicFrac(dn(rng), dd(rng), c.p);
    auto supp = a.support();
    if (supp.size() < t) continue;
    std::shuffle(supp.begin(), supp.end(), rng);
    BasicDiffKey key(a, {supp.begin(), supp.begin() + t});
    std::uint32_t mod = coeff_modulus(key, c.m);
    if (mod == 0) continue;
    std::uniform_int_distribution<std::uint64_t> dc(1, pow_u64(c.p, mod) - 1);
    x.add_term(key, dc(rng));
  }
  return x;
}

inline std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

/// Named single-inequality checker from the overconvergence catalogue.  Verifies the
/// inequality exactly on each sample; the report lists any violation.
inline CheckReport run_inequality_check(const std::string& name, const RingContext& ctx, int samples,
                                        std::uint32_t seed, const mpq_class& eps,
                                        const std::vector<mpq_class>& radii) {
  CheckReport r{name};
  std::mt19937 rng(seed);
  std::vector<mpq_class> ones(ctx.n, mpq_class(1));
  const std::vector<mpq_class>& b = radii.empty() ? ones : radii;
  if (name == "zeta_axioms") {
    std::vector<DrwElement> xs;
    for (int i = 0; i < std::max(4, samples / 6); ++i) xs.push_back(rand_elem(rng, ctx, i % 2));
    zeta_axioms(r, xs, eps, ctx);
    return r;
  }
  if (name == "gamma_axioms") {
    std::vector<WittVec> ws;
    for (int i = 0; i < std::max(4, samples / 6); ++i) ws.push_back(rand_witt(rng, ctx, 3));
    gamma_axioms(r, ws, eps, b, ctx);
    return r;
  }
  for (int it = 0; it < samples; ++it) {
    if (name == "dzeta") {
      DrwElement x = rand_elem(rng, ctx, rng() % 2);
      expect(r, zeta(x.differential(), eps) >= zeta(x, eps), "zeta(dx) < zeta(x)");
    } else if (name == "mult_p_zeta") {
      DrwElement x = rand_elem(rng, ctx, rng() % 2, 2, 3, 0);  // integral weights: no term death at m >= 2
      bool safe = true;
      for (auto& [k, c] : x.terms)
        if ((c * ctx.p) % pow_u64(ctx.p, coeff_modulus(k, ctx.m)) == 0) safe = false;
      if (!safe || x.is_zero()) continue;
      expect(r, zeta(x.scaled(ctx.p), eps) == zeta(x, eps) + mpq_class((unsigned long)(2 * ctx.n)),
             "zeta(pw) != zeta(w) + 2n");
    } else if (name == "mult_p_gamma") {
      WittVec w = rand_witt(rng, ctx.with_len(ctx.m - 1), 3);
      std::vector<PolyFp> coords = w.coords;
      coords.push_back(PolyFp(ctx.p, ctx.n));
      WittVec w0(ctx, coords);
      expect(r, gamma_id(w0.scaled_int(ctx.p), eps, b).value == gamma_id(w0, eps, b).value + mpq_class(1),
             "gamma(pw) != gamma(w) + 1");
    } else if (name == "verschiebung_gamma") {
      WittVec w = rand_witt(rng, ctx, 3);
      std::uint32_t u = 1 + rng() % 2;
      WittVec vw = w;
      for (std::uint32_t s = 0; s < u; ++s) vw = vw.verschiebung();
      expect(r, gamma_id(vw, eps, b).value ==
                    gamma_id(w, eps / mpq_class((unsigned long)pow_u64(ctx.p, u)), b).value + mpq_class(u),
             "gamma(V^u w) != u + gamma_{eps/p^u}(w)");
    } else if (name == "sandwich") {
      WittVec w = rand_witt(rng, ctx, 3);
      mpq_class twon((unsigned long)(2 * ctx.n));
      DrwElement xw = from_witt(w);
      expect(r, gamma_id(w, eps / twon, ones).value.scaled(twon) >= zeta(xw, eps), "sandwich upper failed");
      expect(r, zeta(xw, eps) >= gamma_id(w, eps, ones).value, "sandwich lower failed");
    } else if (name == "radii_rescale") {
      WittVec w = rand_witt(rng, ctx, 3);
      std::vector<mpq_class> c2;
      for (std::uint32_t i = 0; i < ctx.n; ++i) {
        mpq_class q(1 + (int)(rng() % 3), 1 + (int)(rng() % 2));
        q.canonicalize();
        c2.push_back(q);
      }
      mpq_class mm = radii_min_ratio(b, c2), MM = radii_max_ratio(b, c2);
      expect(r, gamma_id(w, mm * eps, b).value >= gamma_id(w, eps, c2).value, "rescaling (m) failed");
      expect(r, gamma_id(w, eps, c2).value >= gamma_id(w, MM * eps, b).value, "rescaling (M) failed");
    } else if (name == "functoriality") {
      // phi(X_1) = Y^3 on the first variable, identity elsewhere
      std::vector<PolyFp> img;
      img.push_back(PolyFp::variable(ctx.p, ctx.n, 0, 3));
      for (std::uint32_t i = 1; i < ctx.n; ++i) img.push_back(PolyFp::variable(ctx.p, ctx.n, i));
      DrwElement x = rand_elem(rng, ctx, 0, 2);
      mpq_class scaled = eps * (unsigned long)(2 * ctx.n) * 3;
      expect(r, zeta(induced_map(img, x, ctx), eps) >=
                    zeta(x, scaled).scaled(mpq_class(1, (unsigned long)(2 * ctx.n))),
             "functoriality bound failed");
    } else {
      throw UnknownInequality("unknown inequality '" + name + "'");
    }
  }
  return r;
}

// ---------------------------------------------------------------- criteria

/// 1. ghost is a ring homomorphism; Witt ring axioms.
inline CheckReport criterion1(int pairs, std::uint32_t seed) {
  CheckReport r("ghost homomorphism & Witt ring axioms");
  std::mt19937 rng(seed);
  std::vector<std::uint32_t> primes = {2, 3, 5};
  int done = 0;
  while (done < pairs) {
    std::uint32_t p = primes[rng() % primes.size()];
    std::uint32_t n = 1 + rng() % 2, m = 1 + rng() % 4, deg = rng() % 5;
    // keep the lifted-power blowup bounded
    std::uint64_t coords_deg = pow_u64(p, m - 1) * std::max<std::uint32_t>(deg, 1);
    if (n == 2 && coords_deg > 34) continue;
    if (n == 1 && coords_deg > 200) continue;
    RingContext c(p, n, m);
    WittVec x = rand_witt(rng, c, deg), y = rand_witt(rng, c, deg), z = rand_witt(rng, c, deg);
    auto gx = ghost(x.lifts(), p), gy = ghost(y.lifts(), p);
    // exact over Z before reduction: ghost(unghost(gx op gy)) == gx op gy
    std::vector<PolyZ> gsum, gprod;
    for (std::uint32_t u = 0; u < m; ++u) {
      gsum.push_back(gx[u] + gy[u]);
      gprod.push_back(gx[u] * gy[u]);
    }
    expect(r, ghost(unghost(gsum, p), p) == gsum, "ghost round trip (sum) broke");
    expect(r, ghost(unghost(gprod, p), p) == gprod, "ghost round trip (product) broke");
    // on reduced representatives the u-th ghost is well-defined mod p^(u+1)
    auto gs = ghost((x + y).lifts(), p), gp = ghost((x * y).lifts(), p);
    bool hom = true;
    for (std::uint32_t u = 0; u < m; ++u) {
      hom = hom && (gs[u] - gsum[u]).mod_pk(p, u + 1).is_zero();
      hom = hom && (gp[u] - gprod[u]).mod_pk(p, u + 1).is_zero();
    }
    expect(r, hom, "ghost homomorphism identity failed");
    expect(r, ((x + y) + z) == (x + (y + z)), "associativity of + failed");
    expect(r, ((x * y) * z) == (x * (y * z)), "associativity of * failed");
    expect(r, (x * (y + z)) == (x * y + x * z), "distributivity failed");
    expect(r, (x + WittVec::zero(c)) == x, "additive identity failed");
    ++done;
  }
  return r;
}

/// 2. dga identity suite (eqs (1)-(6)).
inline CheckReport criterion2(int samples, std::uint32_t seed) {
  CheckReport r("dga identity suite");
  std::mt19937 rng(seed);
  for (int it = 0; it < samples; ++it) {
    std::uint32_t p = it % 2 ? 2 : 3;
    RingContext c(p, 1 + rng() % 2, 1 + rng() % 3);
    std::uint32_t t = rng() % 2;
    DrwElement x = rand_elem(rng, c, t), y = rand_elem(rng, c, 0);
    expect(r, x.differential().differential().is_zero(), "d^2 != 0");
    // graded Leibniz: d(y x) = dy x + y dx  (y of degree 0)
    expect(r, multiply(y, x).differential() ==
                  multiply(y.differential(), x) + multiply(y, x.differential()),
           "Leibniz failed");
    // sign in degree 1 x 1: d(ab) = da b - a db
    if (c.n >= 2) {
      DrwElement a1 = rand_elem(rng, c, 1), b1 = rand_elem(rng, c, 1);
      expect(r, multiply(a1, b1).differential() ==
                    multiply(a1.differential(), b1) - multiply(a1, b1.differential()),
             "graded Leibniz sign failed");
    }
    PolyFp rp = rand_poly(rng, p, c.n, 2);
    DrwElement tr = teichmuller_elem(c.with_len(c.m + 1), rp);
    expect(r, frobenius_op(tr) == teichmuller_elem(c, rp.frob()), "F[r] != [r^p]");
    // F(d[r]) = [r^(p-1)] d[r]
    DrwElement fdr = frobenius_op(tr.differential());
    DrwElement rhs(c, 1);
    {
      // [r^(p-1)] d[r] with [r^(p-1)] = [r]^(p-1)
      DrwElement rp1 = DrwElement::one(c);
      DrwElement tr_m = teichmuller_elem(c, rp);
      for (std::uint32_t k = 0; k + 1 < p; ++k) rp1 = multiply(rp1, tr_m);
      rhs = multiply(rp1, tr_m.differential());
    }
    expect(r, fdr == rhs, "F(d[r]) != [r^(p-1)] d[r]");
    expect(r, frobenius_op(x.verschiebung_op().differential()) == x.differential(), "FdV != d");
    // V(y F(w)) = V(y) w  with w at level m+1
    DrwElement w1 = rand_elem(rng, c.with_len(c.m + 1), 0);
    expect(r, multiply(y, frobenius_op(w1)).verschiebung_op() == multiply(y.verschiebung_op(), w1),
           "V(x F(y)) != V(x) y");
    // dF = p F d
    DrwElement ylift = rand_elem(rng, c.with_len(c.m + 1), 0);
    expect(r, frobenius_op(ylift).differential() == frobenius_op(ylift.differential()).scaled(p),
           "dF != pFd");
    // F is a graded ring morphism
    DrwElement zl = rand_elem(rng, c.with_len(c.m + 1), 0);
    expect(r, frobenius_op(multiply(ylift, zl)) == multiply(frobenius_op(ylift), frobenius_op(zl)),
           "F not multiplicative");
    expect(r, frobenius_op(ylift + zl) == frobenius_op(ylift) + frobenius_op(zl), "F not additive");
  }
  return r;
}

/// 3. oracle consistency.
inline CheckReport criterion3(int samples, std::uint32_t seed) {
  CheckReport r("oracle consistency");
  std::mt19937 rng(seed);
  for (int it = 0; it < samples; ++it) {
    std::uint32_t p = it % 2 ? 2 : 3;
    RingContext c(p, 1 + rng() % 2, 1 + rng() % 3);
    std::uint32_t t = rng() % 2;
    DrwElement x = rand_elem(rng, c, t, 3), y = rand_elem(rng, c, t, 2);
    expect(r, extract(embed(x), c) == x, "extract(embed) != id");
    // embed(extract) = id on accepted forms
    ModelForm f = embed(x);
    expect(r, embed(extract(f, c)) == f, "embed(extract) != id");
    // homomorphism against the element operations
    expect(r, extract(model_add(embed(x), embed(y)), c) == x + y, "embed not additive");
    expect(r, extract(model_d(embed(x)), c) == x.differential(), "embed does not commute with d");
    expect(r, extract(model_V(embed(x)), c.with_len(c.m + 1)) == x.verschiebung_op(),
           "embed does not commute with V");
    DrwElement xl = rand_elem(rng, c.with_len(c.m + 1), 0);
    expect(r, extract(model_F(embed(xl)), c) == frobenius_op(xl), "embed does not commute with F");
    DrwElement z = rand_elem(rng, c, 0);
    expect(r, extract(model_mul(embed(z), embed(x)), c) == multiply(z, x), "embed not multiplicative");
  }
  return r;
}

/// 4. structure-theorem uniqueness at finite level.
inline CheckReport criterion4(int samples, std::uint32_t seed) {
  CheckReport r("structure-theorem uniqueness (truncated)");
  std::mt19937 rng(seed);
  for (int it = 0; it < samples; ++it) {
    std::uint32_t p = it % 2 ? 2 : 3;
    RingContext c(p, 1 + rng() % 2, 1 + rng() % 3);
    std::uint32_t t = rng() % 3;
    if (t > c.n) t = c.n;
    DrwElement x = rand_elem(rng, c, t, 3), y = rand_elem(rng, c, t, 2);
    // normal forms are canonical: algebraically equal expressions normalize
    // to the identical term map
    expect(r, (x + y) - y == x, "x + y - y != x");
    expect(r, (x - x).is_zero(), "x - x != 0");
    DrwElement z0 = rand_elem(rng, c, 0);
    expect(r, multiply(z0, x + y) == multiply(z0, x) + multiply(z0, y), "linearity of product failed");
    expect(r, x.differential().differential().is_zero(), "dd != 0 in normal form");
    // degree-0 Witt bridge is a bijection onto normal forms
    if (t == 0) {
      expect(r, from_witt(to_witt(x)) == x, "from_witt(to_witt) != id");
    }
    // recompose the term-by-term decomposition: sum of single-term elements
    DrwElement acc(c, t);
    for (auto& [k, cc] : x.terms) acc = acc + make_e(cc, k, c);
    expect(r, acc == x, "termwise recomposition failed");
  }
  return r;
}

/// 5. mod-p rewriting sweep with the Chu--Vandermonde count.
inline CheckReport criterion5(std::uint64_t weight_bound, std::uint32_t nmax, std::uint32_t umax,
                              const std::vector<std::uint32_t>& primes) {
  CheckReport r("mod-p rewriting (linear p^u-integral combinations)");
  for (std::uint32_t p : primes)
    for (std::uint32_t n = 1; n <= nmax; ++n) {
      RingContext c(p, n, 2);
      // all integral weights b with |b| <= weight_bound
      std::vector<Expo> bs;
      Expo cur(n, 0);
      auto rec = [&](auto&& self, std::uint32_t i, std::uint64_t left) -> void {
        if (i == n) {
          bs.push_back(cur);
          return;
        }
        for (std::uint64_t v = 0; v <= left; ++v) {
          cur[i] = (std::uint32_t)v;
          self(self, i + 1, left - v);
        }
        cur[i] = 0;
      };
      rec(rec, 0, weight_bound);
      for (auto& be : bs) {
        WeightFn b = WeightFn::from_expo(p, be);
        if (b.is_zero() || b.vp() != 0) continue;
        auto supp = b.support();
        std::uint32_t mn = b.min_index();
        std::vector<std::uint32_t> pool;
        for (auto i : supp)
          if (i != mn) pool.push_back(i);
        for (std::uint32_t u = 1; u <= umax; ++u) {
          for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << pool.size()); ++mask) {
            std::vector<std::uint32_t> L;
            for (std::size_t i = 0; i < pool.size(); ++i)
              if ((mask >> i) & 1) L.push_back(pool[i]);
            auto rw = rewrite_mod_p(1, b, L, u, c);
            expect(r, rw.size() == binom(supp.size() - 1, L.size()), "candidate count mismatch");
            // expansion reproduces the input mod p (level-1 check: all keys integral)
            RingContext c1(p, n, 1);
            DrwElement target(c1, (std::uint32_t)L.size());
            target.add_term(BasicDiffKey(b, L), 1);
            DrwElement acc(c1, (std::uint32_t)L.size());
            for (auto& rt : rw) {
              if (rt.coeff == 0) continue;
              Expo scaled = rt.cofactor;
              for (auto& xx : scaled) xx *= (std::uint32_t)pow_u64(p, u);
              DrwElement e(c1, (std::uint32_t)L.size());
              e.add_term(rt.key, 1);
              acc = acc + multiply(teichmuller_elem(c1, PolyFp::monomial(p, scaled)), e).scaled(rt.coeff);
            }
            expect(r, acc == target, "oracle expansion mismatch mod p");
          }
        }
      }
    }
  return r;
}

/// 6. kernel splitting rank check per weight class.
inline CheckReport criterion6(std::uint64_t degree_bound, const std::vector<std::uint32_t>& primes,
                              std::uint32_t nmax, std::uint32_t tmax, std::uint32_t mmax) {
  CheckReport r("mod-p kernel splitting (rank per weight class)");
  for (std::uint32_t p : primes)
    for (std::uint32_t n = 1; n <= nmax; ++n)
      for (std::uint32_t m = 1; m <= mmax; ++m) {
        RingContext c(p, n, m + 1);
        for (std::uint32_t t = 0; t <= std::min(tmax, n); ++t) {
          auto kb = kernel_basis_mod_p(t, m, c, degree_bound);
          expect(r, kb.h_part.empty(), "H-part nonempty for m >= 1 over the perfect cage");
          // group the brute-force kernel keys (u(a) = m) by weight
          std::uint64_t pm = pow_u64(p, m);
          std::vector<Expo> tops;  // p^m * weight
          Expo cur(n, 0);
          auto rec = [&](auto&& self, std::uint32_t i, std::uint64_t left) -> void {
            if (i == n) {
              tops.push_back(cur);
              return;
            }
            for (std::uint64_t v = 0; v <= left; ++v) {
              cur[i] = (std::uint32_t)v;
              self(self, i + 1, left - v);
            }
            cur[i] = 0;
          };
          rec(rec, 0, degree_bound * pm);
          for (auto& top : tops) {
            WeightFn cw(p, n);
            for (std::uint32_t i = 0; i < n; ++i) cw.entries[i] = PadicFrac(top[i], m, p);
            if (cw.u() != m) continue;
            auto supp = cw.support();
            if (supp.size() < t) continue;
            std::uint64_t brute = binom(supp.size(), t);
            // spanning vectors from the enumerated basis, restricted to this class
            std::map<BasicDiffKey, std::size_t, KeyLess> slot;
            std::vector<std::vector<std::uint8_t>> rows;
            auto integral_diff = [&](const WeightFn& big) -> std::optional<Expo> {
              Expo g(n, 0);
              for (std::uint32_t i = 0; i < n; ++i) {
                PadicFrac ci = cw.entries[i], ai = big.entries[i];
                std::uint64_t cnum = ci.num * pow_u64(p, m - ci.pden);
                std::uint64_t anum = ai.num * pow_u64(p, m - ai.pden);
                if (cnum < anum || (cnum - anum) % pm != 0) return std::nullopt;
                g[i] = (std::uint32_t)((cnum - anum) / pm);
              }
              return g;
            };
            auto add_row = [&](const DrwElement& v) {
              std::vector<std::uint8_t> row;
              for (auto& [k, coeff] : v.terms) {
                auto [it2, fresh] = slot.emplace(k, slot.size());
                (void)fresh;
                if (row.size() < slot.size()) row.resize(slot.size(), 0);
                row[it2->second] = (std::uint8_t)(coeff % p);
              }
              row.resize(slot.size(), 0);
              rows.push_back(std::move(row));
            };
            for (auto& g : kb.g_part) {
              auto gamma = integral_diff(g.weight);
              if (!gamma) continue;
              DrwElement e(c, t);
              e.add_term(g, 1);
              add_row(multiply(teichmuller_elem(c, PolyFp::monomial(p, *gamma)), e));
            }
            for (auto& g : kb.dg_part) {
              auto gamma = integral_diff(g.weight);
              if (!gamma) continue;
              DrwElement e(c, t - 1);
              e.add_term(g, 1);
              add_row(multiply(teichmuller_elem(c, PolyFp::monomial(p, *gamma)), e).differential());
            }
            // rank over F_p (small p: Gaussian elimination on bytes)
            std::size_t rank = 0;
            std::vector<std::vector<std::uint8_t>> basis;
            for (auto v : rows) {
              v.resize(slot.size(), 0);
              for (auto& bvec : basis) {
                std::size_t lead = 0;
                while (lead < bvec.size() && !bvec[lead]) ++lead;
                if (lead < v.size() && v[lead]) {
                  std::uint32_t f = v[lead] * inv_mod_pk(bvec[lead], p) % p;
                  for (std::size_t i = 0; i < v.size(); ++i)
                    v[i] = (std::uint8_t)((v[i] + p * p - f * (i < bvec.size() ? bvec[i] : 0)) % p);
                }
              }
              if (std::any_of(v.begin(), v.end(), [](std::uint8_t x) { return x != 0; })) {
                basis.push_back(v);
                std::sort(basis.begin(), basis.end(), std::greater<>());
                ++rank;
              }
            }
            expect(r, rank == brute, "kernel rank mismatch in a weight class");
          }
        }
      }
  return r;
}

/// 7. pseudovaluation suite.
inline CheckReport criterion7(int samples, std::uint32_t seed) {
  CheckReport r("pseudovaluation suite");
  std::mt19937 rng(seed);
  auto ones = [](std::uint32_t n) { return std::vector<mpq_class>(n, mpq_class(1)); };

  std::vector<DrwElement> xs;
  std::vector<WittVec> ws;
  RingContext cz(2, 2, 3);
  for (int i = 0; i < 8; ++i) xs.push_back(rand_elem(rng, cz, i % 2));
  for (int i = 0; i < 8; ++i) ws.push_back(rand_witt(rng, cz, 3));
  zeta_axioms(r, xs, mpq_class(1, 3), cz);
  gamma_axioms(r, ws, mpq_class(1, 3), ones(2), cz);

  std::vector<PolyFp> cube = {PolyFp::variable(2, 1, 0, 3)};
  std::vector<PolyFp> two_to_one = {PolyFp::variable(2, 1, 0), PolyFp::variable(2, 1, 0, 2)};
  std::vector<PolyFp> one_to_two = {PolyFp::variable(2, 2, 0) * PolyFp::variable(2, 2, 1) + PolyFp::variable(2, 2, 0)};
  for (int it = 0; it < samples; ++it) {
    std::uint32_t p = it % 2 ? 2 : 3;
    RingContext c(p, 1 + rng() % 2, 3);
    mpq_class eps(1, 1 + (int)(rng() % 5));
    std::vector<mpq_class> b = ones(c.n), b2;
    for (std::uint32_t i = 0; i < c.n; ++i) {
      mpq_class q(1 + (int)(rng() % 3), 1 + (int)(rng() % 2));
      q.canonicalize();
      b2.push_back(q);
    }

    DrwElement x = rand_elem(rng, c, rng() % 2, 3, 3, 1);
    expect(r, zeta(x.differential(), eps) >= zeta(x, eps), "zeta(dx) < zeta(x)");
    // multiplication by p on a fresh sample (no term death)
    DrwElement fresh = rand_elem(rng, c, 0, 2, 3, 0);
    if (!fresh.is_zero() && fresh.divisible_by_p() == false) {
      bool no_death = true;
      for (auto& [k, cc] : fresh.terms)
        if ((cc * p) % pow_u64(p, coeff_modulus(k, c.m)) == 0) no_death = false;
      if (no_death)
        expect(r, zeta(fresh.scaled(p), eps) == zeta(fresh, eps) + mpq_class((unsigned long)(2 * c.n)),
               "zeta(pw) != zeta(w) + 2n");
    }
    WittVec w = rand_witt(rng, c, 3);
    // Verschiebung equality
    std::uint32_t uu = 1 + rng() % 2;
    WittVec vw = w;
    for (std::uint32_t s = 0; s < uu; ++s) vw = vw.verschiebung();
    expect(r, gamma_id(vw, eps, b).value ==
                  gamma_id(w, eps / mpq_class((unsigned long)pow_u64(p, uu)), b).value + mpq_class(uu),
           "gamma(V^u w) != u + gamma_{eps/p^u}(w)");
    // sandwich
    mpq_class twon((unsigned long)(2 * c.n));
    DrwElement xw = from_witt(w);
    expect(r, gamma_id(w, eps / twon, b).value.scaled(twon) >= zeta(xw, eps), "sandwich upper failed");
    expect(r, zeta(xw, eps) >= gamma_id(w, eps, b).value, "sandwich lower failed");
    // radii rescaling
    mpq_class mm = radii_min_ratio(b2, b), MM = radii_max_ratio(b2, b);
    expect(r, gamma_id(w, mm * eps, b2).value >= gamma_id(w, eps, b).value, "radii rescaling (m) failed");
    expect(r, gamma_id(w, eps, b).value >= gamma_id(w, MM * eps, b2).value, "radii rescaling (M) failed");
    // functoriality for three explicit morphisms
    struct Mor {
      const std::vector<PolyFp>* img;
      std::uint32_t src_n, dst_n, M;
    };
    std::vector<Mor> mors = {{&cube, 1, 1, 3}, {&two_to_one, 2, 1, 2}, {&one_to_two, 1, 2, 2}};
    for (auto& mor : mors) {
      RingContext cs(2, mor.src_n, 2), cd(2, mor.dst_n, 2);
      DrwElement xx = rand_elem(rng, cs, 0, 2);
      mpq_class scaled_eps = eps * (unsigned long)(2 * mor.src_n) * (unsigned long)mor.M;
      XReal lhs = zeta(induced_map(*mor.img, xx, cd), eps);
      XReal rhs = zeta(xx, scaled_eps).scaled(mpq_class(1, (unsigned long)(2 * mor.src_n)));
      expect(r, lhs >= rhs, "functoriality bound failed");
    }
  }
  return r;
}

/// 8. Lazard suite.
inline CheckReport criterion8(std::uint32_t seed) {
  CheckReport r("Lazard morphism suite");
  std::mt19937 rng(seed);
  RingContext c(2, 1, 3);
  FrobLift can = FrobLift::canonical(c, 6);
  FrobLift F = FrobLift::from_deltas(c, 6, {PolyZ::variable(1, 0)});

  // t_Frob~ = Teichmuller on monomials
  for (std::uint32_t d = 0; d <= 5; ++d)
    expect(r, t_F(can, PolyZ::variable(1, 0, d), 3) ==
                  WittVec::teichmuller(c, PolyFp::variable(2, 1, 0, d)),
           "t_Frob~ is not Teichmuller on a monomial");
  // worked perturbed value
  WittVec t = t_F(F, PolyZ::variable(1, 0), 3);
  auto X = PolyFp::variable(2, 1, 0);
  expect(r, t == WittVec(c, {X, X, X.pow(3) + X.pow(2) + X}), "worked t_F(X) value mismatch");
  // v_F in V(W) and Fil^1
  for (int it = 0; it < 20; ++it) {
    PolyZ P(1);
    std::uniform_int_distribution<std::uint32_t> de(0, 3), dc2(0, 5);
    for (int k = 0; k < 2; ++k) P.add_term({de(rng)}, dc2(rng));
    expect(r, v_F(F, P, 3).coords[0].is_zero(), "v_F(degree 0) not in V(W)");
    PolyZ Q(1);
    for (int k = 0; k < 2; ++k) Q.add_term({de(rng)}, dc2(rng));
    expect(r, v_F_forms(F, FormalForm::monomial_form(P, {Q}), 3).in_fil(1), "v_F(form) not in Fil^1");
    // product formula
    WittVec lhs = v_F(F, P * Q, 3);
    WittVec rhs = v_F(F, P, 3) * v_F(F, Q, 3) + t_F(can, P, 3) * v_F(F, Q, 3) + v_F(F, P, 3) * t_F(can, Q, 3);
    expect(r, lhs == rhs, "v_F product formula failed");
  }
  // mod-p injectivity: i_F is the identity on a degree <= 6 spanning set
  RingContext c1(2, 1, 1);
  for (std::uint32_t d = 0; d <= 5; ++d)
    for (int with_dx : {0, 1}) {
      std::vector<PolyZ> dqs;
      if (with_dx) dqs.push_back(PolyZ::variable(1, 0));
      if (d + with_dx > 6) continue;
      DrwElement img = t_F_forms(F, FormalForm::monomial_form(PolyZ::variable(1, 0, d), dqs), 3).truncated(1);
      DrwElement expect_elem = teichmuller_elem(c1, PolyFp::variable(2, 1, 0, d));
      if (with_dx) expect_elem = multiply(expect_elem, teichmuller_elem(c1, X).differential());
      expect(r, img == expect_elem, "mod-p projection of t_F is not the identity on Omega");
    }
  // estimate bounds at the reported delta
  std::vector<mpq_class> grid = {mpq_class(1), mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8), mpq_class(1, 16)};
  std::vector<PolyZ> samples = {PolyZ::variable(1, 0), PolyZ::variable(1, 0).pow(3),
                                PolyZ::variable(1, 0) + PolyZ::constant(1, 1)};
  auto est = estimate_v_F(F, 3, grid, {mpq_class(1)}, mpq_class(1, 2), 8, samples);
  expect(r, est.found, "no grid epsilon certified the v_F bounds");
  if (est.found) {
    for (std::uint64_t a = 0; a <= 8; ++a) {
      WittVec vf = v_F(F, PolyZ::variable(1, 0, (std::uint32_t)a), 3);
      expect(r, gamma_id(vf, est.delta, {mpq_class(1)}).value >= XReal(mpq_class(1, 2) - est.delta * (unsigned long)a),
             "mingammaepsilon bound fails at the reported delta");
    }
    for (auto& P : samples) {
      WittVec tcan = t_F(can, P, 3);
      expect(r, zeta(from_witt(v_F(F, P, 3)), est.delta) >= zeta(from_witt(tcan), est.delta) + mpq_class(1, 2),
             "vfgamma zeta bound fails at the reported delta");
    }
  }
  return r;
}

inline EtalePresentation builtin_artin_schreier() {
  EtalePresentation pres;
  pres.p = 2;
  pres.n = 1;
  pres.localizer = PolyFp::constant(2, 1, 1);
  pres.rank = 2;
  LocRing R = LocRing::plain(2, 1);
  pres.alg.base = R;
  pres.alg.rank = 2;
  auto X = R.from_poly(PolyFp::variable(2, 1, 0));
  pres.alg.table.assign(2, std::vector<std::vector<LocPoly>>(2, std::vector<LocPoly>(2, R.zero())));
  pres.alg.table[0][0] = {R.one(), R.zero()};
  pres.alg.table[0][1] = {R.zero(), R.one()};
  pres.alg.table[1][0] = {R.zero(), R.one()};
  pres.alg.table[1][1] = {X, R.one()};
  pres.model_n = 1;
  auto W = PolyFp::variable(2, 1, 0);
  pres.model_images = {W.pow(2) + W, PolyFp::constant(2, 1, 1), W};
  return pres;
}

inline EtalePresentation builtin_nilpotent(std::uint32_t p) {
  EtalePresentation pres;
  pres.p = p;
  pres.n = 1;
  pres.localizer = PolyFp::constant(p, 1, 1);
  pres.rank = p;
  LocRing R = LocRing::plain(p, 1);
  pres.alg.base = R;
  pres.alg.rank = p;
  pres.alg.table.assign(p, std::vector<std::vector<LocPoly>>(p, std::vector<LocPoly>(p, R.zero())));
  for (std::uint32_t i = 0; i < p; ++i)
    for (std::uint32_t j = 0; j < p; ++j)
      if (i + j < p) pres.alg.table[i][j][i + j] = R.one();
  return pres;
}

/// 9. relatively perfect suite.
inline CheckReport criterion9(int samples, std::uint32_t seed) {
  CheckReport r("relatively perfect extensions");
  std::mt19937 rng(seed);
  auto pres = builtin_artin_schreier();
  auto chk = check_relatively_perfect(pres);
  expect(r, chk.ok, "Artin-Schreier check failed");
  if (chk.ok) {
    // det(U0) = 1
    LocPoly det = detail::loc_det(pres.alg.base, chk.u0);
    expect(r, pres.alg.base.eq(det, pres.alg.base.one()), "det(U0) != 1");
  }
  expect(r, !check_relatively_perfect(builtin_nilpotent(2)).ok, "nilpotent algebra accepted (p=2)");
  expect(r, !check_relatively_perfect(builtin_nilpotent(3)).ok, "nilpotent algebra accepted (p=3)");

  const TableAlgebra& A = pres.alg;
  for (int it = 0; it < samples; ++it) {
    std::uint32_t m = 1 + rng() % 3;
    GenWitt<TableAlgebra> w = GenWitt<TableAlgebra>::zero(A, m);
    std::uniform_int_distribution<std::uint32_t> de(0, 2), dc2(0, 1), dt(0, 2);
    for (std::uint32_t u = 0; u < m; ++u)
      for (std::uint32_t i = 0; i < pres.rank; ++i) {
        PolyFp f(2, 1);
        for (std::uint32_t k = dt(rng); k; --k) f.add_term({de(rng)}, dc2(rng));
        w.coords[u][i] = A.base.from_poly(f);
      }
    auto rs = witt_basis_decompose(w, pres);
    expect(r, gw_sub(A, 2, witt_basis_recompose(rs, pres, m), w).is_zero(A), "round trip failed");
    std::uint32_t wd = gw_vV(A, w).value_or(m), rd = m;
    for (auto& ri : rs) rd = std::min(rd, gw_vV(A.base, ri).value_or(m));
    expect(r, wd == rd, "V-divisibility equivalence failed");
    // W(base)-linearity: scaling by a base Witt vector scales each r(i)
    GenWitt<LocRing> scal = GenWitt<LocRing>::teichmuller(A.base, m, A.base.from_poly(rand_poly(rng, 2, 1, 2)));
    GenWitt<TableAlgebra> scal_alg = GenWitt<TableAlgebra>::zero(A, m);
    for (std::uint32_t u = 0; u < m; ++u) scal_alg.coords[u] = A.from_base(scal.coords[u]);
    auto rs2 = witt_basis_decompose(gw_mul(A, 2, scal_alg, w), pres);
    bool linear = true;
    for (std::uint32_t i = 0; i < pres.rank; ++i) {
      GenWitt<LocRing> want = gw_mul(A.base, 2, scal, rs[i]);
      for (std::uint32_t u = 0; u < m; ++u)
        if (!A.base.eq(want.coords[u], rs2[i].coords[u])) linear = false;
    }
    expect(r, linear, "W(base)-linearity failed");
  }
  return r;
}

/// 10. main-theorem engine.
inline CheckReport criterion10(int samples, std::uint32_t seed) {
  CheckReport r("main-theorem decomposition engine");
  std::mt19937 rng(seed);

  // polynomial case: divisibility and Fil equivalences
  for (int it = 0; it < samples; ++it) {
    std::uint32_t p = it % 2 ? 2 : 3;
    RingContext c(p, 1 + rng() % 2, 2 + rng() % 2);
    FrobLift F = it % 3 == 0 ? FrobLift::canonical(c, 6)
                             : FrobLift::from_deltas(c, 6, [&] {
                                 std::vector<PolyZ> ds;
                                 for (std::uint32_t i = 0; i < c.n; ++i)
                                   ds.push_back(i == 0 ? PolyZ::variable(c.n, 0) : PolyZ(c.n));
                                 return ds;
                               }());
    std::uint32_t t = rng() % 2;
    DrwElement x = rand_elem(rng, c, t, 2);
    auto res = poly_structure_decompose(x, F, c.m);
    expect(r, recompose(res, F) == x, "poly decomposition does not recompose");
    auto zero = poly_structure_decompose(DrwElement::zero(c, t), F, c.m);
    expect(r, zero.trivial(), "decomposition of 0 is not 0");
    if (!x.is_zero()) {
      // p | px and the coefficients of its decomposition
      auto resp = poly_structure_decompose(x.scaled(p), F, c.m);
      bool all_div = true;
      auto chkmap = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, bool fil) {
        for (auto& [k, s] : mp) {
          std::uint32_t kmod = fil ? coeff_modulus(k, c.m) : c.m;
          std::uint32_t need = std::min<std::uint32_t>(1, kmod);
          mpz_class pn;
          mpz_ui_pow_ui(pn.get_mpz_t(), p, need);
          for (auto& [e, coeff] : s.terms)
            if (!mpz_divisible_p(coeff.get_mpz_t(), pn.get_mpz_t())) all_div = false;
        }
      };
      chkmap(resp.h_coeff, false);
      chkmap(resp.g_coeff, true);
      chkmap(resp.dg_coeff, true);
      expect(r, all_div, "p-divisibility of the decomposition failed");
      // Fil criterion through V
      DrwElement vx = x.verschiebung_op().truncated(c.m);
      auto resv = poly_structure_decompose(vx, F, c.m);
      bool fil_ok = true;
      auto filmap = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp) {
        for (auto& [k, s] : mp) {
          std::uint32_t need = 1 > k.weight.u() ? 1 - k.weight.u() : 0;
          need = std::min(need, coeff_modulus(k, c.m));
          mpz_class pn;
          mpz_ui_pow_ui(pn.get_mpz_t(), p, need);
          for (auto& [e, coeff] : s.terms)
            if (!mpz_divisible_p(coeff.get_mpz_t(), pn.get_mpz_t())) fil_ok = false;
        }
      };
      filmap(resv.h_coeff);
      filmap(resv.g_coeff);
      filmap(resv.dg_coeff);
      expect(r, fil_ok, "Fil criterion failed");
    }
  }

  // etale case over Artin-Schreier at m = 2, t <= 1
  auto pres = builtin_artin_schreier();
  std::uint32_t m = 2;
  RingContext cT = pres.ctx_T(m), cM = pres.ctx_model(m);
  FrobLift FT = pres.lift(m);
  std::vector<DrwElement> cases;
  cases.push_back(teichmuller_elem(cT, PolyFp::variable(2, cT.n, 0)).differential());
  cases.push_back(teichmuller_elem(cT, PolyFp::variable(2, cT.n, pres.z_slot(1))).differential());
  cases.push_back(from_witt(t_F(FT, PolyZ::variable(cT.n, pres.z_slot(1)), m)));
  cases.push_back(from_witt(t_F(FT, PolyZ::variable(cT.n, 0) * PolyZ::variable(cT.n, pres.z_slot(1)), m))
                      .differential());
  for (auto& x : cases) {
    auto res = etale_structure_decompose(x, pres, m, mpq_class(1, 4));
    DrwElement re = recompose(res, FT);
    expect(r, induced_map(pres.model_images, re, cM) == induced_map(pres.model_images, x, cM),
           "etale decomposition does not recompose through W(phi)");
    if (res.cert.certified) {
      // re-verify the attached zeta certificate
      mpq_class eps = res.cert.eps;
      XReal zx = zeta(x, eps);
      bool ok = true;
      auto ver = [&](const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, std::uint32_t deg) {
        if (!zx.finite()) return;
        for (auto& [key, s] : mp) {
          DrwElement e(cT, deg);
          e.add_term(key, 1);
          XReal ze = zeta(e, eps);
          if (!ze.finite()) continue;
          if (!(zeta(from_witt(t_F(FT, s, m)), eps) >= XReal(zx.v - ze.v - mpq_class(1, 4)))) ok = false;
        }
      };
      ver(res.h_coeff, res.degree);
      ver(res.g_coeff, res.degree);
      if (res.degree >= 1) ver(res.dg_coeff, res.degree - 1);
      expect(r, ok, "zeta certificate did not re-verify");
    }
  }
  auto zr = etale_structure_decompose(DrwElement::zero(cT, 1), pres, m, mpq_class(1, 4));
  expect(r, zr.trivial(), "etale decomposition of 0 is not 0");

  // overconvergent Witt decomposition with divisibility pattern + certificates
  std::vector<mpq_class> grid = {mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8)};
  for (int it = 0; it < std::max(4, samples / 8); ++it) {
    std::uint32_t depth = rng() % 2;
    GenWitt<TableAlgebra> w = GenWitt<TableAlgebra>::zero(pres.alg, m);
    std::uniform_int_distribution<std::uint32_t> de(0, 2), dc2(0, 1);
    for (std::uint32_t u = depth; u < m; ++u)
      for (std::uint32_t i = 0; i < pres.rank; ++i) {
        PolyFp f(2, 1);
        for (int k = 0; k < 2; ++k) f.add_term({de(rng)}, dc2(rng));
        w.coords[u][i] = pres.alg.base.from_poly(f);
      }
    auto dec = overconv_witt_decompose(w, pres, m, mpq_class(1, 4), grid);
    expect(r, dec.input_depth >= depth, "depth detection failed");
    bool pattern = true;
    for (auto& [a, ha] : dec.h) {
      std::uint32_t need = dec.input_depth > a.u() ? dec.input_depth - a.u() : 0;
      mpz_class pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), 2, need);
      for (auto& [e, coeff] : ha.terms)
        if (!mpz_divisible_p(coeff.get_mpz_t(), pk.get_mpz_t())) pattern = false;
    }
    expect(r, pattern, "divisionbypsum pattern failed");
    if (dec.cert.certified) {
      std::vector<mpq_class> b(pres.n_T(), 1);
      std::vector<PolyFp> wpre;
      for (auto& cc : w.coords) wpre.push_back(pres.preimage(cc));
      GammaResult low = gamma_presented(wpre, dec.cert.eps, b, 2);
      bool ok = true;
      for (auto& [a, ha] : dec.h) {
        std::uint32_t ua = a.u();
        Expo frac(cT.n, 0);
        for (std::uint32_t i = 0; i < cT.n; ++i) frac[i] = (std::uint32_t)a.entries[i].mul_p(2, ua).num;
        WittVec e = WittVec::teichmuller(cT.with_len(m - ua), PolyFp::monomial(2, frac));
        for (std::uint32_t s2 = 0; s2 < ua; ++s2) e = e.verschiebung();
        if (!(gamma_id(t_F(FT, ha, m) * e, dec.cert.eps, b).value >= low.value + XReal(-mpq_class(1, 4)))) ok = false;
      }
      expect(r, ok, "gamma certificate did not re-verify");
    }
  }
  return r;
}

}  // namespace checks
}  // namespace wdrw
