#pragma once

#include "wdrw/oracle.hpp"

namespace wdrw {

/// Product in the graded-commutative algebra, computed through the model:
/// embed both factors, multiply exactly, extract at the lower level.
inline DrwElement multiply(const DrwElement& x, const DrwElement& y) {
  require_same_ring(x.ctx, y.ctx);
  std::uint32_t m2 = std::min(x.ctx.m, y.ctx.m);
  ModelForm prod = model_mul(embed(x), embed(y));
  return extract(prod, x.ctx.with_len(m2));
}

/// F: level m -> m-1, computed through the model (phi on exponents).
inline DrwElement frobenius_op(const DrwElement& x) {
  if (x.ctx.m == 0) throw LengthUnderflow();
  return extract(model_F(embed(x)), x.ctx.with_len(x.ctx.m - 1));
}

inline DrwElement frobenius_witt(const DrwElement& x, std::uint32_t times) {
  DrwElement r = x;
  for (std::uint32_t i = 0; i < times; ++i) r = frobenius_op(r);
  return r;
}

inline DrwElement teichmuller_elem(const RingContext& c, const PolyFp& r) {
  return from_witt(WittVec::teichmuller(c, r));
}

inline DrwElement d_teichmuller(const RingContext& c, const PolyFp& r) {
  return teichmuller_elem(c, r).differential();
}

/// One output line of the mod-p rewriting of Prop-style p^u-linearization:
/// the term s * [X^(p^u c)] e(eta, a, I).
struct RewriteTerm {
  Expo cofactor;       // c, integral
  BasicDiffKey key;    // (a, I)
  std::uint64_t coeff; // in F_p (0 allowed: the candidate set is the basis)
};

/// Unique mod-p rewriting of e(eta, b, L) as an F_p-combination of
/// [X^(p^u c)] e(eta, a, I) over the reduced candidate set (a_i <= p^u with
/// equality only inside I, I_0 nonempty, #I = #L, b = a + p^u c).
/// The returned list enumerates the full candidate basis, so its size is
/// binom(#Supp(b) - 1, #L).
inline std::vector<RewriteTerm> rewrite_mod_p(std::uint64_t eta, const WeightFn& b,
                                              const std::vector<std::uint32_t>& L, std::uint32_t u,
                                              const RingContext& ctx) {
  if (u < 1 || !b.is_integral() || b.vp() != 0) throw PreconditionViolated("rewrite: need integral b, v_p(b)=0, u>=1");
  BasicDiffKey lkey(b, L);
  if (lkey.i0_empty()) throw PreconditionViolated("rewrite: L_0 empty");
  std::uint64_t pu = pow_u64(ctx.p, u);

  auto supp = b.support();
  std::vector<std::uint32_t> P, Q;
  for (auto i : supp) {
    PadicFrac e = b.entries[i];
    (e.num % pu == 0 ? P : Q).push_back(i);
  }
  // order-minimal element of Q (valuations of b on Q are < u; global min is there)
  std::uint32_t qmin = Q.front();
  for (auto i : Q)
    if (b.order_less(i, qmin)) qmin = i;
  std::vector<std::uint32_t> Qfree;
  for (auto i : Q)
    if (i != qmin) Qfree.push_back(i);

  std::vector<RewriteTerm> out;
  std::uint32_t want = (std::uint32_t)L.size();
  for (std::uint32_t l = 0; l <= want; ++l) {
    if (l > P.size() || want - l > Qfree.size()) continue;
    std::vector<std::vector<std::uint32_t>> SP, SQ;
    detail::subsets_of_size(ctx.n, l, P, SP);
    detail::subsets_of_size(ctx.n, want - l, Qfree, SQ);
    for (auto& sp : SP)
      for (auto& sq : SQ) {
        WeightFn a(ctx.p, ctx.n);
        Expo c(ctx.n, 0);
        for (auto i : Q) a.entries[i] = PadicFrac(b.entries[i].num % pu, 0, ctx.p);
        for (auto i : Q) c[i] = (std::uint32_t)((b.entries[i].num - a.entries[i].num) / pu);
        for (auto i : P) c[i] = (std::uint32_t)(b.entries[i].num / pu);
        for (auto i : sp) {
          a.entries[i] = PadicFrac(pu, 0, ctx.p);
          c[i] -= 1;
        }
        std::vector<std::uint32_t> I = sp;
        I.insert(I.end(), sq.begin(), sq.end());
        out.push_back(RewriteTerm{std::move(c), BasicDiffKey(std::move(a), std::move(I)), 0});
      }
  }

  // solve for the unique Z_(p)-coefficients in the model, then reduce mod p
  std::uint32_t cap = ctx.m + u + 2;
  RingContext big(ctx.p, ctx.n, std::max<std::uint32_t>(1, ctx.m));
  DrwElement target(big, (std::uint32_t)L.size());
  target.add_term(lkey, 1);
  ModelForm rhs_f = embed(target);

  std::map<std::uint64_t, std::size_t> rowof;
  auto row_index = [&](std::uint64_t mask) { return rowof.emplace(mask, rowof.size()).first->second; };
  std::vector<std::map<std::uint64_t, PRational>> colterms;
  for (auto& rt : out) {
    DrwElement probe(big, (std::uint32_t)L.size());
    probe.add_term(rt.key, 1);
    ModelForm mf = model_mul(model_monomial(ctx.p, cap, WeightFn::from_expo(ctx.p, rt.cofactor).mul_p(u),
                                            PRational::integer(1, ctx.p)),
                             embed(probe));
    std::map<std::uint64_t, PRational> col;
    for (auto& [mk, c] : mf.terms) {
      row_index(mk.dlog);
      col.emplace(mk.dlog, c);
    }
    colterms.push_back(std::move(col));
  }
  for (auto& [mk, c] : rhs_f.terms) row_index(mk.dlog);

  std::size_t nrows = rowof.size(), ncols = out.size();
  std::vector<std::vector<mpq_class>> A(nrows, std::vector<mpq_class>(ncols, 0));
  std::vector<mpq_class> rhs(nrows, 0);
  for (std::size_t j = 0; j < ncols; ++j)
    for (auto& [mask, c] : colterms[j]) A[rowof[mask]][j] = c.to_mpq(ctx.p);
  for (auto& [mk, c] : rhs_f.terms) rhs[rowof[mk.dlog]] = c.to_mpq(ctx.p);

  auto x = detail::solve_exact(std::move(A), std::move(rhs));
  for (std::size_t j = 0; j < ncols; ++j) {
    if (!mpq_p_integral(x[j], ctx.p)) throw NonIntegralResult("rewrite coefficient not in Z_(p)");
    out[j].coeff = mpq_residue(x[j], ctx.p, 1) * (eta % ctx.p) % ctx.p;
  }
  return out;
}

/// Basis streams of Ker(W_{m+1} Omega^t -> W_m Omega^t) mod p over the
/// perfect rebar cage, as a free k[X]-module: H-part (only for m = 0),
/// G-part (keys with u(a) = m+... the G(t,m) set), and the G(t-1,m) keys
/// whose d spans the third summand.
struct KernelBasis {
  std::vector<BasicDiffKey> h_part;
  std::vector<BasicDiffKey> g_part;
  std::vector<BasicDiffKey> dg_part;  // apply d to these
};

inline KernelBasis kernel_basis_mod_p(std::uint32_t t, std::uint32_t m, const RingContext& ctx,
                                      std::uint64_t max_weight) {
  KernelBasis out;
  if (m == 0) out.h_part = enumerate_H(t, ctx);
  // max_weight bounds the total weight |b| of the emitted keys; the
  // pre-division weights a = p^m b|frac may be up to p^m max_weight.
  auto pick_level = [&](std::int64_t deg) {
    std::vector<BasicDiffKey> keep;
    if (m == 0) return keep;
    for (auto& k : enumerate_G(deg, ctx, m, max_weight * pow_u64(ctx.p, m)))
      if (k.weight.u() == m && cmp(k.weight.total(), mpq_class((unsigned long)max_weight)) <= 0)
        keep.push_back(k);
    return keep;
  };
  out.g_part = pick_level((std::int64_t)t);
  out.dg_part = pick_level((std::int64_t)t - 1);
  return out;
}

/// k[X]-module action on kernel generators: P . e = [P] * e (Teichmuller
/// twist), exact at level m.
inline DrwElement teich_twist(const PolyFp& P, const DrwElement& e) {
  return multiply(teichmuller_elem(e.ctx, P), e);
}

/// Generating polynomial relation of a kernel class: for a pure fractional
/// key (c, L) with u(c) = m, the expansion e(1,c,L) = sum [P_e] e over the
/// kernel basis keys e with weight-homogeneity deg(P_e) + |a(e)| = |c|.
/// For integral keys (m = 0) the expansion lands on the H basis through the
/// Omega-coordinates.
inline std::map<BasicDiffKey, PolyFp, KeyLess> kernel_certify(const BasicDiffKey& ckey, std::uint32_t m,
                                                              const RingContext& ctx) {
  std::map<BasicDiffKey, PolyFp, KeyLess> out;
  std::uint32_t u = ckey.weight.u();
  if (u == 0) {
    if (m != 0) throw PreconditionViolated("integral keys certify at m = 0");
    RingContext c1(ctx.p, ctx.n, 1);
    DrwElement e(c1, ckey.degree());
    e.add_term(ckey, 1);
    ModelForm f = embed(e);
    for (auto& [k, coeff] : f.terms) {
      std::vector<std::uint32_t> J;
      Expo mono(ctx.n, 0);
      for (std::uint32_t i = 0; i < ctx.n; ++i) {
        PadicFrac w = k.expo.entries[i];
        mono[i] = (std::uint32_t)w.num - (((k.dlog >> i) & 1) ? 1 : 0);
        if ((k.dlog >> i) & 1) J.push_back(i);
      }
      BasicDiffKey hkey(WeightFn::indicator(ctx.p, ctx.n, J), J);
      auto [it, fresh] = out.emplace(hkey, PolyFp(ctx.p, ctx.n));
      it->second.add_term(std::move(mono), coeff.residue(ctx.p, 1));
    }
  } else {
    if (u != m) throw PreconditionViolated("kernel class needs u(c) = m");
    if (ckey.i0_empty()) throw PreconditionViolated("pure fractional key needed");
    auto rw = rewrite_mod_p(1, ckey.weight.mul_p(u), ckey.parts, u, ctx);
    for (auto& rt : rw) {
      if (rt.coeff == 0) continue;
      WeightFn gw = rt.key.weight;
      for (std::uint32_t s = 0; s < u; ++s) gw = gw.div_p();
      BasicDiffKey gkey(gw, rt.key.parts);
      auto [it, fresh] = out.emplace(gkey, PolyFp(ctx.p, ctx.n));
      it->second.add_term(rt.cofactor, rt.coeff);
    }
  }
  // certify the homogeneity relation deg(P_e) + |a(e)| = |c|
  mpq_class total = ckey.weight.total();
  for (auto& [key, P] : out)
    for (auto& [e, coeff] : P.terms)
      if (mpq_class((unsigned long)expo_total(e)) + key.weight.total() != total)
        throw NonIntegralResult("kernel certification: homogeneity violated");
  return out;
}

/// Index bookkeeping of the general mod-p kernel decomposition over a rebar
/// cage: labeled tuples (u, key, b-label) for the H-, G- and dG-summands.
/// Pure enumeration; no arithmetic happens over non-perfect cages.
struct CageIndexFamily {
  // (u used in the summand, key, label from B(u', m - u'))
  std::vector<std::tuple<std::uint32_t, BasicDiffKey, std::uint64_t>> h_part;  // u' = 0
  std::vector<std::tuple<std::uint32_t, BasicDiffKey, std::uint64_t>> g_part;
  std::vector<std::tuple<std::uint32_t, BasicDiffKey, std::uint64_t>> dg_part;
};

inline CageIndexFamily kernel_index_family(std::uint32_t t, std::uint32_t m, const RingContext& ctx,
                                           const RebarCage& cage, std::uint64_t max_weight) {
  CageIndexFamily out;
  for (auto b : cage.labels(0, m))
    for (auto& k : enumerate_H(t, ctx)) out.h_part.emplace_back(0, k, b);
  auto fill = [&](std::int64_t deg, auto& sink) {
    if (deg < 0) return;
    for (std::uint32_t u = 1; u <= m; ++u) {
      auto labels = cage.labels(u, m - u);
      if (labels.empty()) continue;
      // max_weight bounds the emitted key weight |b|, as in kernel_basis_mod_p
      for (auto& k : enumerate_G(deg, ctx, u, max_weight * pow_u64(ctx.p, u)))
        if (k.weight.u() == u && cmp(k.weight.total(), mpq_class((unsigned long)max_weight)) <= 0)
          for (auto b : labels) sink.emplace_back(u, k, b);
    }
  };
  fill((std::int64_t)t, out.g_part);
  fill((std::int64_t)t - 1, out.dg_part);
  return out;
}

/// Functorial map W_m Omega(phi) along a k-algebra morphism
/// phi: F_p[X_1..X_ns] -> F_p[Y_1..Y_nd] given by images of the X_i.
/// Computed factor by factor from the canonical form.
inline DrwElement induced_map(const std::vector<PolyFp>& images, const DrwElement& x, const RingContext& dst) {
  if (images.size() != x.ctx.n) throw ContextMismatch("induced_map: arity");
  auto teich_of_monomial = [&](const WeightFn& w, std::uint32_t pw_scale, const RingContext& at) {
    // [phi(X^(p^pw_scale * w))] as a Witt vector over the target ring
    Expo e(x.ctx.n, 0);
    for (std::uint32_t i = 0; i < x.ctx.n; ++i) {
      PadicFrac f = w.entries[i].mul_p(x.ctx.p, pw_scale);
      if (!f.is_integral()) throw NonIntegralResult("induced_map: fractional exponent");
      e[i] = (std::uint32_t)f.num;
    }
    PolyFp img = PolyFp::monomial(x.ctx.p, e).subst(images);
    return WittVec::teichmuller(at, img);
  };
  DrwElement out(dst, x.degree);
  for (auto& [key, eta] : x.terms) {
    const WeightFn& a = key.weight;
    std::uint32_t u = a.u();
    if (u >= dst.m) continue;  // V^u lands in Fil^m
    auto seg = key.segments();
    DrwElement factor(dst, 0);
    std::size_t gfrom = 1;
    std::size_t head = (!key.i0_empty() || u == 0) ? 0 : 1;
    {
      WittVec w = teich_of_monomial(a.restrict_to(seg[head]), u, dst.with_len(dst.m - u));
      w = w.scaled_int(mpz_class((unsigned long)eta));
      for (std::uint32_t i = 0; i < u; ++i) w = w.verschiebung();
      factor = from_witt(w);
      if (head == 1) {
        factor = factor.differential();
        gfrom = 2;
      }
    }
    bool dead = false;
    for (std::size_t l = gfrom; l < seg.size() && !dead; ++l) {
      WeightFn al = a.restrict_to(seg[l]);
      std::int32_t v = al.vp();
      std::uint32_t ul = al.u();
      std::uint32_t fexp = (std::uint32_t)((std::int32_t)ul + v);  // u(a_l) + v_p(a_l) >= 0
      if (dst.m + fexp <= ul) {
        dead = true;  // the inner V^ul vanishes at this level
        break;
      }
      std::uint32_t start = dst.m + fexp - ul;
      WeightFn intg = al;  // p^{-v} a_l
      for (std::int32_t i = 0; i < v; ++i) intg = intg.div_p();
      if (v < 0) intg = al.mul_p(ul);
      WittVec w = teich_of_monomial(intg, 0, dst.with_len(start));
      for (std::uint32_t i = 0; i < ul; ++i) w = w.verschiebung();
      DrwElement g = from_witt(w).differential();
      for (std::uint32_t i = 0; i < fexp; ++i) g = frobenius_op(g);
      factor = multiply(factor, g);
    }
    if (!dead) out = out + factor;
  }
  return out;
}

}  // namespace wdrw
