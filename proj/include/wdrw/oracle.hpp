#pragma once

#include <gmpxx.h>

#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "wdrw/drw.hpp"

namespace wdrw {

/// Rational with p-power denominator: num / p^s, num coprime to p or zero.
/// Negative s means a p-multiple.
struct PRational {
  mpz_class num = 0;
  std::int32_t s = 0;

  PRational() = default;
  PRational(mpz_class n, std::int32_t s_, std::uint32_t p) : num(std::move(n)), s(s_) { normalize(p); }
  static PRational integer(mpz_class n, std::uint32_t p) { return PRational(std::move(n), 0, p); }

  void normalize(std::uint32_t p) {
    if (num == 0) {
      s = 0;
      return;
    }
    while (mpz_divisible_ui_p(num.get_mpz_t(), p)) {
      mpz_divexact_ui(num.get_mpz_t(), num.get_mpz_t(), p);
      --s;
    }
  }
  bool is_zero() const { return num == 0; }
  std::int32_t vp() const { return -s; }  // undefined for zero
  bool p_integral() const { return num == 0 || s <= 0; }

  PRational add(const PRational& o, std::uint32_t p) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    std::int32_t t = std::max(s, o.s);
    mpz_class a = num, b = o.num, pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, (unsigned)(t - s));
    a *= pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, (unsigned)(t - o.s));
    b *= pw;
    return PRational(a + b, t, p);
  }
  PRational neg() const {
    PRational r = *this;
    r.num = -r.num;
    return r;
  }
  PRational mul(const PRational& o, std::uint32_t) const {
    PRational r;
    r.num = num * o.num;
    r.s = (num == 0 || o.num == 0) ? 0 : s + o.s;
    if (r.num == 0) r.s = 0;
    return r;
  }
  PRational mul_pk(std::int32_t k) const {  // multiply by p^k
    PRational r = *this;
    if (r.num != 0) r.s -= k;
    return r;
  }
  mpq_class to_mpq(std::uint32_t p) const {
    mpz_class pw;
    mpq_class q(num);
    if (s > 0) {
      mpz_ui_pow_ui(pw.get_mpz_t(), p, (unsigned)s);
      q /= mpq_class(pw);
    } else if (s < 0) {
      mpz_ui_pow_ui(pw.get_mpz_t(), p, (unsigned)(-s));
      q *= mpq_class(pw);
    }
    return q;
  }
  bool operator==(const PRational& o) const { return num == o.num && s == o.s; }

  // residue mod p^k; requires p-integrality
  std::uint64_t residue(std::uint32_t p, std::uint32_t k) const {
    if (!p_integral()) throw NonIntegralExtraction("residue of non p-integral value");
    if (k == 0 || num == 0) return 0;
    std::uint64_t pk = pow_u64(p, k);
    mpz_class r = num % (unsigned long)pk;
    if (r < 0) r += (unsigned long)pk;
    std::uint64_t x = r.get_ui() % pk;
    std::uint64_t depth = (std::uint64_t)(-s);
    for (std::uint64_t i = 0; i < depth && x; ++i) x = (x * p) % pk;
    return x;
  }
};

/// Exponent-vector + dlog-set key of the rational de Rham model.
struct ModelKey {
  WeightFn expo;            // exponent vector in (Z[1/p]_{>=0})^n
  std::uint64_t dlog = 0;   // bitmask of dlog indices, |S| = degree

  int cmp(const ModelKey& o) const {
    int c = expo.cmp(o.expo);
    if (c) return c;
    if (dlog != o.dlog) return dlog < o.dlog ? -1 : 1;
    return 0;
  }
  bool operator==(const ModelKey& o) const { return cmp(o) == 0; }
};
struct ModelKeyLess {
  bool operator()(const ModelKey& a, const ModelKey& b) const { return a.cmp(b) < 0; }
};

/// Finite rational differential form: the embedding target for W_m Omega.
/// Monomials are written on the dlog basis X^e dlog X_{s1} ^ ... ^ dlog X_{st}
/// with s1 < ... < st.
class ModelForm {
 public:
  std::uint32_t p = 2;
  std::uint32_t n = 0;
  std::uint32_t degree = 0;
  std::uint32_t max_pden = 32;  // exponent-denominator cap, p^max_pden
  std::map<ModelKey, PRational, ModelKeyLess> terms;

  ModelForm() = default;
  ModelForm(std::uint32_t p_, std::uint32_t n_, std::uint32_t t, std::uint32_t cap) : p(p_), n(n_), degree(t), max_pden(cap) {}

  bool is_zero() const { return terms.empty(); }
  bool operator==(const ModelForm& o) const { return degree == o.degree && terms == o.terms; }

  void add_term(ModelKey k, PRational c) {
    if (c.is_zero()) return;
    if ((std::uint32_t)std::popcount(k.dlog) != degree) throw DegreeMismatch("model term degree");
    for (auto& e : k.expo.entries)
      if (e.pden > max_pden) throw Error("model exponent denominator cap exceeded");
    auto it = terms.find(k);
    if (it == terms.end()) {
      terms.emplace(std::move(k), std::move(c));
    } else {
      it->second = it->second.add(c, p);
      if (it->second.is_zero()) terms.erase(it);
    }
  }
};

inline ModelForm model_zero(std::uint32_t p, std::uint32_t n, std::uint32_t t, std::uint32_t cap) {
  return ModelForm(p, n, t, cap);
}

inline ModelForm model_monomial(std::uint32_t p, std::uint32_t cap, const WeightFn& e, PRational c,
                                std::uint64_t dlog = 0) {
  ModelForm f(p, e.n(), (std::uint32_t)std::popcount(dlog), cap);
  f.add_term(ModelKey{e, dlog}, std::move(c));
  return f;
}

inline ModelForm model_add(const ModelForm& a, const ModelForm& b) {
  ModelForm r = a;
  for (auto& [k, c] : b.terms) r.add_term(k, c);
  return r;
}

// merge parity when concatenating two sorted dlog lists
inline int wedge_sign(std::uint64_t s1, std::uint64_t s2) {
  int inv = 0;
  for (std::uint64_t m = s1; m; m &= m - 1) {
    int i = std::countr_zero(m);
    inv += std::popcount(s2 & ((std::uint64_t(1) << i) - 1));
  }
  return (inv & 1) ? -1 : 1;
}

inline ModelForm model_mul(const ModelForm& a, const ModelForm& b) {
  if (a.p != b.p || a.n != b.n) throw ContextMismatch();
  ModelForm r(a.p, a.n, a.degree + b.degree, std::max(a.max_pden, b.max_pden));
  for (auto& [k1, c1] : a.terms)
    for (auto& [k2, c2] : b.terms) {
      if (k1.dlog & k2.dlog) continue;
      PRational c = c1.mul(c2, a.p);
      if (wedge_sign(k1.dlog, k2.dlog) < 0) c = c.neg();
      r.add_term(ModelKey{k1.expo + k2.expo, k1.dlog | k2.dlog}, std::move(c));
    }
  return r;
}

// d(c X^e dlog_S) = c sum_i e_i X^e dlog_i ^ dlog_S
inline ModelForm model_d(const ModelForm& f) {
  ModelForm r(f.p, f.n, f.degree + 1, f.max_pden);
  for (auto& [k, c] : f.terms)
    for (std::uint32_t i = 0; i < f.n; ++i) {
      const PadicFrac& ei = k.expo.entries[i];
      if (ei.is_zero() || (k.dlog >> i) & 1) continue;
      PRational coef = c.mul(PRational(PadicFrac::mpz_from_u64(ei.num), (std::int32_t)ei.pden, f.p), f.p);
      int below = std::popcount(k.dlog & ((std::uint64_t(1) << i) - 1));
      if (below & 1) coef = coef.neg();
      r.add_term(ModelKey{k.expo, k.dlog | (std::uint64_t(1) << i)}, std::move(coef));
    }
  return r;
}

// F: exponents scale by p, dlog factors and coefficients fixed.
inline ModelForm model_F(const ModelForm& f) {
  ModelForm r(f.p, f.n, f.degree, f.max_pden);
  for (auto& [k, c] : f.terms) r.add_term(ModelKey{k.expo.mul_p(), k.dlog}, c);
  return r;
}

// V = p * phi^{-1}: exponents divide by p, coefficient gains one p.
inline ModelForm model_V(const ModelForm& f) {
  ModelForm r(f.p, f.n, f.degree, f.max_pden);
  for (auto& [k, c] : f.terms) r.add_term(ModelKey{k.expo.div_p(), k.dlog}, c.mul_pk(1));
  return r;
}

inline ModelForm model_scale(const ModelForm& f, const PRational& c) {
  ModelForm r(f.p, f.n, f.degree, f.max_pden);
  for (auto& [k, v] : f.terms) r.add_term(k, v.mul(c, f.p));
  return r;
}

namespace detail {
// g(a) = F^(u+v) d V^u [X^(p^-v a)] for a nonzero weight a.
inline ModelForm embed_g(const WeightFn& a, std::uint32_t p, std::uint32_t cap) {
  std::int32_t v = a.vp();
  std::uint32_t u = a.u();
  WeightFn integral = a;  // p^{-v} a has integral entries
  for (std::int32_t i = 0; i < v; ++i) integral = integral.div_p();
  if (v < 0) integral = a.mul_p(u);
  ModelForm f = model_monomial(p, cap, integral, PRational::integer(1, p));
  for (std::uint32_t i = 0; i < u; ++i) f = model_V(f);
  f = model_d(f);
  std::int32_t fexp = (std::int32_t)u + v;
  for (std::int32_t i = 0; i < fexp; ++i) f = model_F(f);
  return f;
}
}  // namespace detail

/// Injective graded embedding of the canonical normal form into the rational
/// model; commutes with +, *, d, F, V up to the truncation level (canonical
/// integer lifts of the coefficients are used).
inline ModelForm embed(const DrwElement& x) {
  const RingContext& c = x.ctx;
  std::uint32_t cap = c.m + 2;
  ModelForm out(c.p, c.n, x.degree, cap);
  for (auto& [key, eta] : x.terms) {
    const WeightFn& a = key.weight;
    std::uint32_t u = a.u();
    auto seg = key.segments();
    ModelForm f(c.p, c.n, 0, cap);
    std::size_t gfrom = 1;
    if (!key.i0_empty() || u == 0) {
      WeightFn a0 = a.restrict_to(seg[0]).mul_p(u);  // p^u * a|I0, integral
      f = model_monomial(c.p, cap, a0, PRational::integer(mpz_class((unsigned long)eta), c.p));
      for (std::uint32_t i = 0; i < u; ++i) f = model_V(f);
    } else {
      WeightFn a1 = a.restrict_to(seg[1]).mul_p(u);
      f = model_monomial(c.p, cap, a1, PRational::integer(mpz_class((unsigned long)eta), c.p));
      for (std::uint32_t i = 0; i < u; ++i) f = model_V(f);
      f = model_d(f);
      gfrom = 2;
    }
    for (std::size_t l = gfrom; l < seg.size(); ++l)
      f = model_mul(f, detail::embed_g(a.restrict_to(seg[l]), c.p, cap));
    out = model_add(out, f);
  }
  return out;
}

namespace detail {

// Exact Gaussian elimination with deterministic pivoting (first nonzero in
// column order).  Throws NonIntegralExtraction when inconsistent and
// SingularSystem on column-rank deficiency.
inline std::vector<mpq_class> solve_exact(std::vector<std::vector<mpq_class>> a,  // nrows x ncols
                                          std::vector<mpq_class> rhs) {
  std::size_t nrows = a.size();
  std::size_t ncols = nrows ? a[0].size() : 0;
  std::size_t row = 0;
  std::vector<std::size_t> pivot_of_col(ncols, SIZE_MAX);
  for (std::size_t j = 0; j < ncols && row < nrows; ++j) {
    std::size_t pr = SIZE_MAX;
    for (std::size_t r = row; r < nrows; ++r)
      if (a[r][j] != 0) {
        pr = r;
        break;
      }
    if (pr == SIZE_MAX) continue;
    std::swap(a[row], a[pr]);
    std::swap(rhs[row], rhs[pr]);
    mpq_class piv = a[row][j];
    for (std::size_t r = 0; r < nrows; ++r) {
      if (r == row || a[r][j] == 0) continue;
      mpq_class f = a[r][j] / piv;
      for (std::size_t k = j; k < ncols; ++k) a[r][k] -= f * a[row][k];
      rhs[r] -= f * rhs[row];
    }
    pivot_of_col[j] = row;
    ++row;
  }
  for (std::size_t r = row; r < nrows; ++r)
    if (rhs[r] != 0) throw NonIntegralExtraction("inconsistent extraction system");
  for (std::size_t j = 0; j < ncols; ++j)
    if (pivot_of_col[j] == SIZE_MAX) throw SingularSystem();
  std::vector<mpq_class> x(ncols, 0);
  for (std::size_t j = 0; j < ncols; ++j) {
    std::size_t r = pivot_of_col[j];
    x[j] = rhs[r] / a[r][j];
  }
  return x;
}

struct ClassSlice {
  WeightFn b;
  std::map<std::uint64_t, PRational> rows;  // dlog mask -> coefficient
};

// group a ModelForm by exponent vector
inline std::vector<ClassSlice> slices_of(const ModelForm& f) {
  std::vector<ClassSlice> out;
  for (auto& [k, c] : f.terms) {
    if (out.empty() || out.back().b.cmp(k.expo) != 0) out.push_back(ClassSlice{k.expo, {}});
    out.back().rows.emplace(k.dlog, c);
  }
  return out;
}

}  // namespace detail

// p-integrality of an exact rational; residue mod p^k of a p-integral one.
inline bool mpq_p_integral(const mpq_class& q, std::uint32_t p) {
  return !mpz_divisible_ui_p(q.get_den().get_mpz_t(), p);
}
inline std::uint64_t mpq_residue(const mpq_class& q, std::uint32_t p, std::uint32_t k) {
  if (k == 0) return 0;
  std::uint64_t pk = pow_u64(p, k);
  mpz_class pkz((unsigned long)pk);
  mpz_class num = q.get_num() % pkz, den = q.get_den() % pkz, inv;
  if (num < 0) num += pkz;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pkz.get_mpz_t()) == 0)
    throw NonIntegralExtraction("denominator not invertible mod p^k");
  mpz_class r = (num * inv) % pkz;
  return r.get_ui();
}

/// Inverse of embed at truncation level m: solves, per exponent class, the
/// finite linear system expressing the form in the embedded e(1,b,I) basis,
/// certifies p-integrality of the solved coefficients, and reduces them to
/// canonical residues.  extract(embed(x)) == x.
inline DrwElement extract(const ModelForm& f, const RingContext& ctx) {
  DrwElement out(ctx, f.degree);
  for (auto& slice : detail::slices_of(f)) {
    const WeightFn& b = slice.b;
    auto supp = b.support();
    if (f.degree > supp.size()) throw NonIntegralExtraction("dlog set exceeds exponent support");
    std::vector<std::vector<std::uint32_t>> subs;
    detail::subsets_of_size((std::uint32_t)supp.size(), f.degree, supp, subs);
    std::vector<BasicDiffKey> keys;
    for (auto& I : subs) keys.emplace_back(b, I);

    // collect row masks from candidates and the input slice
    std::map<std::uint64_t, std::size_t> rowof;
    auto row_index = [&](std::uint64_t mask) {
      auto [it, fresh] = rowof.emplace(mask, rowof.size());
      return it->second;
    };
    std::vector<std::map<std::uint64_t, PRational>> colterms;
    RingContext probe_ctx(ctx.p, ctx.n, std::max<std::uint32_t>(ctx.m, b.u() + 1));
    for (auto& key : keys) {
      DrwElement probe(probe_ctx, f.degree);
      probe.add_term(key, 1);
      ModelForm mf = embed(probe);
      std::map<std::uint64_t, PRational> col;
      for (auto& [mk, c] : mf.terms) {
        row_index(mk.dlog);
        col.emplace(mk.dlog, c);
      }
      colterms.push_back(std::move(col));
    }
    for (auto& [mask, c] : slice.rows) row_index(mask);

    std::size_t nrows = rowof.size(), ncols = keys.size();
    std::vector<std::vector<mpq_class>> a(nrows, std::vector<mpq_class>(ncols, 0));
    std::vector<mpq_class> rhs(nrows, 0);
    for (std::size_t j = 0; j < ncols; ++j)
      for (auto& [mask, c] : colterms[j]) a[rowof[mask]][j] = c.to_mpq(ctx.p);
    for (auto& [mask, c] : slice.rows) rhs[rowof[mask]] = c.to_mpq(ctx.p);

    auto x = detail::solve_exact(std::move(a), std::move(rhs));
    for (std::size_t j = 0; j < ncols; ++j) {
      if (x[j] == 0) continue;
      if (!mpq_p_integral(x[j], ctx.p)) throw NonIntegralExtraction("coefficient not p-integral");
      std::uint32_t kmod = coeff_modulus(keys[j], ctx.m);
      if (kmod == 0) continue;  // Fil^m content at this level
      out.add_term(keys[j], mpq_residue(x[j], ctx.p, kmod));
    }
  }
  return out;
}

}  // namespace wdrw
