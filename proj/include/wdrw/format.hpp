#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "wdrw/lazard.hpp"
#include "wdrw/structure.hpp"

namespace wdrw {

// ---------------------------------------------------------------- printing

inline std::string rat_str(const mpq_class& q) { return q.get_str(); }

inline std::string frac_str(const PadicFrac& f, std::uint32_t p) {
  if (f.pden == 0) return std::to_string(f.num);
  return std::to_string(f.num) + "/" + std::to_string(pow_u64(p, f.pden));
}

inline std::string mono_str(const Expo& e, const std::string& stem, std::uint64_t coeff, bool coeff_one_implicit) {
  std::string s;
  bool first = true;
  if (!coeff_one_implicit || coeff != 1) {
    s += std::to_string(coeff);
    first = false;
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e[i]) continue;
    if (!first) s += "*";
    s += stem + std::to_string(i + 1);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
    first = false;
  }
  if (first) s = std::to_string(coeff);
  return s;
}

inline std::string poly_str(const PolyFp& f, const std::string& stem = "X") {
  if (f.is_zero()) return "0";
  std::string s;
  for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
    if (!s.empty()) s += " + ";
    s += mono_str(it->first, stem, it->second, true);
  }
  return s;
}

inline std::string poly_str(const PolyZ& f, const std::string& stem = "X") {
  if (f.is_zero()) return "0";
  std::string s;
  for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
    std::string c = it->second.get_str();
    bool neg = c.size() && c[0] == '-';
    if (!s.empty()) s += neg ? " - " : " + ";
    else if (neg) s += "-";
    std::string abs = neg ? c.substr(1) : c;
    bool unit = abs == "1" && expo_total(it->first) > 0;
    std::string mono;
    bool first = true;
    if (!unit) {
      mono += abs;
      first = false;
    }
    for (std::size_t i = 0; i < it->first.size(); ++i) {
      if (!it->first[i]) continue;
      if (!first) mono += "*";
      mono += stem + std::to_string(i + 1);
      if (it->first[i] > 1) mono += "^" + std::to_string(it->first[i]);
      first = false;
    }
    if (first) mono = abs;
    s += mono;
  }
  return s;
}

inline std::string key_str(const BasicDiffKey& key, std::uint64_t eta, std::uint32_t p) {
  std::string s = "e(" + std::to_string(eta) + "; ";
  for (std::uint32_t i = 0; i < key.weight.n(); ++i) {
    if (i) s += ",";
    s += frac_str(key.weight.entries[i], p);
  }
  s += "; {";
  for (std::size_t i = 0; i < key.parts.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(key.parts[i] + 1);
  }
  s += "})";
  return s;
}

// canonical sorted term list, one per line: `e(eta; a; I) : 1`
inline std::string element_str(const DrwElement& x) {
  if (x.is_zero()) return "0\n";
  std::string s;
  for (auto& [key, eta] : x.terms) s += key_str(key, eta, x.ctx.p) + " : 1\n";
  return s;
}

inline std::string witt_str(const WittVec& w) {
  std::string s = "(";
  for (std::uint32_t i = 0; i < w.ctx.m; ++i) {
    if (i) s += ", ";
    s += poly_str(w.coords[i]);
  }
  return s + ")";
}

// ----------------------------------------------------------------- lexing

struct Lexer {
  std::string src;
  std::size_t pos = 0;

  explicit Lexer(std::string s) : src(std::move(s)) {}

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' || src[pos] == '\r')) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= src.size();
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw SyntaxError("expected '" + std::string(1, c) + "' at position " + std::to_string(pos));
  }
  bool accept_word(const std::string& w) {
    skip_ws();
    if (src.compare(pos, w.size(), w) == 0) {
      pos += w.size();
      return true;
    }
    return false;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && (isalnum((unsigned char)src[pos]) || src[pos] == '_')) ++pos;
    if (start == pos) throw SyntaxError("expected identifier at position " + std::to_string(pos));
    return src.substr(start, pos - start);
  }
  mpz_class integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) ++pos;
    while (pos < src.size() && isdigit((unsigned char)src[pos])) ++pos;
    if (start == pos || (pos - start == 1 && !isdigit((unsigned char)src[start])))
      throw SyntaxError("expected integer at position " + std::to_string(pos));
    return mpz_class(src.substr(start, pos - start));
  }
  mpq_class rational() {
    mpz_class num = integer();
    if (accept('/')) {
      mpz_class den = integer();
      if (den == 0) throw SyntaxError("zero denominator");
      mpq_class q(num, den);
      q.canonicalize();
      return q;
    }
    return mpq_class(num);
  }
};

// variable reference "X3" (1-based) against a stem list; returns the 0-based
// index or SIZE_MAX
inline std::size_t var_index(const std::string& name, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return SIZE_MAX;
}

inline std::vector<std::string> default_var_names(std::uint32_t n, const std::string& stem = "X") {
  std::vector<std::string> v;
  for (std::uint32_t i = 1; i <= n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

// polynomial over Z: sum of signed terms c*V1^e1*...; stops before any of
// the given stop characters
inline PolyZ parse_polyz(Lexer& lx, const std::vector<std::string>& vars) {
  PolyZ out((std::uint32_t)vars.size());
  bool first = true;
  for (;;) {
    lx.skip_ws();
    if (lx.eof()) break;
    char c = lx.peek();
    int sign = 1;
    if (c == '+') {
      lx.expect('+');
    } else if (c == '-') {
      lx.expect('-');
      sign = -1;
    } else if (!first) {
      break;  // delimiter reached
    }
    first = false;
    mpz_class coeff = 1;
    Expo e(vars.size(), 0);
    bool saw_factor = false;
    for (;;) {
      char d = lx.peek();
      if (isdigit((unsigned char)d)) {
        coeff *= lx.integer();
        saw_factor = true;
      } else if (isalpha((unsigned char)d)) {
        std::string name = lx.ident();
        std::size_t idx = var_index(name, vars);
        if (idx == SIZE_MAX) throw SyntaxError("unknown variable '" + name + "'");
        std::uint32_t exp = 1;
        if (lx.accept('^')) exp = (std::uint32_t)lx.integer().get_ui();
        e[idx] += exp;
        saw_factor = true;
      } else {
        break;
      }
      if (!lx.accept('*')) break;
    }
    if (!saw_factor) throw SyntaxError("expected a term at position " + std::to_string(lx.pos));
    out.add_term(std::move(e), sign * coeff);
  }
  return out;
}

inline PolyFp parse_polyfp(Lexer& lx, std::uint32_t p, const std::vector<std::string>& vars) {
  return parse_polyz(lx, vars).mod_p(p);
}

inline PolyZ parse_polyz(const std::string& s, const std::vector<std::string>& vars) {
  Lexer lx(s);
  PolyZ f = parse_polyz(lx, vars);
  if (!lx.eof()) throw SyntaxError("trailing input after polynomial");
  return f;
}
inline PolyFp parse_polyfp(const std::string& s, std::uint32_t p, const std::vector<std::string>& vars) {
  Lexer lx(s);
  PolyFp f = parse_polyfp(lx, p, vars);
  if (!lx.eof()) throw SyntaxError("trailing input after polynomial");
  return f;
}

// ------------------------------------------------------------- term parser

/// Abstract syntax of the CLI term language (s-expressions).
struct Term {
  enum Kind { Teich, V, F, D, Add, Mul, E, TF, VF } kind = Teich;
  PolyFp poly;                           // Teich
  PolyZ lift_poly;                       // TF / VF arguments
  std::uint64_t eta = 0;                 // E
  std::vector<mpq_class> weights;        // E
  std::vector<std::uint32_t> parts;      // E (0-based)
  std::vector<std::unique_ptr<Term>> args;
};

inline std::unique_ptr<Term> parse_term(Lexer& lx, const RingContext& ctx) {
  auto vars = default_var_names(ctx.n);
  lx.expect('(');
  std::string head = [&] {
    char c = lx.peek();
    if (c == '+' || c == '*') {
      lx.expect(c);
      return std::string(1, c);
    }
    return lx.ident();
  }();
  auto t = std::make_unique<Term>();
  if (head == "teich") {
    t->kind = Term::Teich;
    t->poly = parse_polyfp(lx, ctx.p, vars);
  } else if (head == "tF" || head == "vF") {
    t->kind = head == "tF" ? Term::TF : Term::VF;
    t->lift_poly = parse_polyz(lx, vars);
  } else if (head == "V" || head == "F" || head == "d") {
    t->kind = head == "V" ? Term::V : (head == "F" ? Term::F : Term::D);
    t->args.push_back(parse_term(lx, ctx));
  } else if (head == "+" || head == "*") {
    t->kind = head == "+" ? Term::Add : Term::Mul;
    t->args.push_back(parse_term(lx, ctx));
    if (lx.peek() != '(') throw SyntaxError("operator '" + head + "' needs two arguments");
    t->args.push_back(parse_term(lx, ctx));
  } else if (head == "e") {
    t->kind = Term::E;
    mpz_class eta = lx.integer();
    if (eta < 0) throw SyntaxError("eta must be nonnegative");
    t->eta = eta.get_ui();
    lx.expect(';');
    t->weights.push_back(lx.rational());
    while (lx.accept(',')) t->weights.push_back(lx.rational());
    lx.expect(';');
    lx.expect('{');
    if (lx.peek() != '}') {
      auto idx = lx.integer();
      t->parts.push_back((std::uint32_t)idx.get_ui() - 1);
      while (lx.accept(',')) t->parts.push_back((std::uint32_t)lx.integer().get_ui() - 1);
    }
    lx.expect('}');
    if (t->weights.size() != ctx.n) throw DegreeMismatch("weight arity does not match --vars");
  } else {
    throw SyntaxError("unknown constructor '" + head + "'");
  }
  lx.expect(')');
  return t;
}

inline std::unique_ptr<Term> parse_term(const std::string& s, const RingContext& ctx) {
  Lexer lx(s);
  auto t = parse_term(lx, ctx);
  if (!lx.eof()) throw SyntaxError("trailing input after term");
  return t;
}

inline std::string print_term(const Term& t, std::uint32_t p) {
  switch (t.kind) {
    case Term::Teich:
      return "(teich " + poly_str(t.poly) + ")";
    case Term::TF:
      return "(tF " + poly_str(t.lift_poly) + ")";
    case Term::VF:
      return "(vF " + poly_str(t.lift_poly) + ")";
    case Term::V:
      return "(V " + print_term(*t.args[0], p) + ")";
    case Term::F:
      return "(F " + print_term(*t.args[0], p) + ")";
    case Term::D:
      return "(d " + print_term(*t.args[0], p) + ")";
    case Term::Add:
      return "(+ " + print_term(*t.args[0], p) + " " + print_term(*t.args[1], p) + ")";
    case Term::Mul:
      return "(* " + print_term(*t.args[0], p) + " " + print_term(*t.args[1], p) + ")";
    case Term::E: {
      std::string s = "(e " + std::to_string(t.eta) + " ; ";
      for (std::size_t i = 0; i < t.weights.size(); ++i) {
        if (i) s += ",";
        s += rat_str(t.weights[i]);
      }
      s += " ; {";
      for (std::size_t i = 0; i < t.parts.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t.parts[i] + 1);
      }
      return s + "})";
    }
  }
  return "";
}

/// Evaluate a term at a target truncation level; V and F shift the level of
/// the subterm so everything stays exact.
inline DrwElement eval_term(const Term& t, const RingContext& ctx, const FrobLift* lift) {
  switch (t.kind) {
    case Term::Teich:
      return teichmuller_elem(ctx, t.poly);
    case Term::TF:
    case Term::VF: {
      if (!lift) throw Error("term uses a Frobenius lift but no --lift file was given");
      FrobLift F(RingContext(ctx.p, ctx.n, ctx.m), std::max(ctx.m + 2, 4u), lift->images);
      if (t.kind == Term::TF) return from_witt(t_F(F, t.lift_poly, ctx.m));
      return from_witt(v_F(F, t.lift_poly, ctx.m));
    }
    case Term::V:
      return eval_term(*t.args[0], ctx.with_len(ctx.m > 0 ? ctx.m - 1 : 0), lift).verschiebung_op();
    case Term::F:
      return frobenius_op(eval_term(*t.args[0], ctx.with_len(ctx.m + 1), lift));
    case Term::D:
      return eval_term(*t.args[0], ctx, lift).differential();
    case Term::Add: {
      DrwElement a = eval_term(*t.args[0], ctx, lift), b = eval_term(*t.args[1], ctx, lift);
      if (a.degree != b.degree) throw DegreeMismatch("(+) of different degrees");
      return a + b;
    }
    case Term::Mul:
      return multiply(eval_term(*t.args[0], ctx, lift), eval_term(*t.args[1], ctx, lift));
    case Term::E: {
      WeightFn a(ctx.p, ctx.n);
      for (std::uint32_t i = 0; i < ctx.n; ++i) {
        mpq_class w = t.weights[i];
        mpz_class den = w.get_den();
        std::uint32_t pden = 0;
        while (den > 1) {
          if (!mpz_divisible_ui_p(den.get_mpz_t(), ctx.p)) throw SyntaxError("weight denominator must be a p-power");
          mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), ctx.p);
          ++pden;
        }
        if (w.get_num() < 0) throw SyntaxError("weights are nonnegative");
        a.entries[i] = PadicFrac(mpz_class(w.get_num()).get_ui(), pden, ctx.p);
      }
      BasicDiffKey key(a, t.parts);
      std::uint64_t mod = pow_u64(ctx.p, coeff_modulus(key, ctx.m));
      if (mod > 0 && t.eta >= mod && mod != 1) throw CoefficientOutOfRange("eta not reduced mod p^(m-u)");
      return make_e(mod <= 1 ? 0 : t.eta % mod, key, ctx);
    }
  }
  throw Error("unreachable");
}

// ----------------------------------------------------------- file formats

inline void expect_format_header(Lexer& lx) {
  lx.skip_ws();
  if (lx.accept('#')) {
    // `# wdrw-format 1`
    std::size_t nl = lx.src.find('\n', lx.pos);
    std::string line = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
    if (line.find("wdrw-format 1") == std::string::npos) throw SyntaxError("unsupported format header");
    lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
  }
}

/// `lift p=2 X1 -> X1^2 + 2*X1`, one line per variable.
inline FrobLift parse_lift_file(const std::string& text, std::uint32_t n_expected, std::uint32_t m) {
  Lexer lx(text);
  expect_format_header(lx);
  std::uint32_t p = 0;
  std::vector<std::pair<std::size_t, PolyZ>> images;
  std::vector<std::string> vars = default_var_names(n_expected);
  while (!lx.eof()) {
    if (!lx.accept_word("lift")) throw SyntaxError("expected 'lift' line");
    if (!lx.accept_word("p")) throw SyntaxError("expected p=<prime>");
    lx.expect('=');
    std::uint32_t pline = (std::uint32_t)lx.integer().get_ui();
    if (p == 0) p = pline;
    if (p != pline) throw SyntaxError("inconsistent primes in lift file");
    std::string var = lx.ident();
    std::size_t idx = var_index(var, vars);
    if (idx == SIZE_MAX) throw SyntaxError("unknown variable '" + var + "' in lift file");
    if (!lx.accept('-') || !lx.accept('>')) throw SyntaxError("expected '->'");
    // parse until end of line
    std::size_t nl = lx.src.find('\n', lx.pos);
    std::string rhs = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
    lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
    images.emplace_back(idx, parse_polyz(rhs, vars));
  }
  if (p == 0) throw SyntaxError("empty lift file");
  std::vector<PolyZ> imgs;
  for (std::uint32_t i = 0; i < n_expected; ++i) imgs.push_back(PolyZ::variable(n_expected, i).pow(p));
  for (auto& [idx, f] : images) imgs[idx] = f;
  return FrobLift(RingContext(p, n_expected, m), std::max(m + 2, 4u), imgs);
}

inline std::string lift_file_str(const FrobLift& F) {
  std::string s = "# wdrw-format 1\n";
  for (std::uint32_t i = 0; i < F.ctx.n; ++i)
    s += "lift p=" + std::to_string(F.ctx.p) + " X" + std::to_string(i + 1) + " -> " + poly_str(F.images[i]) + "\n";
  return s;
}

/// Line-oriented presentation format:
///   etale p=<p> n=<n> rank=<r> P=<poly>
///   mul s_i s_j = <sum of [poly][/P^e] s_k terms>
///   frob s_i = <same shape, in the s_k^p>      (optional; verified)
///   lift <var> -> <integer poly over X,Z>      (optional)
///   model n=<k>                                 (optional)
///   map <var> -> <poly over W1..Wk>
inline EtalePresentation parse_presentation_file(const std::string& text) {
  Lexer lx(text);
  expect_format_header(lx);
  if (!lx.accept_word("etale")) throw SyntaxError("expected 'etale' header");
  EtalePresentation pres;
  auto read_kv = [&](const char* key) {
    if (!lx.accept_word(key)) throw SyntaxError(std::string("expected ") + key + "=");
    lx.expect('=');
    return lx.integer();
  };
  pres.p = (std::uint32_t)read_kv("p").get_ui();
  pres.n = (std::uint32_t)read_kv("n").get_ui();
  pres.rank = (std::uint32_t)read_kv("rank").get_ui();
  if (!lx.accept_word("P")) throw SyntaxError("expected P=<poly>");
  lx.expect('=');
  auto xvars = default_var_names(pres.n);
  {
    std::size_t nl = lx.src.find('\n', lx.pos);
    std::string rhs = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
    lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
    pres.localizer = parse_polyfp(rhs, pres.p, xvars);
  }
  LocRing R(pres.p, pres.n, pres.localizer);
  pres.alg.base = R;
  pres.alg.rank = pres.rank;
  pres.alg.table.assign(pres.rank,
                        std::vector<std::vector<LocPoly>>(pres.rank, std::vector<LocPoly>(pres.rank, R.zero())));
  // diagonal s_1-rows
  for (std::uint32_t j = 0; j < pres.rank; ++j) {
    pres.alg.table[0][j][j] = R.one();
    pres.alg.table[j][0][j] = R.one();
  }

  auto parse_combination = [&](const std::string& line, bool frob_powers) {
    // sum of  [<poly>] [/ P^e] [*] s_<k> [^p]  terms
    std::vector<LocPoly> out(pres.rank, R.zero());
    Lexer ll(line);
    bool first = true;
    while (!ll.eof()) {
      int sign = 1;
      char c = ll.peek();
      if (c == '+') ll.expect('+');
      else if (c == '-') {
        ll.expect('-');
        sign = -1;
      } else if (!first) {
        throw SyntaxError("bad combination");
      }
      first = false;
      PolyFp num = PolyFp::constant(pres.p, pres.n, 1);
      std::uint32_t den = 0;
      // optional polynomial factor (anything before 's_')
      for (;;) {
        ll.skip_ws();
        if (ll.src.compare(ll.pos, 2, "s_") == 0) break;
        if (ll.peek() == '/') {
          ll.expect('/');
          if (!ll.accept_word("P")) throw SyntaxError("expected P after /");
          std::uint32_t e = 1;
          if (ll.accept('^')) e = (std::uint32_t)ll.integer().get_ui();
          den += e;
        } else if (ll.peek() == '(') {
          ll.expect('(');
          std::size_t close = ll.src.find(')', ll.pos);
          if (close == std::string::npos) throw SyntaxError("unbalanced parenthesis");
          num = num * parse_polyfp(ll.src.substr(ll.pos, close - ll.pos), pres.p, xvars);
          ll.pos = close + 1;
        } else if (isdigit((unsigned char)ll.peek()) || isalpha((unsigned char)ll.peek())) {
          // bare monomial factor
          Lexer sub(ll.src.substr(ll.pos));
          PolyZ mono(pres.n);
          {
            mpz_class coeff = 1;
            Expo e(pres.n, 0);
            bool any = false;
            for (;;) {
              char d = sub.peek();
              if (isdigit((unsigned char)d)) {
                coeff *= sub.integer();
                any = true;
              } else if (isalpha((unsigned char)d)) {
                std::size_t save = sub.pos;
                std::string name = sub.ident();
                std::size_t idx = var_index(name, xvars);
                if (idx == SIZE_MAX) {
                  sub.pos = save;
                  break;
                }
                std::uint32_t exp = 1;
                if (sub.accept('^')) exp = (std::uint32_t)sub.integer().get_ui();
                e[idx] += exp;
                any = true;
              } else {
                break;
              }
              if (!sub.accept('*')) break;
            }
            if (!any) throw SyntaxError("expected factor in combination");
            mono.add_term(std::move(e), coeff);
          }
          num = num * mono.mod_p(pres.p);
          ll.pos += sub.pos;
        } else {
          throw SyntaxError("unexpected character in combination");
        }
        ll.accept('*');
      }
      ll.pos += 2;  // "s_"
      std::uint32_t k = (std::uint32_t)ll.integer().get_ui();
      if (k < 1 || k > pres.rank) throw SyntaxError("basis index out of range");
      if (frob_powers) {
        if (!ll.accept('^') || !ll.accept_word("p")) throw SyntaxError("frob line needs s_k^p");
      }
      if (sign < 0) num = -num;
      out[k - 1] = R.add(out[k - 1], R.normalize(LocPoly{num, den}));
    }
    return out;
  };

  std::vector<std::vector<LocPoly>> claimed_frob;
  while (!lx.eof()) {
    if (lx.accept_word("mul")) {
      lx.skip_ws();
      if (lx.src.compare(lx.pos, 2, "s_") != 0) throw SyntaxError("expected s_i");
      lx.pos += 2;
      std::uint32_t i = (std::uint32_t)lx.integer().get_ui();
      lx.skip_ws();
      if (lx.src.compare(lx.pos, 2, "s_") != 0) throw SyntaxError("expected s_j");
      lx.pos += 2;
      std::uint32_t j = (std::uint32_t)lx.integer().get_ui();
      lx.expect('=');
      std::size_t nl = lx.src.find('\n', lx.pos);
      std::string rhs = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
      lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
      auto comb = parse_combination(rhs, false);
      pres.alg.table[i - 1][j - 1] = comb;
      pres.alg.table[j - 1][i - 1] = comb;
    } else if (lx.accept_word("frob")) {
      lx.skip_ws();
      if (lx.src.compare(lx.pos, 2, "s_") != 0) throw SyntaxError("expected s_i");
      lx.pos += 2;
      std::uint32_t i = (std::uint32_t)lx.integer().get_ui();
      lx.expect('=');
      std::size_t nl = lx.src.find('\n', lx.pos);
      std::string rhs = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
      lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
      claimed_frob.resize(pres.rank, std::vector<LocPoly>(pres.rank, R.zero()));
      claimed_frob[i - 1] = parse_combination(rhs, true);
    } else if (lx.accept_word("lift")) {
      std::string var = lx.ident();
      if (!lx.accept('-') || !lx.accept('>')) throw SyntaxError("expected '->'");
      std::size_t nl = lx.src.find('\n', lx.pos);
      std::string rhs = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
      lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
      auto tvars = default_var_names(pres.n);
      if (pres.has_localizer()) tvars.push_back("Y");
      for (std::uint32_t k = 1; k <= pres.rank; ++k) tvars.push_back("Z" + std::to_string(k));
      if (pres.lift_images.empty())
        for (std::uint32_t k = 0; k < pres.n_T(); ++k)
          pres.lift_images.push_back(PolyZ::variable(pres.n_T(), k).pow(pres.p));
      std::size_t idx = var_index(var, tvars);
      if (idx == SIZE_MAX) throw SyntaxError("unknown variable in lift line");
      pres.lift_images[idx] = parse_polyz(rhs, tvars);
    } else if (lx.accept_word("model")) {
      if (!lx.accept_word("n")) throw SyntaxError("expected n=<count> after model");
      lx.expect('=');
      pres.model_n = (std::uint32_t)lx.integer().get_ui();
      pres.model_images.assign(pres.n_T(), PolyFp(pres.p, pres.model_n));
    } else if (lx.accept_word("map")) {
      if (pres.model_images.empty()) throw SyntaxError("'map' before 'model'");
      std::string var = lx.ident();
      if (!lx.accept('-') || !lx.accept('>')) throw SyntaxError("expected '->'");
      std::size_t nl = lx.src.find('\n', lx.pos);
      std::string rhs = lx.src.substr(lx.pos, nl == std::string::npos ? std::string::npos : nl - lx.pos);
      lx.pos = nl == std::string::npos ? lx.src.size() : nl + 1;
      auto tvars = default_var_names(pres.n);
      if (pres.has_localizer()) tvars.push_back("Y");
      for (std::uint32_t k = 1; k <= pres.rank; ++k) tvars.push_back("Z" + std::to_string(k));
      std::size_t idx = var_index(var, tvars);
      if (idx == SIZE_MAX) throw SyntaxError("unknown variable in map line");
      pres.model_images[idx] = parse_polyfp(rhs, pres.p, default_var_names(pres.model_n, "W"));
    } else {
      throw SyntaxError("unknown presentation line at position " + std::to_string(lx.pos));
    }
  }
  pres.alg.validate();
  // verify the claimed relative-Frobenius matrix when present
  if (!claimed_frob.empty()) {
    auto chk = check_relatively_perfect(pres);
    if (!chk.ok) throw MalformedTable("frob lines given but the algebra is not relatively perfect");
    for (std::uint32_t i = 0; i < pres.rank; ++i)
      for (std::uint32_t j = 0; j < pres.rank; ++j)
        if (!R.eq(claimed_frob[i][j], chk.u0[i][j])) throw MalformedTable("frob line disagrees with the table");
  }
  return pres;
}

}  // namespace wdrw
