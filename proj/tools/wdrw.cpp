// wdrw: exact truncated de Rham-Witt calculator.
//   eval       print the canonical normal form of a term
//   witt       print the Witt coordinates of a degree-0 term
//   zeta       evaluate the zeta_eps pseudovaluation
//   gamma      evaluate gamma_{eps, Id, b} on a degree-0 term
//   lazard     apply t_F / v_F for a Frobenius lift from --lift
//   decompose  structure decomposition (polynomial or etale with --presentation)
//   check      run a named exact check suite
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "wdrw/checks.hpp"

using namespace wdrw;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

mpq_class parse_rat(const std::string& s) {
  Lexer lx(s);
  mpq_class q = lx.rational();
  if (!lx.eof()) throw SyntaxError("bad rational: " + s);
  return q;
}

std::vector<mpq_class> parse_radii(const std::string& s, std::uint32_t n) {
  if (s.empty()) return std::vector<mpq_class>(n, mpq_class(1));
  std::vector<mpq_class> out;
  Lexer lx(s);
  out.push_back(lx.rational());
  while (lx.accept(',')) out.push_back(lx.rational());
  if (!lx.eof() || out.size() != n) throw SyntaxError("--radii needs " + std::to_string(n) + " rationals");
  return out;
}

json term_json(const BasicDiffKey& key, std::uint64_t eta, std::uint32_t p) {
  json weights = json::array(), parts = json::array();
  for (auto& w : key.weight.entries) weights.push_back(frac_str(w, p));
  for (auto i : key.parts) parts.push_back(i + 1);
  return json{{"eta", eta}, {"weights", weights}, {"parts", parts}, {"coeff", eta}};
}

json element_json(const DrwElement& x) {
  json terms = json::array();
  for (auto& [key, eta] : x.terms) terms.push_back(term_json(key, eta, x.ctx.p));
  return json{{"degree", x.degree}, {"level", x.ctx.m}, {"terms", terms}};
}

json poly_map_json(const std::map<BasicDiffKey, PolyZ, KeyLess>& mp, std::uint32_t p) {
  json out = json::array();
  for (auto& [key, s] : mp) {
    json weights = json::array(), parts = json::array();
    for (auto& w : key.weight.entries) weights.push_back(frac_str(w, p));
    for (auto i : key.parts) parts.push_back(i + 1);
    out.push_back(json{{"weights", weights}, {"parts", parts}, {"coeff", poly_str(s)}});
  }
  return out;
}

struct Config {
  std::uint32_t prime = 2, vars = 1, len = 2;
  bool as_json = false;
  std::string eps = "1/4", radii, lift_path, pres_path, term;
  std::uint64_t max_weight = 4;
  int samples = 25, threads = 1;
  std::uint32_t seed = 42;
};

std::optional<FrobLift> load_lift(const Config& cfg, std::uint32_t n, std::uint32_t m) {
  if (cfg.lift_path.empty()) return std::nullopt;
  return parse_lift_file(slurp(cfg.lift_path), n, m);
}

int cmd_eval(const Config& cfg) {
  RingContext ctx(cfg.prime, cfg.vars, cfg.len);
  auto lift = load_lift(cfg, ctx.n, ctx.m);
  DrwElement x = eval_term(*parse_term(cfg.term, ctx), ctx, lift ? &*lift : nullptr);
  if (cfg.as_json) std::cout << element_json(x).dump(2) << "\n";
  else std::cout << element_str(x);
  return 0;
}

int cmd_witt(const Config& cfg) {
  RingContext ctx(cfg.prime, cfg.vars, cfg.len);
  auto lift = load_lift(cfg, ctx.n, ctx.m);
  DrwElement x = eval_term(*parse_term(cfg.term, ctx), ctx, lift ? &*lift : nullptr);
  WittVec w = to_witt(x);
  if (cfg.as_json) {
    json coords = json::array();
    for (auto& c : w.coords) coords.push_back(poly_str(c));
    std::cout << json{{"level", w.ctx.m}, {"coords", coords}}.dump(2) << "\n";
  } else {
    std::cout << witt_str(w) << "\n";
  }
  return 0;
}

int cmd_zeta(const Config& cfg) {
  RingContext ctx(cfg.prime, cfg.vars, cfg.len);
  auto lift = load_lift(cfg, ctx.n, ctx.m);
  DrwElement x = eval_term(*parse_term(cfg.term, ctx), ctx, lift ? &*lift : nullptr);
  XReal z = zeta(x, parse_rat(cfg.eps));
  if (cfg.as_json) std::cout << json{{"eps", cfg.eps}, {"zeta", z.str()}}.dump(2) << "\n";
  else std::cout << "ζ = " << z.str() << "\n";
  return 0;
}

int cmd_gamma(const Config& cfg) {
  RingContext ctx(cfg.prime, cfg.vars, cfg.len);
  auto lift = load_lift(cfg, ctx.n, ctx.m);
  DrwElement x = eval_term(*parse_term(cfg.term, ctx), ctx, lift ? &*lift : nullptr);
  auto g = gamma_id(to_witt(x), parse_rat(cfg.eps), parse_radii(cfg.radii, ctx.n));
  if (cfg.as_json)
    std::cout << json{{"eps", cfg.eps}, {"gamma", g.value.str()}, {"exact", g.exact}}.dump(2) << "\n";
  else
    std::cout << "γ = " << g.value.str() << "\n";
  return 0;
}

int cmd_lazard(const Config& cfg) {
  if (cfg.lift_path.empty()) throw Error("lazard needs --lift <file>");
  RingContext ctx(cfg.prime, cfg.vars, cfg.len);
  FrobLift F = parse_lift_file(slurp(cfg.lift_path), ctx.n, ctx.m);
  if (F.ctx.p != ctx.p) throw Error("--prime disagrees with the lift file");
  PolyZ P = parse_polyz(cfg.term, default_var_names(ctx.n));
  WittVec t = t_F(F, P, ctx.m), v = v_F(F, P, ctx.m);
  if (cfg.as_json) {
    json tt = json::array(), vv = json::array();
    for (auto& c : t.coords) tt.push_back(poly_str(c));
    for (auto& c : v.coords) vv.push_back(poly_str(c));
    std::cout << json{{"t_F", tt}, {"v_F", vv}}.dump(2) << "\n";
  } else {
    std::cout << "t_F = " << witt_str(t) << "\n";
    std::cout << "v_F = " << witt_str(v) << "\n";
  }
  return 0;
}

int cmd_decompose(const Config& cfg) {
  if (!cfg.pres_path.empty()) {
    EtalePresentation pres = parse_presentation_file(slurp(cfg.pres_path));
    if (pres.p != cfg.prime) throw Error("--prime disagrees with the presentation");
    std::uint32_t m = cfg.len;
    RingContext cT = pres.ctx_T(m);
    auto lift = pres.lift(m);
    DrwElement x = eval_term(*parse_term(cfg.term, cT), cT, &lift);
    EtaleDecomposeOptions opt;
    opt.max_weight = cfg.max_weight;
    auto res = etale_structure_decompose(x, pres, m, mpq_class(1, 4), opt);
    if (cfg.as_json) {
      json j{{"degree", res.degree},
             {"level", res.level},
             {"H", poly_map_json(res.h_coeff, pres.p)},
             {"G", poly_map_json(res.g_coeff, pres.p)},
             {"dG", poly_map_json(res.dg_coeff, pres.p)}};
      if (res.cert.certified) j["cert"] = json{{"eps", res.cert.eps.get_str()}, {"bounds", res.cert.notes}};
      std::cout << j.dump(2) << "\n";
    } else {
      auto dump = [&](const char* name, const std::map<BasicDiffKey, PolyZ, KeyLess>& mp) {
        std::cout << name << ":\n";
        for (auto& [key, s] : mp) std::cout << "  " << key_str(key, 1, pres.p) << " : " << poly_str(s) << "\n";
      };
      dump("H", res.h_coeff);
      dump("G", res.g_coeff);
      dump("dG", res.dg_coeff);
      if (res.cert.certified) {
        std::cout << "cert: eps = " << res.cert.eps.get_str() << "\n";
        for (auto& n : res.cert.notes) std::cout << "  " << n << "\n";
      } else {
        std::cout << "cert: none on the default grid\n";
      }
    }
    return 0;
  }
  RingContext ctx(cfg.prime, cfg.vars, cfg.len);
  auto lift = load_lift(cfg, ctx.n, ctx.m);
  FrobLift F = lift ? *lift : FrobLift::canonical(ctx, std::max(ctx.m + 2, 4u));
  DrwElement x = eval_term(*parse_term(cfg.term, ctx), ctx, &F);
  std::vector<mpq_class> grid = {mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 8), mpq_class(1, 16)};
  auto res = poly_structure_decompose(x, F, ctx.m, grid);
  if (cfg.as_json) {
    json j{{"degree", res.degree},
           {"level", res.level},
           {"H", poly_map_json(res.h_coeff, ctx.p)},
           {"G", poly_map_json(res.g_coeff, ctx.p)},
           {"dG", poly_map_json(res.dg_coeff, ctx.p)}};
    if (res.cert.certified) j["cert"] = json{{"eps", res.cert.eps.get_str()}, {"bounds", res.cert.notes}};
    std::cout << j.dump(2) << "\n";
  } else {
    auto dump = [&](const char* name, const std::map<BasicDiffKey, PolyZ, KeyLess>& mp) {
      std::cout << name << ":\n";
      for (auto& [key, s] : mp) std::cout << "  " << key_str(key, 1, ctx.p) << " : " << poly_str(s) << "\n";
    };
    dump("H", res.h_coeff);
    dump("G", res.g_coeff);
    dump("dG", res.dg_coeff);
    if (res.cert.certified) {
      std::cout << "cert: eps = " << res.cert.eps.get_str() << "\n";
      for (auto& nline : res.cert.notes) std::cout << "  " << nline << "\n";
    }
  }
  return 0;
}

int cmd_check(const Config& cfg, const std::string& which) {
  std::vector<std::pair<std::string, std::function<CheckReport()>>> suites = {
      {"ghost", [&] { return checks::criterion1(cfg.samples, cfg.seed); }},
      {"dga", [&] { return checks::criterion2(cfg.samples, cfg.seed); }},
      {"oracle", [&] { return checks::criterion3(cfg.samples, cfg.seed); }},
      {"normalform", [&] { return checks::criterion4(cfg.samples, cfg.seed); }},
      {"rewrite", [&] { return checks::criterion5(std::min<std::uint64_t>(cfg.max_weight + 2, 8), 2, 2, {2, 3}); }},
      {"kernel", [&] { return checks::criterion6(std::min<std::uint64_t>(cfg.max_weight, 6), {2, 3}, 2, 1, 2); }},
      {"pseudoval", [&] { return checks::criterion7(cfg.samples, cfg.seed); }},
      {"lazard", [&] { return checks::criterion8(cfg.seed); }},
      {"perfect", [&] { return checks::criterion9(cfg.samples, cfg.seed); }},
      {"structure", [&] { return checks::criterion10(std::max(4, cfg.samples / 2), cfg.seed); }},
  };
  int failures = 0, ran = 0;
  auto report = [&](const CheckReport& r, const std::string& name) {
    ++ran;
    bool ok = r.ok();
    if (!ok) ++failures;
    std::cout << (ok ? "pass" : "FAIL") << " " << name << ": " << r.checked << " checks, "
              << r.violations.size() << " violations\n";
    for (std::size_t i = 0; i < r.violations.size() && i < 5; ++i)
      std::cout << "   " << r.violations[i] << "\n";
  };
  for (auto& [name, fn] : suites) {
    if (which != "all" && which != name) continue;
    report(fn(), name);
  }
  if (!ran) {
    // single named inequality from the overconvergence catalogue
    RingContext ctx(cfg.prime, cfg.vars, cfg.len);
    report(checks::run_inequality_check(which, ctx, cfg.samples, cfg.seed, parse_rat(cfg.eps),
                                        cfg.radii.empty() ? std::vector<mpq_class>{}
                                                          : parse_radii(cfg.radii, ctx.n)),
           which);
  }
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact truncated (overconvergent) de Rham-Witt calculator"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--prime,-p", cfg.prime, "prime p")->capture_default_str();
  app.add_option("--vars,-n", cfg.vars, "number of variables")->capture_default_str();
  app.add_option("--len,-m", cfg.len, "truncation length m")->capture_default_str();
  app.add_flag("--json", cfg.as_json, "JSON output");
  app.add_option("--eps", cfg.eps, "rational epsilon, e.g. 1/4")->capture_default_str();
  app.add_option("--radii", cfg.radii, "comma-separated rational radii b_i");
  app.add_option("--lift", cfg.lift_path, "Frobenius lift file");
  app.add_option("--presentation", cfg.pres_path, "etale presentation file");
  app.add_option("--max-weight", cfg.max_weight, "weight bound for enumerations")->capture_default_str();
  app.add_option("--samples", cfg.samples, "sample count for check suites")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed for check suites")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (reserved; evaluation is sequential)");

  std::string check_name = "all";
  auto* eval_cmd = app.add_subcommand("eval", "canonical normal form of a term");
  eval_cmd->add_option("term", cfg.term, "s-expression term")->required();
  auto* witt_cmd = app.add_subcommand("witt", "Witt coordinates of a degree-0 term");
  witt_cmd->add_option("term", cfg.term, "s-expression term")->required();
  auto* zeta_cmd = app.add_subcommand("zeta", "zeta_eps of a term");
  zeta_cmd->add_option("term", cfg.term, "s-expression term")->required();
  auto* gamma_cmd = app.add_subcommand("gamma", "gamma_{eps,Id,b} of a degree-0 term");
  gamma_cmd->add_option("term", cfg.term, "s-expression term")->required();
  auto* lazard_cmd = app.add_subcommand("lazard", "t_F and v_F of a polynomial");
  lazard_cmd->add_option("poly", cfg.term, "integer polynomial in X1..Xn")->required();
  auto* dec_cmd = app.add_subcommand("decompose", "structure decomposition of a term");
  dec_cmd->add_option("term", cfg.term, "s-expression term")->required();
  auto* check_cmd = app.add_subcommand("check", "run a named exact check suite");
  check_cmd->add_option("name", check_name, "suite: ghost dga oracle normalform rewrite kernel pseudoval lazard perfect structure all");

  // global flags may appear after the subcommand, as in the documented usage
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (witt_cmd->parsed()) return cmd_witt(cfg);
    if (zeta_cmd->parsed()) return cmd_zeta(cfg);
    if (gamma_cmd->parsed()) return cmd_gamma(cfg);
    if (lazard_cmd->parsed()) return cmd_lazard(cfg);
    if (dec_cmd->parsed()) return cmd_decompose(cfg);
    if (check_cmd->parsed()) return cmd_check(cfg, check_name);
  } catch (const SyntaxError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownInequality& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
