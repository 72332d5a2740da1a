// Command-line front door: every query prints one JSON report to stdout.
// Exit 0 = decided, 2 = unknown, 1 = error / failed verification.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thornlab/verify.hpp"

using ojson = nlohmann::ordered_json;
using namespace thornlab;

namespace {

TheoryId theory_of(const std::string& name) {
  if (name == "eq") return TheoryId::EQ;
  if (name == "dlo") return TheoryId::DLO;
  if (name == "erel") return TheoryId::EREL;
  throw CLI::ValidationError("--theory", "expected eq, dlo or erel");
}

std::string sort_name(Sort s) { return s == Sort::Class ? "class" : "elem"; }

// "x,y:c,z" -> vars; ":c"/":e" force the sort, otherwise a same-named var
// from the parsed formulas wins, otherwise the element sort.
std::vector<Var> parse_vars(const std::string& text, const std::set<Var>& known) {
  std::vector<Var> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    if (auto p = tok.rfind(":c"); p != std::string::npos && p == tok.size() - 2) {
      out.push_back({tok.substr(0, p), Sort::Class});
      continue;
    }
    if (auto p = tok.rfind(":e"); p != std::string::npos && p == tok.size() - 2) {
      out.push_back({tok.substr(0, p), Sort::Elem});
      continue;
    }
    Var v{tok, Sort::Elem};
    for (auto& k : known)
      if (k.name == tok) v = k;
    out.push_back(v);
  }
  return out;
}

// The parser defaults unconstrained variables to the element sort; force the
// sorts a serialized type declares.
FormulaPtr coerce_sorts(FormulaPtr f, const std::vector<Var>& vars) {
  std::map<Var, Term> bind;
  for (auto& v : vars)
    if (v.sort == Sort::Class) bind[{v.name, Sort::Elem}] = Term::variable(v);
  return bind.empty() ? f : substitute(f, bind);
}

// ---- JSON serialization (and its inverse, for recheck) ----

ojson j_vars(const std::vector<Var>& vs) {
  ojson a = ojson::array();
  for (auto& v : vs) a.push_back({{"name", v.name}, {"sort", sort_name(v.sort)}});
  return a;
}

std::vector<Var> vars_of_j(const ojson& a) {
  std::vector<Var> out;
  for (auto& j : a)
    out.push_back({j.at("name"), j.at("sort") == "class" ? Sort::Class : Sort::Elem});
  return out;
}

ojson j_elems(const std::vector<Elem>& es) {
  ojson a = ojson::array();
  for (auto& e : es) a.push_back(e.str());
  return a;
}

std::vector<Elem> elems_of_j(const ojson& a, TheoryId th) {
  std::vector<Elem> out;
  for (auto& j : a) out.push_back(parse_element(j.get<std::string>(), th));
  return out;
}

ojson j_eset(const std::set<Elem>& s) { return j_elems({s.begin(), s.end()}); }

std::set<Elem> eset_of_j(const ojson& a, TheoryId th) {
  auto v = elems_of_j(a, th);
  return {v.begin(), v.end()};
}

ojson j_type(const TypeDesc& t) {
  return {{"vars", j_vars(t.vars)},
          {"base", j_eset(t.base)},
          {"iso", t.iso->str()},
          {"non_algebraic", t.non_algebraic}};
}

TypeDesc type_of_j(const ojson& j, TheoryId th) {
  TypeDesc t;
  t.theory = th;
  t.vars = vars_of_j(j.at("vars"));
  t.base = eset_of_j(j.at("base"), th);
  t.iso = coerce_sorts(parse(j.at("iso").get<std::string>(), th), t.vars);
  t.non_algebraic = j.at("non_algebraic");
  return t;
}

ojson j_family(const Family& f) {
  return {{"delta", f.delta->str()},
          {"xvars", j_vars(f.xvars)},
          {"yvars", j_vars(f.yvars)},
          {"pi", f.pi->str()}};
}

Family family_of_j(const ojson& j, TheoryId th) {
  Family f;
  f.theory = th;
  f.xvars = vars_of_j(j.at("xvars"));
  f.yvars = vars_of_j(j.at("yvars"));
  std::vector<Var> all = f.xvars;
  all.insert(all.end(), f.yvars.begin(), f.yvars.end());
  f.delta = coerce_sorts(parse(j.at("delta").get<std::string>(), th), all);
  f.pi = coerce_sorts(parse(j.at("pi").get<std::string>(), th), f.yvars);
  return f;
}

ojson j_divide(const DivideCert& c) {
  return {{"delta", c.delta->str()},
          {"xvars", j_vars(c.xvars)},
          {"yvars", j_vars(c.yvars)},
          {"params", j_elems(c.params)},
          {"base", j_eset(c.base)},
          {"witness", j_elems(c.witness)},
          {"family", j_family(c.family)},
          {"k", c.k}};
}

DivideCert divide_of_j(const ojson& j, TheoryId th) {
  DivideCert c;
  c.xvars = vars_of_j(j.at("xvars"));
  c.yvars = vars_of_j(j.at("yvars"));
  std::vector<Var> all = c.xvars;
  all.insert(all.end(), c.yvars.begin(), c.yvars.end());
  c.delta = coerce_sorts(parse(j.at("delta").get<std::string>(), th), all);
  c.params = elems_of_j(j.at("params"), th);
  c.base = eset_of_j(j.at("base"), th);
  c.witness = elems_of_j(j.at("witness"), th);
  c.family = family_of_j(j.at("family"), th);
  c.k = j.at("k");
  return c;
}

ojson j_fork(const ForkCert& c) {
  ojson d = ojson::array();
  for (auto& x : c.disjuncts)
    d.push_back({{"instance", x.instance->str()}, {"divide", j_divide(x.cert)}});
  return {{"disjuncts", d}, {"implication", c.implication->str()}};
}

ForkCert fork_of_j(const ojson& j, TheoryId th) {
  ForkCert c;
  for (auto& x : j.at("disjuncts")) {
    DivideCert dc = divide_of_j(x.at("divide"), th);
    std::vector<Var> all = dc.xvars;
    all.insert(all.end(), dc.yvars.begin(), dc.yvars.end());
    c.disjuncts.push_back(
        {coerce_sorts(parse(x.at("instance").get<std::string>(), th), all), dc});
  }
  c.implication = parse(j.at("implication").get<std::string>(), th);
  return c;
}

ojson j_rank_params(const RankParams& p) {
  ojson ds = ojson::array(), ps = ojson::array();
  for (auto& d : p.delta) ds.push_back(d->str());
  for (auto& f : p.pi) ps.push_back(f->str());
  return {{"delta", ds},       {"pi", ps},
          {"xvars", j_vars(p.xvars)}, {"yvars", j_vars(p.yvars)},
          {"zvars", j_vars(p.zvars)}, {"k", p.k}};
}

RankParams params_of_j(const ojson& j, TheoryId th) {
  RankParams p;
  p.xvars = vars_of_j(j.at("xvars"));
  p.yvars = vars_of_j(j.at("yvars"));
  p.zvars = vars_of_j(j.at("zvars"));
  std::vector<Var> all = p.xvars;
  all.insert(all.end(), p.yvars.begin(), p.yvars.end());
  all.insert(all.end(), p.zvars.begin(), p.zvars.end());
  for (auto& d : j.at("delta"))
    p.delta.push_back(coerce_sorts(parse(d.get<std::string>(), th), all));
  for (auto& f : j.at("pi"))
    p.pi.push_back(coerce_sorts(parse(f.get<std::string>(), th), all));
  p.k = j.at("k");
  return p;
}

ojson j_rank_tree(const RankTree& t) {
  ojson j = {{"phi", t.phi->str()}, {"base", j_eset(t.base)}};
  if (t.step) {
    j["step"] = {{"delta_idx", t.step->delta_idx},
                 {"pi_idx", t.step->pi_idx},
                 {"c", j_elems(t.step->c)},
                 {"q", j_type(t.step->q)},
                 {"a", j_elems(t.step->a)}};
    if (t.child) j["child"] = j_rank_tree(*t.child);
  }
  return j;
}

RankTree tree_of_j(const ojson& j, TheoryId th, const RankParams& p) {
  RankTree t;
  std::vector<Var> all = p.xvars;
  all.insert(all.end(), p.yvars.begin(), p.yvars.end());
  t.phi = coerce_sorts(parse(j.at("phi").get<std::string>(), th), all);
  t.base = eset_of_j(j.at("base"), th);
  if (j.contains("step")) {
    const ojson& s = j.at("step");
    t.step = RankStep{s.at("delta_idx"), s.at("pi_idx"), elems_of_j(s.at("c"), th),
                      type_of_j(s.at("q"), th), elems_of_j(s.at("a"), th)};
    if (j.contains("child"))
      t.child = std::make_shared<RankTree>(tree_of_j(j.at("child"), th, p));
  }
  return t;
}

ojson j_chain(const std::vector<UthLink>& chain) {
  ojson a = ojson::array();
  for (auto& l : chain) {
    ojson j = {{"q", j_type(l.q)}, {"over", j_eset(l.over)}};
    if (!l.cert.disjuncts.empty()) j["fork"] = j_fork(l.cert);
    a.push_back(j);
  }
  return a;
}

std::vector<UthLink> chain_of_j(const ojson& a, TheoryId th) {
  std::vector<UthLink> out;
  for (auto& j : a) {
    UthLink l;
    l.q = type_of_j(j.at("q"), th);
    l.over = eset_of_j(j.at("over"), th);
    if (j.contains("fork")) l.cert = fork_of_j(j.at("fork"), th);
    out.push_back(std::move(l));
  }
  return out;
}

// ---- shared option state ----

struct Opts {
  std::string theory;
  std::string base;
  std::string config;
  SearchBudget budget;
  int cap = 0;
  int jobs = 1;
  uint64_t seed = 42;
  int count = 100;
};

void add_common(CLI::App* cmd, Opts& o, bool needs_theory = true) {
  auto* t = cmd->add_option("--theory", o.theory, "eq, dlo or erel");
  if (needs_theory) t->required();
  cmd->add_option("--base", o.base, "comma-separated element literals");
  cmd->add_option("--budget-witness-len", o.budget.witness_len, "max extra witness tuple length");
  cmd->add_option("--budget-disjuncts", o.budget.n_max, "max disjuncts in a forking cover");
  cmd->add_option("--pool-depth", o.budget.pool_depth, "witness pool growth depth");
  cmd->add_option("--k-max", o.budget.k_max, "inconsistency search range");
  cmd->add_flag("--strict", o.budget.strict, "report unknown instead of no on pool exhaustion");
  cmd->add_option("--cap", o.cap, "rank search cap (0 = automatic)");
  cmd->add_option("--config", o.config, "key=value file with default budgets");
}

// flags win over the config file: apply only settings the command line left
// at their defaults
void apply_config(const CLI::App* cmd, Opts& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw std::runtime_error("cannot open config file " + o.config);
  std::string line;
  auto unset = [&](const std::string& flag) {
    auto* opt = cmd->get_option_no_throw(flag);
    return opt && opt->count() == 0;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad config line: " + line);
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "witness-len" && unset("--budget-witness-len")) o.budget.witness_len = std::stoi(val);
    else if (key == "disjuncts" && unset("--budget-disjuncts")) o.budget.n_max = std::stoi(val);
    else if (key == "pool-depth" && unset("--pool-depth")) o.budget.pool_depth = std::stoi(val);
    else if (key == "k-max" && unset("--k-max")) o.budget.k_max = std::stoi(val);
    else if (key == "strict" && unset("--strict")) o.budget.strict = val == "true" || val == "1";
    else if (key == "cap" && unset("--cap")) o.cap = std::stoi(val);
  }
}

ojson j_bounds(const Opts& o) {
  return {{"witness_len", o.budget.witness_len},
          {"disjuncts", o.budget.n_max},
          {"pool_depth", o.budget.pool_depth},
          {"k_max", o.budget.k_max},
          {"strict", o.budget.strict},
          {"cap", o.cap}};
}

// Variable names as written, straight from the source text: folding can
// erase variables from trivial atoms (x = x parses to true), but the rank
// conventions still need them.
std::vector<std::string> lexical_vars(const std::vector<std::string>& texts) {
  static const std::set<std::string> keywords{"exists", "forall", "true", "false", "cl", "E"};
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& s : texts) {
    for (size_t i = 0; i < s.size();) {
      if (!isalpha((unsigned char)s[i])) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j < s.size() && (isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
      std::string name = s.substr(i, j - i);
      i = j;
      if (!keywords.contains(name) && islower((unsigned char)name[0]) && seen.insert(name).second)
        out.push_back(name);
    }
  }
  return out;
}

std::set<Var> collect_vars(std::initializer_list<FormulaPtr> fs) {
  std::set<Var> out;
  for (auto& f : fs)
    if (f)
      for (auto& v : free_vars(f)) out.insert(v);
  return out;
}

int emit(ojson& report, std::chrono::steady_clock::time_point t0, int code) {
  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
  report["wall_time_ms"] = (long long)ms.count();
  std::cout << report.dump(2) << "\n";
  return code;
}

int verdict_code(Verdict v) { return v == Verdict::Unknown ? 2 : 0; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thorn-forking independence calculus over eq/dlo/erel"};
  app.require_subcommand(1);
  Opts o;

  std::string f_text, phi_text, delta_text, a_text, b_text, x_text, y_text, z_text;
  std::string vars_text, tuple_text, suite, report_file;
  std::vector<std::string> deltas_text, pis_text;
  int k = 2, length = 3;

  auto* c_qe = app.add_subcommand("qe", "eliminate quantifiers");
  c_qe->add_option("--f", f_text, "formula")->required();
  add_common(c_qe, o);

  auto* c_holds = app.add_subcommand("holds", "evaluate a sentence in the canonical model");
  c_holds->add_option("--f", f_text, "closed formula")->required();
  add_common(c_holds, o);

  auto* c_count = app.add_subcommand("count", "count solutions of a definable set");
  c_count->add_option("--f", f_text, "formula")->required();
  c_count->add_option("--vars", vars_text, "object variables")->required();
  add_common(c_count, o);

  auto* c_types = app.add_subcommand("types", "enumerate complete types over a base");
  c_types->add_option("--vars", vars_text, "variables, e.g. \"x\" or \"x,y:c\"")->required();
  add_common(c_types, o);

  auto* c_sdiv = app.add_subcommand("sdivides", "strong dividing of delta(x, a) over base");
  c_sdiv->add_option("--delta", delta_text, "splitting formula")->required();
  c_sdiv->add_option("--x", x_text, "object variables")->required();
  c_sdiv->add_option("--y", y_text, "parameter variables")->required();
  c_sdiv->add_option("--a", a_text, "parameter tuple")->required();
  add_common(c_sdiv, o);

  auto* c_div = app.add_subcommand("divides", "thorn-dividing of delta(x, a) over base");
  c_div->add_option("--delta", delta_text, "splitting formula")->required();
  c_div->add_option("--x", x_text, "object variables")->required();
  c_div->add_option("--y", y_text, "parameter variables")->required();
  c_div->add_option("--a", a_text, "parameter tuple")->required();
  add_common(c_div, o);

  auto* c_forks = app.add_subcommand("forks", "thorn-forking of phi over base");
  c_forks->add_option("--phi", phi_text, "formula with embedded parameters")->required();
  c_forks->add_option("--x", x_text, "object variables")->required();
  add_common(c_forks, o);

  auto* c_indep = app.add_subcommand("indep", "thorn-independence of a from b over base");
  c_indep->add_option("--a", a_text, "left tuple")->required();
  c_indep->add_option("--b", b_text, "right tuple")->required();
  add_common(c_indep, o);

  auto* c_morley = app.add_subcommand("morley", "thorn-Morley sequence in tp(tuple/base)");
  c_morley->add_option("--type-of", tuple_text, "tuple whose type to use")->required();
  c_morley->add_option("--length", length, "sequence length");
  add_common(c_morley, o);

  auto* c_rank = app.add_subcommand("rank", "local thorn rank of p over base");
  c_rank->add_option("--p", phi_text, "ranked formula")->required();
  c_rank->add_option("--delta", deltas_text, "splitting formulas")->required();
  c_rank->add_option("--pi", pis_text, "parameter constraints")->required();
  c_rank->add_option("--x", x_text, "object variables (default: from --p)");
  c_rank->add_option("--y", y_text, "parameter variables (default: from --delta)");
  c_rank->add_option("--z", z_text, "outer parameter variables");
  c_rank->add_option("--k", k, "inconsistency width");
  add_common(c_rank, o);

  auto* c_uth = app.add_subcommand("uth", "U-thorn rank of tp(tuple/base)");
  c_uth->add_option("--type-of", tuple_text, "tuple whose type to rank")->required();
  add_common(c_uth, o);

  auto* c_uths = app.add_subcommand("uthstar", "starred U-thorn rank of tp(tuple/base)");
  c_uths->add_option("--type-of", tuple_text, "tuple whose type to rank")->required();
  add_common(c_uths, o);

  auto* c_lascar = app.add_subcommand("lascar", "Lascar inequalities for (a, b, base)");
  c_lascar->add_option("--a", a_text, "left tuple")->required();
  c_lascar->add_option("--b", b_text, "right tuple")->required();
  add_common(c_lascar, o);

  auto* c_verify = app.add_subcommand("verify", "run a named property suite");
  c_verify->add_option("--suite", suite, "suite name")->required();
  c_verify->add_option("--seed", o.seed, "instance generator seed");
  c_verify->add_option("--count", o.count, "instance count");
  c_verify->add_option("--jobs", o.jobs, "worker threads");
  add_common(c_verify, o, false);

  auto* c_recheck = app.add_subcommand("recheck", "re-verify certificates in a report");
  c_recheck->add_option("--report", report_file, "report file to re-ingest")->required();

  CLI11_PARSE(app, argc, argv);
  CLI::App* cmd = app.get_subcommands().front();
  auto t0 = std::chrono::steady_clock::now();

  try {
    apply_config(cmd, o);
    ojson R;
    R["command"] = cmd->get_name();
    if (!o.theory.empty()) R["theory"] = o.theory;

    if (cmd == c_recheck) {
      std::ifstream in(report_file);
      if (!in) throw std::runtime_error("cannot open report " + report_file);
      ojson rep = ojson::parse(in);
      TheoryId th = theory_of(rep.at("theory"));
      R["theory"] = rep.at("theory");
      R["inputs"] = {{"report", report_file}, {"report_command", rep.at("command")}};
      std::string rc = rep.at("command");
      bool ok = true;
      std::string note = "certificate re-verified";
      if (rc == "divides" && rep.contains("certificate") && !rep["certificate"].is_null()) {
        ok = verify_divide(th, divide_of_j(rep["certificate"], th));
      } else if ((rc == "forks" || rc == "indep") && rep.contains("certificate") &&
                 !rep["certificate"].is_null()) {
        const ojson& c = rep["certificate"];
        std::vector<Var> xv = vars_of_j(c.at("xvars"));
        FormulaPtr phi = coerce_sorts(parse(c.at("phi").get<std::string>(), th), xv);
        ok = verify_fork(th, phi, xv, fork_of_j(c.at("fork"), th));
      } else if (rc == "rank" && rep.contains("certificate") && !rep["certificate"].is_null()) {
        RankParams p = params_of_j(rep["certificate"].at("params"), th);
        ok = verify_rank_tree(th, tree_of_j(rep["certificate"].at("tree"), th, p), p);
      } else if ((rc == "uth" || rc == "uthstar") && rep.contains("certificate") &&
                 !rep["certificate"].is_null()) {
        const ojson& c = rep["certificate"];
        TypeDesc t = type_of_j(c.at("type"), th);
        UthValue v{c.at("value"), c.at("capped"), chain_of_j(c.at("chain"), th)};
        ok = verify_uth_chain(th, t, v);
      } else if (rc == "morley" && rep.contains("certificate") && !rep["certificate"].is_null()) {
        const ojson& c = rep["certificate"];
        TypeDesc t = type_of_j(c.at("type"), th);
        std::set<std::string> distinct;
        for (auto& row : c.at("sequence")) {
          std::vector<Elem> tup = elems_of_j(row, th);
          std::map<Var, Elem> env;
          for (size_t i = 0; i < t.vars.size(); ++i) env[t.vars[i]] = tup[i];
          if (!eval_qf(t.iso, env) || !distinct.insert(render_tuple(tup)).second) ok = false;
        }
      } else {
        note = "no certificate to verify";
      }
      R["result"] = {{"verified", ok}, {"note", note}};
      return emit(R, t0, ok ? 0 : 1);
    }

    TheoryId th = theory_of(o.theory);
    std::set<Elem> base;
    for (auto& e : parse_element_list(o.base, th)) base.insert(e);
    R["bounds"] = j_bounds(o);
    R["certificate"] = nullptr;

    if (cmd == c_qe) {
      FormulaPtr f = parse(f_text, th);
      R["inputs"] = {{"f", f->str()}};
      R["result"] = {{"formula", qe(th, f)->str()}};
      return emit(R, t0, 0);
    }

    if (cmd == c_holds) {
      FormulaPtr f = parse(f_text, th);
      R["inputs"] = {{"f", f->str()}};
      R["result"] = {{"holds", holds(th, f)}};
      return emit(R, t0, 0);
    }

    if (cmd == c_count) {
      FormulaPtr f = parse(f_text, th);
      std::vector<Var> vars = parse_vars(vars_text, collect_vars({f}));
      R["inputs"] = {{"f", f->str()}, {"vars", j_vars(vars)}};
      SolutionCount sc = solution_count(th, f, vars);
      ojson ws = ojson::array();
      for (auto& w : sc.witnesses) ws.push_back(j_elems(w));
      R["result"] = {{"infinite", sc.infinite}, {"size", sc.size()}, {"witnesses", ws}};
      return emit(R, t0, 0);
    }

    if (cmd == c_types) {
      std::vector<Var> vars = parse_vars(vars_text, {});
      R["inputs"] = {{"vars", j_vars(vars)}, {"base", j_eset(base)}};
      ojson ts = ojson::array();
      for (auto& t : enumerate_types(th, vars, base)) ts.push_back(j_type(t));
      R["result"] = {{"types", ts}};
      return emit(R, t0, 0);
    }

    if (cmd == c_sdiv || cmd == c_div) {
      FormulaPtr delta = parse(delta_text, th);
      auto known = collect_vars({delta});
      std::vector<Var> xv = parse_vars(x_text, known), yv = parse_vars(y_text, known);
      std::vector<Elem> a = parse_element_list(a_text, th);
      R["inputs"] = {{"delta", delta->str()}, {"xvars", j_vars(xv)}, {"yvars", j_vars(yv)},
                     {"a", j_elems(a)},       {"base", j_eset(base)}};
      if (cmd == c_sdiv) {
        auto [yes, least_k] = strongly_divides(th, delta, xv, yv, a, base, o.budget.k_max);
        R["result"] = {{"strongly_divides", yes},
                       {"k", least_k ? ojson(*least_k) : ojson(nullptr)}};
        return emit(R, t0, 0);
      }
      Decision d = thorn_divides(th, delta, xv, yv, a, base, o.budget);
      R["result"] = {{"verdict", verdict_name(d.verdict)}, {"note", d.note}};
      if (d.divide) R["certificate"] = j_divide(*d.divide);
      return emit(R, t0, verdict_code(d.verdict));
    }

    if (cmd == c_forks) {
      FormulaPtr phi = parse(phi_text, th);
      std::vector<Var> xv = parse_vars(x_text, collect_vars({phi}));
      R["inputs"] = {{"phi", phi->str()}, {"xvars", j_vars(xv)}, {"base", j_eset(base)}};
      Decision d = thorn_forks(th, phi, xv, base, o.budget);
      R["result"] = {{"verdict", verdict_name(d.verdict)}, {"note", d.note}};
      if (d.fork)
        R["certificate"] = {{"phi", phi->str()}, {"xvars", j_vars(xv)}, {"fork", j_fork(*d.fork)}};
      return emit(R, t0, verdict_code(d.verdict));
    }

    if (cmd == c_indep) {
      std::vector<Elem> a = parse_element_list(a_text, th), b = parse_element_list(b_text, th);
      R["inputs"] = {{"a", j_elems(a)}, {"b", j_elems(b)}, {"base", j_eset(base)}};
      Decision d = thorn_indep(th, a, b, base, o.budget);
      R["result"] = {{"verdict", verdict_name(d.verdict)},
                     {"independent", d.verdict == Verdict::Yes},
                     {"note", d.note}};
      if (d.fork) {
        std::set<Elem> ext = base;
        ext.insert(b.begin(), b.end());
        TypeDesc t = type_of(th, a, ext);
        R["certificate"] = {{"phi", t.iso->str()}, {"xvars", j_vars(t.vars)},
                            {"fork", j_fork(*d.fork)}};
      }
      if (d.verdict != Verdict::Unknown)
        R["oracle"] = {{"independent", oracle_indep(th, a, b, base)},
                       {"rule", oracle_indep_rule(th)}};
      return emit(R, t0, verdict_code(d.verdict));
    }

    if (cmd == c_morley) {
      std::vector<Elem> tup = parse_element_list(tuple_text, th);
      TypeDesc t = type_of(th, tup, base);
      R["inputs"] = {{"type_of", j_elems(tup)}, {"base", j_eset(base)}, {"length", length}};
      auto seq = morley_sequence(th, t, length, o.budget);
      ojson rows = ojson::array();
      for (auto& r : seq) rows.push_back(j_elems(r));
      R["result"] = {{"sequence", rows}};
      R["certificate"] = {{"type", j_type(t)}, {"sequence", rows}};
      return emit(R, t0, 0);
    }

    if (cmd == c_rank) {
      RankParams p;
      p.k = k;
      FormulaPtr phi = parse(phi_text, th);
      for (auto& s : deltas_text) p.delta.push_back(parse(s, th));
      for (auto& s : pis_text) p.pi.push_back(parse(s, th));
      std::set<Var> known = collect_vars({phi});
      for (auto& d : p.delta)
        for (auto& v : free_vars(d)) known.insert(v);
      for (auto& f : p.pi)
        for (auto& v : free_vars(f)) known.insert(v);
      auto resolve = [&](const std::string& name) {
        for (auto& v : known)
          if (v.name == name) return v;
        return Var{name, Sort::Elem};
      };
      // default conventions: parameter variables are the ones written in the
      // pi constraints, object variables the rest of p and the deltas
      if (y_text.empty()) {
        for (auto& name : lexical_vars(pis_text)) p.yvars.push_back(resolve(name));
      } else {
        p.yvars = parse_vars(y_text, known);
      }
      if (x_text.empty()) {
        std::set<std::string> ys;
        for (auto& v : p.yvars) ys.insert(v.name);
        std::vector<std::string> texts{phi_text};
        texts.insert(texts.end(), deltas_text.begin(), deltas_text.end());
        for (auto& name : lexical_vars(texts))
          if (!ys.contains(name)) p.xvars.push_back(resolve(name));
      } else {
        p.xvars = parse_vars(x_text, known);
      }
      p.zvars = parse_vars(z_text, known);
      int cap = o.cap > 0 ? o.cap : 6;
      auto [rv, tree] = local_rank(th, phi, base, p, cap);
      R["inputs"] = {{"p", phi->str()}, {"params", j_rank_params(p)}, {"base", j_eset(base)}};
      R["result"] = {{"rank", rv.as_int()},
                     {"kind", rv.kind == RankValue::Kind::MinusInfinity ? "minus_infinity"
                              : rv.kind == RankValue::Kind::AtLeast     ? "at_least"
                                                                        : "finite"}};
      R["certificate"] = {{"params", j_rank_params(p)}, {"tree", j_rank_tree(tree)}};
      return emit(R, t0, 0);
    }

    if (cmd == c_uth || cmd == c_uths) {
      std::vector<Elem> tup = parse_element_list(tuple_text, th);
      TypeDesc t = type_of(th, tup, base);
      R["inputs"] = {{"type_of", j_elems(tup)}, {"base", j_eset(base)}, {"iso", t.iso->str()}};
      UthValue v = cmd == c_uth ? uth_rank(th, t, o.budget, o.cap)
                                : uth_star_rank(th, t, o.budget, o.cap);
      R["result"] = {{"rank", v.value}, {"capped", v.capped}};
      R["certificate"] = {{"type", j_type(t)},
                          {"value", v.value},
                          {"capped", v.capped},
                          {"chain", j_chain(v.chain)}};
      if (cmd == c_uth) R["oracle"] = {{"rank", oracle_uth(th, t)}};
      return emit(R, t0, 0);
    }

    if (cmd == c_lascar) {
      std::vector<Elem> a = parse_element_list(a_text, th), b = parse_element_list(b_text, th);
      R["inputs"] = {{"a", j_elems(a)}, {"b", j_elems(b)}, {"base", j_eset(base)}};
      LascarResult r = lascar_check(th, a, b, base, o.budget);
      R["result"] = {{"lhs", r.lhs}, {"mid", r.mid}, {"rhs", r.rhs}, {"holds", r.holds}};
      return emit(R, t0, r.holds ? 0 : 1);
    }

    if (cmd == c_verify) {
      R["inputs"] = {{"suite", suite}, {"seed", o.seed}, {"count", o.count}, {"jobs", o.jobs}};
      SuiteResult r = run_suite(suite, o.seed, o.count, o.jobs, o.budget);
      R["result"] = {{"pass", r.pass}, {"fail", r.fail}, {"counterexample", r.counterexample}};
      return emit(R, t0, r.fail == 0 ? 0 : 1);
    }

    throw std::logic_error("unhandled subcommand");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
