#include "thornlab/verify.hpp"

#include <thread>

namespace thornlab {

namespace {

constexpr TheoryId kTheories[] = {TheoryId::EQ, TheoryId::DLO, TheoryId::EREL};

std::set<Elem> with_elems(std::set<Elem> s, const std::vector<Elem>& more) {
  s.insert(more.begin(), more.end());
  return s;
}

std::string show(TheoryId th, const std::vector<Elem>& a, const std::vector<Elem>& b,
                 const std::set<Elem>& base) {
  return theory_name(th) + " a=(" + render_tuple(a) + ") b=(" + render_tuple(b) + ") base={" +
         render_elem_set(base) + "}";
}

// Per-instance outcome: empty string = pass.
using Instance = std::string;

Instance check_symmetry(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1 + rng() % 2);
  auto b = random_tuple(th, rng, 1 + rng() % 2);
  auto base = random_base(th, rng, 2);
  Decision ab = thorn_indep(th, a, b, base, budget);
  Decision ba = thorn_indep(th, b, a, base, budget);
  bool oracle = oracle_indep(th, a, b, base);
  if (ab.verdict == Verdict::Unknown || ba.verdict == Verdict::Unknown)
    return show(th, a, b, base) + ": undecided";
  if (ab.verdict != ba.verdict)
    return show(th, a, b, base) + ": asymmetric " + verdict_name(ab.verdict) + "/" +
           verdict_name(ba.verdict);
  if ((ab.verdict == Verdict::Yes) != oracle)
    return show(th, a, b, base) + ": search " + verdict_name(ab.verdict) + " vs oracle " +
           (oracle ? "independent" : "dependent");
  return {};
}

Instance check_transitivity(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1);
  auto b = random_tuple(th, rng, 1);
  auto c = random_tuple(th, rng, 1);
  auto base = random_base(th, rng, 1);
  std::vector<Elem> bc = b;
  bc.insert(bc.end(), c.begin(), c.end());
  Decision whole = thorn_indep(th, a, bc, base, budget);
  Decision left = thorn_indep(th, a, b, base, budget);
  Decision right = thorn_indep(th, a, c, with_elems(base, b), budget);
  if (whole.verdict == Verdict::Unknown || left.verdict == Verdict::Unknown ||
      right.verdict == Verdict::Unknown)
    return show(th, a, bc, base) + ": undecided";
  bool split = left.verdict == Verdict::Yes && right.verdict == Verdict::Yes;
  if ((whole.verdict == Verdict::Yes) != split)
    return show(th, a, bc, base) + ": whole " + verdict_name(whole.verdict) +
           " but split parts disagree";
  if ((whole.verdict == Verdict::Yes) != oracle_indep(th, a, bc, base))
    return show(th, a, bc, base) + ": disagrees with oracle";
  return {};
}

Instance check_extension(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1 + rng() % 2);
  auto b = random_tuple(th, rng, 1 + rng() % 2);
  auto base = random_base(th, rng, 1);
  TypeDesc t = type_of(th, a, base);
  std::set<Elem> avoid = acl(th, with_elems(with_elems(base, a), b));
  std::vector<Elem> a2 = realize_type(th, t, avoid);
  if (type_of(th, a2, base).iso->str() != t.iso->str())
    return show(th, a, b, base) + ": realization left the type";
  Decision d = thorn_indep(th, a2, b, base, budget);
  if (d.verdict != Verdict::Yes || !oracle_indep(th, a2, b, base))
    return show(th, a2, b, base) + ": no independent realization of tp(a/base)";
  return {};
}

Instance check_rank_laws(std::mt19937_64& rng, const SearchBudget&, int i) {
  TheoryId th = kTheories[i % 3];
  Var x{"x", Sort::Elem}, y{"y", Sort::Elem};
  auto deltas = atomic_deltas(th, x, y);
  int k = 2 + (int)(rng() % 2);
  RankParams small{{deltas[rng() % deltas.size()]}, {f_true()}, {x}, {y}, {}, k};
  RankParams big{deltas, {f_true()}, {x}, {y}, {}, k};

  FormulaPtr f = random_qf(th, rng, {x}, 1 + (int)(rng() % 2));
  FormulaPtr g = random_qf(th, rng, {x}, 1);
  std::string ctx = theory_name(th) + " f=" + f->str() + " g=" + g->str();

  int rf_small = local_rank(th, f, {}, small).first.as_int();
  int rf_big = local_rank(th, f, {}, big).first.as_int();
  if (rf_small > rf_big) return ctx + ": monotonicity violated";

  int rfg = local_rank(th, f_and2(f, g), {}, big).first.as_int();
  if (rfg > rf_big) return ctx + ": extension increased the rank";

  int rg = local_rank(th, g, {}, big).first.as_int();
  int ror = local_rank(th, f_or2(f, g), {}, big).first.as_int();
  if (ror != std::max(rf_big, rg)) return ctx + ": additivity violated";
  return {};
}

Instance check_rank_characterization(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1);
  auto b = random_tuple(th, rng, 1);
  auto base = random_base(th, rng, 1);
  std::set<Elem> baseb = with_elems(base, b);
  FormulaPtr over_b = type_of(th, a, baseb).iso;
  FormulaPtr over_base = type_of(th, a, base).iso;
  Var x{"x1", a[0].sort};  // matches the variable type_of uses in iso
  std::vector<Var> yvars{{"y", x.sort}};
  if (th == TheoryId::EREL && x.sort == Sort::Elem) yvars.push_back({"y", Sort::Class});
  bool preserved = true;
  for (auto& y : yvars)
    for (auto& d : atomic_deltas(th, x, y))
      for (int k : {2, 3}) {
        RankParams p{{d}, {f_true()}, {x}, {y}, {}, k};
        if (local_rank(th, over_b, baseb, p).first.as_int() !=
            local_rank(th, over_base, base, p).first.as_int())
          preserved = false;
      }
  Decision ind = thorn_indep(th, a, b, base, budget);
  if (ind.verdict == Verdict::Unknown) return show(th, a, b, base) + ": undecided";
  if ((ind.verdict == Verdict::Yes) != preserved)
    return show(th, a, b, base) + ": independence " + verdict_name(ind.verdict) +
           " but rank preservation " + (preserved ? "holds" : "fails");
  return {};
}

Instance check_morley(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto base = random_base(th, rng, 2);
  Var x{"x", Sort::Elem};
  std::vector<TypeDesc> types;
  for (auto& t : enumerate_types(th, {x}, base))
    if (t.non_algebraic) types.push_back(t);
  TypeDesc t = types[rng() % types.size()];
  try {
    auto seq = morley_sequence(th, t, 3, budget);
    for (auto& s : seq)
      if (!decide(th, substitute(t.iso, {{x, Term::literal(s[0])}})))
        return theory_name(th) + " " + t.iso->str() + ": entry left the type";
  } catch (const std::exception& e) {
    return theory_name(th) + " " + t.iso->str() + ": " + e.what();
  }
  return {};
}

Instance check_lascar(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1);
  auto b = random_tuple(th, rng, 1 + rng() % 2);
  auto base = random_base(th, rng, 1);
  LascarResult r = lascar_check(th, a, b, base, budget);
  if (!r.holds)
    return show(th, a, b, base) + ": " + std::to_string(r.lhs) + " <= " + std::to_string(r.mid) +
           " <= " + std::to_string(r.rhs) + " fails";
  return {};
}

Instance check_uth_star(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1 + rng() % 2);
  auto base = random_base(th, rng, 1);
  TypeDesc t = type_of(th, a, base);
  int u = uth_rank(th, t, budget).value;
  int s = uth_star_rank(th, t, budget).value;
  if (u != s)
    return theory_name(th) + " " + t.iso->str() + ": uth " + std::to_string(u) + " != uth* " +
           std::to_string(s);
  return {};
}

Instance check_oracle_agreement(std::mt19937_64& rng, const SearchBudget& budget, int i) {
  TheoryId th = kTheories[i % 3];
  auto a = random_tuple(th, rng, 1 + rng() % 2);
  auto b = random_tuple(th, rng, 1 + rng() % 2);
  auto base = random_base(th, rng, 1);
  Decision d = thorn_indep(th, a, b, base, budget);
  if (d.verdict == Verdict::Unknown) return show(th, a, b, base) + ": undecided";
  if ((d.verdict == Verdict::Yes) != oracle_indep(th, a, b, base))
    return show(th, a, b, base) + ": independence disagrees with oracle";
  TypeDesc t = type_of(th, a, base);
  int u = uth_rank(th, t, budget).value;
  int o = oracle_uth(th, t);
  if (u != o)
    return theory_name(th) + " " + t.iso->str() + ": uth " + std::to_string(u) + " vs oracle " +
           std::to_string(o);
  return {};
}

Instance check_qe_fuzz(std::mt19937_64& rng, const SearchBudget&, int i) {
  TheoryId th = kTheories[i % 3];
  std::vector<Var> vars;
  for (int v = 0; v < 3; ++v) vars.push_back({std::string(1, char('u' + v)), Sort::Elem});
  FormulaPtr f = random_qf(th, rng, vars, 2);
  // quantify a random subset, leaving at most 3 free variables
  for (auto& v : free_vars(f))
    if (rng() % 2) f = (rng() % 2) ? f_exists(v, f) : f_forall(v, f);
  FormulaPtr g = qe(th, f);
  if (!is_quantifier_free(g)) return theory_name(th) + " " + f->str() + ": qe left a quantifier";
  auto fv = free_vars(f);
  for (int trial = 0; trial < 5; ++trial) {
    std::map<Var, Term> env;
    for (auto& v : fv)
      env[v] = Term::literal(th == TheoryId::EREL ? Elem::erel_pair(rng() % 4, rng() % 4)
                                                  : random_elem(th, rng));
    FormulaPtr fg = substitute(f, env), gg = substitute(g, env);
    if (holds(th, fg) != eval_qf(gg, {}))
      return theory_name(th) + " " + f->str() + ": value differs after elimination";
  }
  return {};
}

using Checker = Instance (*)(std::mt19937_64&, const SearchBudget&, int);

const std::vector<std::pair<std::string, Checker>>& suites() {
  static const std::vector<std::pair<std::string, Checker>> table = {
      {"symmetry", check_symmetry},
      {"transitivity", check_transitivity},
      {"extension", check_extension},
      {"rank-laws", check_rank_laws},
      {"rank-characterization", check_rank_characterization},
      {"morley", check_morley},
      {"lascar", check_lascar},
      {"uth-star", check_uth_star},
      {"oracle-agreement", check_oracle_agreement},
      {"qe-fuzz", check_qe_fuzz},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (auto& [n, unused] : suites()) out.push_back(n);
    return out;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, uint64_t seed, int count, int jobs,
                      const SearchBudget& budget) {
  Checker checker = nullptr;
  for (auto& [n, c] : suites())
    if (n == name) checker = c;
  if (!checker) throw std::invalid_argument("unknown suite " + name);

  std::vector<Instance> outcomes(count);
  auto worker = [&](int offset, int stride) {
    for (int i = offset; i < count; i += stride) {
      std::mt19937_64 rng(seed * 1000003ull + (uint64_t)i);
      outcomes[i] = checker(rng, budget, i);
    }
  };
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker, t, jobs);
    for (auto& t : threads) t.join();
  }

  SuiteResult res{name};
  for (auto& o : outcomes) {
    if (o.empty())
      ++res.pass;
    else {
      if (res.fail == 0) res.counterexample = o;
      ++res.fail;
    }
  }
  return res;
}

Elem random_elem(TheoryId theory, std::mt19937_64& rng) {
  switch (theory) {
    case TheoryId::EQ: return Elem::eq_nat(rng() % 6);
    case TheoryId::DLO: return Elem::dlo_rat(Rational((long long)(rng() % 9) - 4, 1 + rng() % 3));
    case TheoryId::EREL:
      return rng() % 4 == 0 ? Elem::erel_class(rng() % 4)
                            : Elem::erel_pair(rng() % 4, rng() % 4);
  }
  throw std::logic_error("bad theory");
}

std::vector<Elem> random_tuple(TheoryId theory, std::mt19937_64& rng, size_t n) {
  std::vector<Elem> out;
  for (size_t i = 0; i < n; ++i) out.push_back(random_elem(theory, rng));
  return out;
}

std::set<Elem> random_base(TheoryId theory, std::mt19937_64& rng, size_t max_n) {
  std::set<Elem> out;
  for (size_t i = rng() % (max_n + 1); i > 0; --i) out.insert(random_elem(theory, rng));
  return out;
}

FormulaPtr random_qf(TheoryId theory, std::mt19937_64& rng, const std::vector<Var>& vars,
                     int depth) {
  auto term = [&] {
    if (rng() % 2) return Term::variable(vars[rng() % vars.size()]);
    // literals must be element-sorted: cl() and the object variables are
    if (theory == TheoryId::EREL) return Term::literal(Elem::erel_pair(rng() % 4, rng() % 4));
    return Term::literal(random_elem(theory, rng));
  };
  if (depth == 0) {
    Term a = term(), b = term();
    if (theory == TheoryId::DLO && rng() % 2) return f_less(a, b);
    if (theory == TheoryId::EREL && rng() % 2) return f_eq(Term::cl_of(a), Term::cl_of(b));
    return f_eq(a, b);
  }
  switch (rng() % 4) {
    case 0: return f_not(random_qf(theory, rng, vars, depth - 1));
    case 1: return f_and2(random_qf(theory, rng, vars, depth - 1), random_qf(theory, rng, vars, depth - 1));
    case 2: return f_or2(random_qf(theory, rng, vars, depth - 1), random_qf(theory, rng, vars, depth - 1));
    default:
      return f_implies(random_qf(theory, rng, vars, depth - 1), random_qf(theory, rng, vars, depth - 1));
  }
}

FormulaPtr random_sentence(TheoryId theory, std::mt19937_64& rng, int nvars, int depth) {
  std::vector<Var> vars;
  for (int i = 0; i < nvars; ++i) vars.push_back({std::string(1, char('u' + i)), Sort::Elem});
  FormulaPtr f = random_qf(theory, rng, vars, depth);
  for (auto& v : free_vars(f)) f = (rng() % 2) ? f_exists(v, f) : f_forall(v, f);
  return f;
}

std::vector<FormulaPtr> atomic_deltas(TheoryId theory, const Var& x, const Var& y) {
  Term tx = Term::variable(x), ty = Term::variable(y);
  switch (theory) {
    case TheoryId::EQ: return {f_eq(tx, ty)};
    case TheoryId::DLO: return {f_eq(tx, ty), f_less(tx, ty), f_less(ty, tx)};
    case TheoryId::EREL:
      if (x.sort != y.sort) return {f_eq(Term::cl_of(tx), ty)};  // elem x, class parameter
      if (x.sort == Sort::Class) return {f_eq(tx, ty)};
      return {f_eq(tx, ty), f_eq(Term::cl_of(tx), Term::cl_of(ty))};
  }
  throw std::logic_error("bad theory");
}

}  // namespace thornlab
