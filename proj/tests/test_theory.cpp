#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "thornlab/theory.hpp"

using namespace thornlab;

namespace {

bool equivalent(TheoryId th, const FormulaPtr& a, const FormulaPtr& b) {
  auto fv = free_vars(a);
  for (auto& v : free_vars(b)) fv.insert(v);
  auto iff = f_and2(f_implies(a, b), f_implies(b, a));
  return decide(th, forall_closure(iff, {fv.begin(), fv.end()}));
}

}  // namespace

TEST_CASE("qe on forced examples") {
  auto f = qe(TheoryId::DLO, parse("exists y. x < y & y < z", TheoryId::DLO));
  CHECK(is_quantifier_free(f));
  CHECK(equivalent(TheoryId::DLO, f, parse("x < z", TheoryId::DLO)));

  CHECK(qe(TheoryId::EQ, parse("exists y. !(y = x) & !(y = z)", TheoryId::EQ))->kind == Formula::Kind::True);
  CHECK(qe(TheoryId::EREL, parse("exists y. cl(y) = c & !(y = 2.5)", TheoryId::EREL))->kind == Formula::Kind::True);
}

TEST_CASE("holds on ground sentences") {
  CHECK(holds(TheoryId::DLO, parse("0 < 1", TheoryId::DLO)));
  CHECK(!holds(TheoryId::EQ, parse("#0 = #1", TheoryId::EQ)));
  CHECK(holds(TheoryId::EREL, parse("E(2.5, 2.7)", TheoryId::EREL)));
  CHECK(!holds(TheoryId::EREL, parse("E(2.5, 3.5)", TheoryId::EREL)));
  CHECK_THROWS(holds(TheoryId::EQ, parse("x = #1", TheoryId::EQ)));
}

TEST_CASE("holds evaluates quantifiers semantically") {
  CHECK(holds(TheoryId::DLO, parse("forall x. exists y. x < y", TheoryId::DLO)));
  CHECK(holds(TheoryId::DLO, parse("forall x, z. x < z -> (exists y. x < y & y < z)", TheoryId::DLO)));
  CHECK(!holds(TheoryId::DLO, parse("exists x. forall y. x < y | x = y", TheoryId::DLO)));
  CHECK(holds(TheoryId::EQ, parse("exists x, y, z. !(x = y) & !(y = z) & !(x = z)", TheoryId::EQ)));
  CHECK(holds(TheoryId::EREL, parse("forall c. exists x. cl(x) = c & !(x = 0.0)", TheoryId::EREL)));
  CHECK(holds(TheoryId::EREL, parse("exists c. forall x. !(cl(x) = c) | !(x = 1.1) | x = 1.1", TheoryId::EREL)));
  CHECK(!holds(TheoryId::EREL, parse("exists x. forall y. E(x, y)", TheoryId::EREL)));
}

namespace {

FormulaPtr random_qf(std::mt19937_64& rng, TheoryId th, const std::vector<Var>& vars, int depth);

Term random_term(std::mt19937_64& rng, TheoryId th, const std::vector<Var>& vars) {
  if (rng() % 2) return Term::variable(vars[rng() % vars.size()]);
  switch (th) {
    case TheoryId::EQ: return Term::literal(Elem::eq_nat(rng() % 4));
    case TheoryId::DLO: return Term::literal(Elem::dlo_rat(Rational((long long)(rng() % 9) - 4, 1 + rng() % 4)));
    case TheoryId::EREL: return Term::literal(Elem::erel_pair(rng() % 3, rng() % 3));
  }
  return Term::literal(Elem::eq_nat(0));
}

FormulaPtr random_qf(std::mt19937_64& rng, TheoryId th, const std::vector<Var>& vars, int depth) {
  if (depth == 0) {
    Term a = random_term(rng, th, vars), b = random_term(rng, th, vars);
    if (th == TheoryId::DLO && rng() % 2) return f_less(a, b);
    if (th == TheoryId::EREL && rng() % 2) return f_eq(Term::cl_of(a), Term::cl_of(b));
    return f_eq(a, b);
  }
  switch (rng() % 4) {
    case 0: return f_not(random_qf(rng, th, vars, depth - 1));
    case 1: return f_and2(random_qf(rng, th, vars, depth - 1), random_qf(rng, th, vars, depth - 1));
    case 2: return f_or2(random_qf(rng, th, vars, depth - 1), random_qf(rng, th, vars, depth - 1));
    default: return f_implies(random_qf(rng, th, vars, depth - 1), random_qf(rng, th, vars, depth - 1));
  }
}

// random sentence: quantifier prefix over a random quantifier-free matrix
FormulaPtr random_sentence(std::mt19937_64& rng, TheoryId th, int nvars, int depth) {
  std::vector<Var> vars;
  for (int i = 0; i < nvars; ++i) vars.push_back({std::string(1, char('u' + i)), Sort::Elem});
  FormulaPtr f = random_qf(rng, th, vars, depth);
  for (auto& v : free_vars(f)) f = (rng() % 2) ? f_exists(v, f) : f_forall(v, f);
  return f;
}

}  // namespace

TEST_CASE("qe agrees with semantic evaluation, fuzzed") {
  std::mt19937_64 rng(21);
  for (TheoryId th : {TheoryId::EQ, TheoryId::DLO, TheoryId::EREL})
    for (int i = 0; i < 400; ++i) {
      auto f = random_sentence(rng, th, 2 + int(rng() % 2), 3);
      CAPTURE(f->str());
      auto g = qe(th, f);
      REQUIRE(is_quantifier_free(g));
      CHECK(holds(th, f) == eval_qf(g, {}));
    }
}

TEST_CASE("solution counting") {
  Var x{"x", Sort::Elem};
  auto sc = solution_count(TheoryId::EQ, parse("x = #3", TheoryId::EQ), {x});
  REQUIRE(!sc.infinite);
  REQUIRE(sc.size() == 1);
  CHECK(sc.witnesses[0][0] == Elem::eq_nat(3));

  CHECK(solution_count(TheoryId::DLO, parse("0 < x & x < 1", TheoryId::DLO), {x}).infinite);

  sc = solution_count(TheoryId::DLO, parse("x = 0 | x = 1", TheoryId::DLO), {x});
  REQUIRE(!sc.infinite);
  REQUIRE(sc.size() == 2);
  CHECK(sc.witnesses[0][0] == Elem::dlo_rat(Rational(0)));
  CHECK(sc.witnesses[1][0] == Elem::dlo_rat(Rational(1)));

  Var y{"y", Sort::Elem};
  sc = solution_count(TheoryId::EQ, parse("(x = #0 | x = #1) & (y = x | y = #5)", TheoryId::EQ), {x, y});
  REQUIRE(!sc.infinite);
  CHECK(sc.size() == 4);

  CHECK(solution_count(TheoryId::EREL, parse("cl(x) = @3", TheoryId::EREL), {x}).infinite);
  sc = solution_count(TheoryId::EREL, parse("cl(x) = @3 & x = 3.1", TheoryId::EREL), {x});
  REQUIRE(sc.size() == 1);
  CHECK(sc.witnesses[0][0] == Elem::erel_pair(3, 1));
}

TEST_CASE("one-variable type enumeration matches the classical pictures") {
  Var x{"x", Sort::Elem};
  auto eq = enumerate_types(TheoryId::EQ, {x}, {Elem::eq_nat(0), Elem::eq_nat(1)});
  CHECK(eq.size() == 3);
  auto dlo = enumerate_types(TheoryId::DLO, {x}, {Elem::dlo_rat(Rational(0)), Elem::dlo_rat(Rational(1))});
  CHECK(dlo.size() == 5);
  auto erel = enumerate_types(TheoryId::EREL, {x}, {Elem::erel_pair(2, 5)});
  CHECK(erel.size() == 3);

  int nonalg = 0;
  for (auto& t : dlo) nonalg += t.non_algebraic;
  CHECK(nonalg == 3);
}

namespace {

Elem random_elem(std::mt19937_64& rng, TheoryId th) {
  switch (th) {
    case TheoryId::EQ: return Elem::eq_nat(rng() % 6);
    case TheoryId::DLO: return Elem::dlo_rat(Rational((long long)(rng() % 11) - 5, 1 + rng() % 4));
    case TheoryId::EREL: return Elem::erel_pair(rng() % 4, rng() % 3);
  }
  return Elem::eq_nat(0);
}

}  // namespace

TEST_CASE("types partition the model, fuzzed") {
  std::mt19937_64 rng(22);
  std::map<TheoryId, std::set<Elem>> bases{
      {TheoryId::EQ, {Elem::eq_nat(0), Elem::eq_nat(2)}},
      {TheoryId::DLO, {Elem::dlo_rat(Rational(-1)), Elem::dlo_rat(Rational(1, 2))}},
      {TheoryId::EREL, {Elem::erel_pair(0, 0), Elem::erel_pair(1, 2), Elem::erel_class(4)}},
  };
  for (auto& [th, base] : bases) {
    std::vector<Var> vars{{"x", Sort::Elem}, {"y", Sort::Elem}};
    auto types = enumerate_types(th, vars, base);
    for (int trial = 0; trial < 80; ++trial) {
      std::map<Var, Elem> env{{vars[0], random_elem(rng, th)}, {vars[1], random_elem(rng, th)}};
      int sat = 0;
      for (auto& t : types) sat += eval_qf(t.iso, env);
      CAPTURE(theory_name(th));
      CAPTURE(env[vars[0]].str());
      CAPTURE(env[vars[1]].str());
      CHECK(sat == 1);
    }
  }
}

TEST_CASE("realizations follow the deterministic fresh rules") {
  Var x{"x", Sort::Elem};
  TypeDesc t{TheoryId::EQ, {x}, {Elem::eq_nat(0), Elem::eq_nat(1)},
             parse("!(x = #0) & !(x = #1)", TheoryId::EQ), true};
  CHECK(realize_type(TheoryId::EQ, t, {Elem::eq_nat(2)})[0] == Elem::eq_nat(3));

  TypeDesc d{TheoryId::DLO, {x}, {Elem::dlo_rat(Rational(0)), Elem::dlo_rat(Rational(1))},
             parse("0 < x & x < 1", TheoryId::DLO), true};
  CHECK(realize_type(TheoryId::DLO, d, {Elem::dlo_rat(Rational(1, 2))})[0] == Elem::dlo_rat(Rational(1, 4)));
  CHECK(realize_type(TheoryId::DLO, d, {})[0] == Elem::dlo_rat(Rational(1, 2)));

  TypeDesc e{TheoryId::EREL, {x}, {Elem::erel_pair(2, 5)},
             parse("!(cl(x) = cl(2.5))", TheoryId::EREL), true};
  CHECK(realize_type(TheoryId::EREL, e, {})[0] == Elem::erel_pair(0, 0));
  CHECK(realize_type(TheoryId::EREL, e, {Elem::erel_pair(0, 0)})[0] == Elem::erel_pair(1, 0));

  // unbounded ends use endpoint +- 1
  TypeDesc below{TheoryId::DLO, {x}, {Elem::dlo_rat(Rational(0))}, parse("x < 0", TheoryId::DLO), true};
  CHECK(realize_type(TheoryId::DLO, below, {})[0] == Elem::dlo_rat(Rational(-1)));
}

TEST_CASE("pinned coordinates ignore avoid") {
  Var x{"x", Sort::Elem};
  TypeDesc t{TheoryId::EQ, {x}, {Elem::eq_nat(3)}, parse("x = #3", TheoryId::EQ), false};
  CHECK(realize_type(TheoryId::EQ, t, {Elem::eq_nat(3)})[0] == Elem::eq_nat(3));
}

TEST_CASE("type_of inverts realize_type") {
  std::set<Elem> base{Elem::dlo_rat(Rational(0)), Elem::dlo_rat(Rational(1))};
  std::vector<Var> vars{{"x1", Sort::Elem}, {"x2", Sort::Elem}};
  for (auto& t : enumerate_types(TheoryId::DLO, vars, base)) {
    auto r = realize_type(TheoryId::DLO, t, {});
    CHECK(struct_eq(type_of(TheoryId::DLO, r, base).iso, t.iso));
  }
}

TEST_CASE("infinite verdicts are witnessed by many realizations") {
  Var x{"x", Sort::Elem};
  for (TheoryId th : {TheoryId::EQ, TheoryId::DLO, TheoryId::EREL}) {
    FormulaPtr f = th == TheoryId::EQ    ? parse("!(x = #0)", TheoryId::EQ)
                   : th == TheoryId::DLO ? parse("0 < x & x < 1", TheoryId::DLO)
                                         : parse("cl(x) = @2", TheoryId::EREL);
    REQUIRE(solution_count(th, f, {x}).infinite);
    auto samples = sample_distinct(th, f, {x}, 50);
    REQUIRE(samples.size() == 50);
    std::set<Elem> seen;
    for (auto& s : samples) {
      CHECK(eval_qf(f, {{x, s[0]}}));
      seen.insert(s[0]);
    }
    CHECK(seen.size() == 50);
  }
}

TEST_CASE("algebraic closure") {
  std::set<Elem> b{Elem::erel_pair(2, 5)};
  auto c = acl(TheoryId::EREL, b);
  CHECK(c.contains(Elem::erel_class(2)));
  CHECK(acl(TheoryId::DLO, {Elem::dlo_rat(Rational(1))}).size() == 1);
}

TEST_CASE("witness pool grows by fresh representatives") {
  auto p0 = witness_pool(TheoryId::EQ, {}, 1);
  REQUIRE(p0.size() == 1);
  CHECK(p0[0] == Elem::eq_nat(0));
  auto p = witness_pool(TheoryId::DLO, {Elem::dlo_rat(Rational(0))}, 1);
  CHECK(p.size() == 3);  // a point below and a point above join the seed
  auto e = witness_pool(TheoryId::EREL, {Elem::erel_pair(0, 0)}, 1);
  CHECK(e.size() >= 3);
}
