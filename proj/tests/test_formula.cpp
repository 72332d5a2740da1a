#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "thornlab/formula.hpp"

using namespace thornlab;

TEST_CASE("parsing shapes") {
  auto f = parse("exists y. x < y & y < z", TheoryId::DLO);
  REQUIRE(f->kind == Formula::Kind::Exists);
  CHECK(f->qvar.name == "y");
  CHECK(f->kids[0]->kind == Formula::Kind::And);
  CHECK(f->kids[0]->kids.size() == 2);

  auto g = parse("x = #3", TheoryId::EQ);
  REQUIRE(g->kind == Formula::Kind::Eq);
  CHECK(g->lhs.is_var({"x", Sort::Elem}));
  CHECK(g->rhs.lit == Elem::eq_nat(3));

  CHECK_THROWS_AS(parse("x < y", TheoryId::EQ), ParseError);
  CHECK_THROWS_AS(parse("x <", TheoryId::DLO), ParseError);
  CHECK_THROWS_AS(parse("cl(x) = x", TheoryId::EREL), ParseError);  // sort clash
}

TEST_CASE("literal syntax per theory") {
  CHECK(parse_element("#7", TheoryId::EQ) == Elem::eq_nat(7));
  CHECK(parse_element("-3/6", TheoryId::DLO) == Elem::dlo_rat(Rational(-1, 2)));
  CHECK(parse_element("2", TheoryId::DLO) == Elem::dlo_rat(Rational(2)));
  CHECK(parse_element("2.5", TheoryId::EREL) == Elem::erel_pair(2, 5));
  CHECK(parse_element("@4", TheoryId::EREL) == Elem::erel_class(4));
  CHECK_THROWS_AS(parse_element("#1", TheoryId::DLO), ParseError);
}

TEST_CASE("E desugars to class equality") {
  auto f = parse("E(x, 2.5)", TheoryId::EREL);
  REQUIRE(f->kind == Formula::Kind::Eq);
  CHECK(f->lhs.kind == Term::Kind::Cl);
  CHECK(f->rhs.lit == Elem::erel_class(2));
}

TEST_CASE("multi-variable quantifier prefix nests") {
  auto f = parse("exists x, y. x < y", TheoryId::DLO);
  REQUIRE(f->kind == Formula::Kind::Exists);
  REQUIRE(f->kids[0]->kind == Formula::Kind::Exists);
  CHECK(free_vars(f).empty());
}

TEST_CASE("substitution") {
  Var x{"x", Sort::Elem}, y{"y", Sort::Elem};
  auto f = parse("x = y", TheoryId::EQ);
  CHECK(substitute(f, {{y, Term::literal(Elem::eq_nat(3))}})->str() == "x = #3");

  auto g = parse("exists y. x < y", TheoryId::DLO);
  CHECK(struct_eq(substitute(g, {{y, Term::literal(Elem::dlo_rat(Rational(0)))}}), g));

  auto renamed = substitute(g, {{x, Term::variable(y)}});
  REQUIRE(renamed->kind == Formula::Kind::Exists);
  CHECK(renamed->qvar.name != "y");  // capture avoided
  CHECK(free_vars(renamed) == std::set<Var>{y});
}

TEST_CASE("free variables") {
  CHECK(free_vars(parse("x = #3", TheoryId::EQ)) == std::set<Var>{{"x", Sort::Elem}});
  CHECK(free_vars(parse("exists y. x < y", TheoryId::DLO)) == std::set<Var>{{"x", Sort::Elem}});
  CHECK(free_vars(parse("true", TheoryId::EQ)).empty());
}

TEST_CASE("rendering round-trips and respects precedence") {
  for (const char* s : {
           "x = #1 | x = #2 & x = #3",
           "(x = #1 | x = #2) & x = #3",
           "!(x = #1) -> x = #2 -> x = #3",
           "exists y. x = y | y = #0",
           "forall y. exists z. !(y = z)",
       }) {
    auto f = parse(s, TheoryId::EQ);
    CHECK(struct_eq(parse(f->str(), TheoryId::EQ), f));
  }
}

namespace {

// random quantifier-free ASTs through the smart constructors
FormulaPtr random_formula(std::mt19937_64& rng, TheoryId th, const std::vector<Var>& vars, int depth) {
  auto term = [&]() -> Term {
    if (rng() % 2) return Term::variable(vars[rng() % vars.size()]);
    switch (th) {
      case TheoryId::EQ: return Term::literal(Elem::eq_nat(rng() % 4));
      case TheoryId::DLO: return Term::literal(Elem::dlo_rat(Rational((long long)(rng() % 7) - 3, 1 + rng() % 3)));
      case TheoryId::EREL: return Term::literal(Elem::erel_pair(rng() % 3, rng() % 3));
    }
    return Term::literal(Elem::eq_nat(0));
  };
  if (depth == 0) {
    Term a = term(), b = term();
    if (th == TheoryId::DLO && rng() % 2) return f_less(a, b);
    if (th == TheoryId::EREL && rng() % 2) return f_eq(Term::cl_of(a), Term::cl_of(b));
    return f_eq(a, b);
  }
  switch (rng() % 4) {
    case 0: return f_not(random_formula(rng, th, vars, depth - 1));
    case 1: return f_and2(random_formula(rng, th, vars, depth - 1), random_formula(rng, th, vars, depth - 1));
    case 2: return f_or2(random_formula(rng, th, vars, depth - 1), random_formula(rng, th, vars, depth - 1));
    default: return f_implies(random_formula(rng, th, vars, depth - 1), random_formula(rng, th, vars, depth - 1));
  }
}

}  // namespace

TEST_CASE("parse after render is the identity, fuzzed") {
  std::mt19937_64 rng(11);
  std::vector<Var> vars{{"x", Sort::Elem}, {"y", Sort::Elem}, {"z", Sort::Elem}};
  for (TheoryId th : {TheoryId::EQ, TheoryId::DLO, TheoryId::EREL})
    for (int i = 0; i < 500; ++i) {
      auto f = random_formula(rng, th, vars, 3);
      CAPTURE(f->str());
      CHECK(struct_eq(parse(f->str(), th), f));
    }
}

TEST_CASE("substitution composes") {
  std::mt19937_64 rng(12);
  Var x{"x", Sort::Elem}, y{"y", Sort::Elem}, z{"z", Sort::Elem};
  for (int i = 0; i < 300; ++i) {
    auto f = random_formula(rng, TheoryId::EQ, {x, y, z}, 2);
    std::map<Var, Term> sigma{{x, Term::variable(y)}};
    std::map<Var, Term> tau{{y, Term::literal(Elem::eq_nat(5))}};
    std::map<Var, Term> composed{{x, Term::literal(Elem::eq_nat(5))}, {y, Term::literal(Elem::eq_nat(5))}};
    CHECK(struct_eq(substitute(substitute(f, sigma), tau), substitute(f, composed)));
  }
}

TEST_CASE("substituting a ground term removes the variable") {
  // folding can collapse ground subformulas and drop other variables with
  // them, so the free set of the result is contained in fv(f) \ {x}
  std::mt19937_64 rng(13);
  Var x{"x", Sort::Elem}, y{"y", Sort::Elem};
  for (int i = 0; i < 300; ++i) {
    auto f = random_formula(rng, TheoryId::DLO, {x, y}, 2);
    auto g = substitute(f, {{x, Term::literal(Elem::dlo_rat(Rational(9)))}});
    auto fv = free_vars(g);
    auto orig = free_vars(f);
    CAPTURE(f->str());
    CAPTURE(g->str());
    CHECK(!fv.contains(x));
    for (auto& v : fv) CHECK((v != x && orig.contains(v)));
  }
}

TEST_CASE("quantifier-free evaluation") {
  std::map<Var, Elem> env{{{"x", Sort::Elem}, Elem::erel_pair(2, 5)}};
  CHECK(eval_qf(parse("E(x, 2.7)", TheoryId::EREL), env));
  CHECK(!eval_qf(parse("x = 2.7", TheoryId::EREL), env));
  CHECK(eval_qf(parse("cl(x) = @2", TheoryId::EREL), env));
}

TEST_CASE("replace_literal abstracts parameters") {
  Var y{"y", Sort::Elem};
  auto f = parse("x = #3 & !(x = #2)", TheoryId::EQ);
  CHECK(replace_literal(f, Elem::eq_nat(3), y)->str() == "x = y & !x = #2");
}
