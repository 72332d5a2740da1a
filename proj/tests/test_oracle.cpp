#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "thornlab/oracle.hpp"

using namespace thornlab;

namespace {

Elem q(long long n, long long d = 1) { return Elem::dlo_rat(Rational(n, d)); }

Elem random_elem(TheoryId th, std::mt19937_64& rng) {
  switch (th) {
    case TheoryId::EQ: return Elem::eq_nat(rng() % 6);
    case TheoryId::DLO: return q((long long)(rng() % 9) - 4, 1 + rng() % 3);
    case TheoryId::EREL:
      return rng() % 4 == 0 ? Elem::erel_class(rng() % 4)
                            : Elem::erel_pair(rng() % 4, rng() % 4);
  }
  throw std::logic_error("bad theory");
}

std::vector<Elem> random_tuple(TheoryId th, std::mt19937_64& rng, size_t n) {
  std::vector<Elem> out;
  for (size_t i = 0; i < n; ++i) out.push_back(random_elem(th, rng));
  return out;
}

}  // namespace

TEST_CASE("independence characterizations") {
  CHECK(!oracle_indep(TheoryId::EQ, {Elem::eq_nat(0), Elem::eq_nat(1)},
                      {Elem::eq_nat(1), Elem::eq_nat(2)}, {}));
  CHECK(oracle_indep(TheoryId::EQ, {Elem::eq_nat(0)}, {Elem::eq_nat(1)}, {}));
  CHECK(oracle_indep(TheoryId::EQ, {Elem::eq_nat(0)}, {Elem::eq_nat(0)}, {Elem::eq_nat(0)}));

  CHECK(oracle_indep(TheoryId::DLO, {q(0)}, {q(1)}, {}));
  CHECK(!oracle_indep(TheoryId::DLO, {q(0)}, {q(0)}, {}));

  CHECK(!oracle_indep(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {Elem::erel_pair(2, 7)}, {}));
  CHECK(oracle_indep(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {Elem::erel_pair(3, 0)}, {}));
  // with the class already in the base, sharing it costs nothing
  CHECK(oracle_indep(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {Elem::erel_pair(2, 7)},
                     {Elem::erel_class(2)}));
}

TEST_CASE("dimension of DLO definable sets") {
  Var x1{"x1", Sort::Elem}, x2{"x2", Sort::Elem};
  CHECK(oracle_dim(parse("x1 < x2", TheoryId::DLO), {x1, x2}) == 2);
  CHECK(oracle_dim(parse("x1 = x2", TheoryId::DLO), {x1, x2}) == 1);
  CHECK(oracle_dim(parse("x1 = 0 & x2 = 1", TheoryId::DLO), {x1, x2}) == 0);
  CHECK(oracle_dim(parse("x1 = 0 | 0 < x1", TheoryId::DLO), {x1}) == 1);
  CHECK(oracle_dim(parse("exists y. x1 < y & y < x2", TheoryId::DLO), {x1, x2}) == 2);
  CHECK_THROWS_AS(oracle_dim(parse("x1 < x1", TheoryId::DLO), {x1}), std::invalid_argument);
}

TEST_CASE("closed-form foundation ranks") {
  CHECK(oracle_uth(TheoryId::DLO, type_of(TheoryId::DLO, {q(0), q(1)}, {})) == 2);
  CHECK(oracle_uth(TheoryId::EQ, type_of(TheoryId::EQ, {Elem::eq_nat(0), Elem::eq_nat(0)}, {})) == 1);
  CHECK(oracle_uth(TheoryId::EREL,
                   type_of(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {Elem::erel_pair(2, 7)})) == 1);
  CHECK(oracle_uth(TheoryId::EREL, type_of(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {})) == 2);
  CHECK(oracle_uth(TheoryId::EREL, type_of(TheoryId::EREL, {Elem::erel_class(3)}, {})) == 1);
}

TEST_CASE("oracle_indep is symmetric") {
  std::mt19937_64 rng(42);
  for (TheoryId th : {TheoryId::EQ, TheoryId::DLO, TheoryId::EREL})
    for (int i = 0; i < 300; ++i) {
      auto a = random_tuple(th, rng, 1 + rng() % 2);
      auto b = random_tuple(th, rng, 1 + rng() % 2);
      std::set<Elem> base;
      for (size_t j = rng() % 3; j > 0; --j) base.insert(random_elem(th, rng));
      CHECK(oracle_indep(th, a, b, base) == oracle_indep(th, b, a, base));
    }
}

TEST_CASE("dimension is monotone under implication") {
  std::mt19937_64 rng(7);
  Var x1{"x1", Sort::Elem}, x2{"x2", Sort::Elem};
  const char* shapes[] = {"x1 < x2", "x2 < x1", "x1 = x2", "x1 = 0", "x2 < 1", "0 < x1 & x1 < 1"};
  for (int i = 0; i < 100; ++i) {
    FormulaPtr g = parse(shapes[rng() % 6], TheoryId::DLO);
    FormulaPtr h = parse(shapes[rng() % 6], TheoryId::DLO);
    FormulaPtr f = f_and2(g, h);  // f implies g
    if (!satisfiable(TheoryId::DLO, f)) continue;
    CHECK(oracle_dim(f, {x1, x2}) <= oracle_dim(g, {x1, x2}));
  }
}

TEST_CASE("closed-form rank is additive") {
  std::mt19937_64 rng(11);
  for (TheoryId th : {TheoryId::EQ, TheoryId::DLO, TheoryId::EREL})
    for (int i = 0; i < 200; ++i) {
      auto a = random_tuple(th, rng, 1);
      auto b = random_tuple(th, rng, 1 + rng() % 2);
      std::set<Elem> base;
      std::vector<Elem> ab = a;
      ab.insert(ab.end(), b.begin(), b.end());
      std::set<Elem> baseb(b.begin(), b.end());
      int left = oracle_uth(th, type_of(th, a, baseb)) + oracle_uth(th, type_of(th, b, base));
      CHECK(left == oracle_uth(th, type_of(th, ab, base)));
    }
}
