#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thornlab/rank.hpp"

using namespace thornlab;

namespace {

const Var x{"x", Sort::Elem};
const Var y{"y", Sort::Elem};
const SearchBudget budget{};

RankParams one_var_params(TheoryId theory, int k = 2) {
  return {{parse("x = y", theory)}, {f_true()}, {x}, {y}, {}, k};
}

Elem q(long long n, long long d = 1) { return Elem::dlo_rat(Rational(n, d)); }

}  // namespace

TEST_CASE("local rank of the trivial formula counts nested singleton splits") {
  auto [v, tree] = local_rank(TheoryId::EQ, parse("x = x", TheoryId::EQ), {}, one_var_params(TheoryId::EQ));
  CHECK(v.kind == RankValue::Kind::Finite);
  CHECK(v.value == 1);
  CHECK(verify_rank_tree(TheoryId::EQ, tree, one_var_params(TheoryId::EQ)));
}

TEST_CASE("local rank in two variables") {
  Var x1{"x1", Sort::Elem}, x2{"x2", Sort::Elem};
  RankParams p{{parse("x1 = y", TheoryId::DLO), parse("x2 = y", TheoryId::DLO)},
               {f_true()},
               {x1, x2},
               {y},
               {},
               2};
  auto [v, tree] = local_rank(TheoryId::DLO, f_true(), {}, p);
  CHECK(v.kind == RankValue::Kind::Finite);
  CHECK(v.value == 2);
  CHECK(verify_rank_tree(TheoryId::DLO, tree, p));
}

TEST_CASE("algebraic formulas have rank zero, inconsistent minus infinity") {
  auto [v, t1] = local_rank(TheoryId::EQ, parse("x = #0", TheoryId::EQ), {}, one_var_params(TheoryId::EQ));
  CHECK(v.kind == RankValue::Kind::Finite);
  CHECK(v.value == 0);

  auto [w, t2] = local_rank(TheoryId::EQ, parse("x = #0 & x = #1", TheoryId::EQ), {},
                            one_var_params(TheoryId::EQ));
  CHECK(w.kind == RankValue::Kind::MinusInfinity);
  CHECK(w.as_int() == -1);
}

TEST_CASE("rank additivity over disjunction") {
  RankParams p = one_var_params(TheoryId::DLO);
  auto a = local_rank(TheoryId::DLO, parse("x = 0", TheoryId::DLO), {}, p).first;
  auto b = local_rank(TheoryId::DLO, parse("0 < x", TheoryId::DLO), {}, p).first;
  auto c = local_rank(TheoryId::DLO, parse("x = 0 | 0 < x", TheoryId::DLO), {}, p).first;
  CHECK(c.value == std::max(a.value, b.value));
}

TEST_CASE("uth rank values") {
  CHECK(uth_rank(TheoryId::DLO, type_of(TheoryId::DLO, {q(0), q(1)}, {}), budget).value == 2);
  CHECK(uth_rank(TheoryId::EQ, type_of(TheoryId::EQ, {Elem::eq_nat(0)}, {}), budget).value == 1);
  CHECK(uth_rank(TheoryId::EREL, type_of(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {}), budget).value == 2);

  // algebraic types admit no forking extensions
  CHECK(uth_rank(TheoryId::EQ, type_of(TheoryId::EQ, {Elem::eq_nat(0)}, {Elem::eq_nat(0)}), budget)
            .value == 0);

  UthValue v = uth_rank(TheoryId::DLO, type_of(TheoryId::DLO, {q(0), q(1)}, {}), budget);
  CHECK(verify_uth_chain(TheoryId::DLO, type_of(TheoryId::DLO, {q(0), q(1)}, {}), v));
}

TEST_CASE("starred rank agrees with uth") {
  CHECK(uth_star_rank(TheoryId::EQ, type_of(TheoryId::EQ, {Elem::eq_nat(0)}, {}), budget).value == 1);
  CHECK(uth_star_rank(TheoryId::DLO, type_of(TheoryId::DLO, {q(0)}, {}), budget).value == 1);
  CHECK(uth_star_rank(TheoryId::EREL, type_of(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {}), budget)
            .value == 2);
  CHECK(uth_star_rank(TheoryId::DLO, type_of(TheoryId::DLO, {q(0), q(1)}, {}), budget).value == 2);
}

TEST_CASE("Lascar inequalities") {
  LascarResult r = lascar_check(TheoryId::DLO, {q(0)}, {q(1)}, {}, budget);
  CHECK(r.lhs == 2);
  CHECK(r.mid == 2);
  CHECK(r.rhs == 2);
  CHECK(r.holds);

  LascarResult s = lascar_check(TheoryId::EQ, {Elem::eq_nat(0)}, {Elem::eq_nat(0)}, {}, budget);
  CHECK(s.lhs == 1);  // 0 + 1: the left tuple is algebraic over the right
  CHECK(s.mid == 1);
  CHECK(s.holds);

  LascarResult t = lascar_check(TheoryId::EREL, {Elem::erel_pair(2, 5)}, {Elem::erel_pair(2, 7)}, {},
                                budget);
  CHECK(t.lhs == 3);  // 1 + 2: only the element remains free once b fixes the class
  CHECK(t.mid == 3);
  CHECK(t.holds);
}
