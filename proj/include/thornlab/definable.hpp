#ifndef THORNLAB_DEFINABLE_HPP
#define THORNLAB_DEFINABLE_HPP

#include "thornlab/theory.hpp"

namespace thornlab {

// A definable family {delta(x, a)}_{a |= pi}: delta has designated object
// variables x and parameter variables y, pi constrains the parameters.
struct Family {
  TheoryId theory = TheoryId::EQ;
  FormulaPtr delta;
  std::vector<Var> xvars, yvars;
  FormulaPtr pi;
};

// True iff every k pairwise-distinct parameter tuples satisfying pi give
// jointly inconsistent instances.  Decided exactly by one closed sentence;
// a sampling fast path answers the common "no" quickly.
bool k_inconsistent(const Family& fam, int k);

// Least k in 2..k_max with k_inconsistent, if any.
std::optional<int> min_inconsistency_k(const Family& fam, int k_max);

void clear_inconsistency_cache();

// Whether tp(a/base) has only finitely many realizations.
bool is_algebraic(TheoryId theory, const std::vector<Elem>& a, const std::set<Elem>& base);

// The family {delta(x, a')}_{a' |= tp(a/base)}.
Family family_of_conjugates(TheoryId theory, const FormulaPtr& delta,
                            const std::vector<Var>& xvars, const std::vector<Var>& yvars,
                            const std::vector<Elem>& a, const std::set<Elem>& base);

}  // namespace thornlab

#endif
