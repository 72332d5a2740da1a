#ifndef THORNLAB_FORKING_HPP
#define THORNLAB_FORKING_HPP

#include "thornlab/definable.hpp"

namespace thornlab {

enum class Verdict { Yes, No, Unknown };

std::string verdict_name(Verdict v);

struct SearchBudget {
  int witness_len = 2;  // max length of the extra tuple c
  int n_max = 4;        // max disjuncts in a forking cover
  int pool_depth = 1;   // fresh-realization iterations for the witness pool
  int k_max = 6;        // inconsistency search range
  bool strict = false;  // report Unknown instead of No on pool exhaustion
};

// Evidence that delta(x, a) strongly divides over family.base: the family of
// conjugates over tp(a / base ∪ witness) is k-inconsistent and non-algebraic.
struct DivideCert {
  FormulaPtr delta;
  std::vector<Var> xvars, yvars;
  std::vector<Elem> params;   // a
  std::set<Elem> base;        // A
  std::vector<Elem> witness;  // c
  Family family;              // conjugates of a over base ∪ witness
  int k = 0;
};

// One disjunct of a forking cover: a concrete instance and its division.
struct ForkDisjunct {
  FormulaPtr instance;
  DivideCert cert;
};

struct ForkCert {
  std::vector<ForkDisjunct> disjuncts;
  FormulaPtr implication;  // closed: forall x (phi -> disjunction)
};

struct Decision {
  Verdict verdict = Verdict::Unknown;
  std::optional<DivideCert> divide;
  std::optional<ForkCert> fork;
  std::string note;
};

// Whether delta(x, a) strongly divides over base; second component is the
// least inconsistency k <= k_max when it does.
std::pair<bool, std::optional<int>> strongly_divides(TheoryId theory, const FormulaPtr& delta,
                                                     const std::vector<Var>& xvars,
                                                     const std::vector<Var>& yvars,
                                                     const std::vector<Elem>& a,
                                                     const std::set<Elem>& base, int k_max = 6);

Decision thorn_divides(TheoryId theory, const FormulaPtr& delta,
                       const std::vector<Var>& xvars, const std::vector<Var>& yvars,
                       const std::vector<Elem>& a, const std::set<Elem>& base,
                       const SearchBudget& budget);

// Whether phi (object variables xvars, parameters embedded) implies a finite
// disjunction of instances dividing over base.  Throws on inconsistent phi.
Decision thorn_forks(TheoryId theory, const FormulaPtr& phi, const std::vector<Var>& xvars,
                     const std::set<Elem>& base, const SearchBudget& budget);

// Yes = a independent from b over base; dependence carries the ForkCert.
Decision thorn_indep(TheoryId theory, const std::vector<Elem>& a, const std::vector<Elem>& b,
                     const std::set<Elem>& base, const SearchBudget& budget);

// Realizations of a non-algebraic type forming a base-indiscernible,
// independent sequence; verified before returning, throws on failure.
std::vector<std::vector<Elem>> morley_sequence(TheoryId theory, const TypeDesc& t, int length,
                                               const SearchBudget& budget);

// Independent re-checks used before certificates are returned and by the
// CLI recheck command.
bool verify_divide(TheoryId theory, const DivideCert& cert);
bool verify_fork(TheoryId theory, const FormulaPtr& phi, const std::vector<Var>& xvars,
                 const ForkCert& cert);

// Replaces each distinct element literal of inst by a fresh parameter
// variable; returns the abstracted formula with the variables and values.
struct Abstraction {
  FormulaPtr delta;
  std::vector<Var> yvars;
  std::vector<Elem> params;
};
Abstraction abstract_params(const FormulaPtr& inst, const std::string& prefix = "p");

void clear_forking_cache();

}  // namespace thornlab

#endif
