#ifndef THORNLAB_THEORY_HPP
#define THORNLAB_THEORY_HPP

#include <optional>
#include <set>
#include <vector>

#include "thornlab/formula.hpp"

namespace thornlab {

// Exact finiteness verdict for a definable set.
struct SolutionCount {
  bool infinite = false;
  std::vector<std::vector<Elem>> witnesses;  // exhaustive when finite
  size_t size() const { return witnesses.size(); }
};

// A complete type over a finite parameter set, carried by an isolating
// quantifier-free formula.  All three backends have principal types over
// finite sets, so this loses nothing.
struct TypeDesc {
  TheoryId theory = TheoryId::EQ;
  std::vector<Var> vars;
  std::set<Elem> base;
  FormulaPtr iso;
  bool non_algebraic = false;
};

// Quantifier elimination relative to the theory's canonical model.
FormulaPtr qe(TheoryId theory, const FormulaPtr& f);

// Truth in the canonical model by direct semantic evaluation: quantifiers
// range over a finite set of region representatives read off the formula.
// Deliberately shares no code with qe so the two can check each other.
bool holds(TheoryId theory, const FormulaPtr& closed);

// Truth via qe + ground evaluation; memoized.  The workhorse for searches.
bool decide(TheoryId theory, const FormulaPtr& closed);
bool satisfiable(TheoryId theory, const FormulaPtr& f);
void clear_decision_cache();

// Positive-form disjunctive normal form of a quantifier-free formula.
// DLO conjuncts contain only =, < literals; EQ/EREL may contain negated
// equalities.  Used by qe, solution_count and the dimension oracle.
std::vector<std::vector<FormulaPtr>> positive_dnf(TheoryId theory, const FormulaPtr& qf);

SolutionCount solution_count(TheoryId theory, const FormulaPtr& f, const std::vector<Var>& vars);

// Finite, exhaustive, pairwise-inconsistent list of complete types of vars
// over base.
std::vector<TypeDesc> enumerate_types(TheoryId theory, const std::vector<Var>& vars, const std::set<Elem>& base);

// Deterministic canonical realization disjoint from avoid (for fresh
// coordinates; pinned coordinates follow their pins).
// Fresh rules: EQ least unused natural; DLO midpoint of the leftmost free
// gap (endpoint +-1 at infinite ends); EREL least fresh class then least
// fresh member.
std::vector<Elem> realize_type(TheoryId theory, const TypeDesc& t, const std::set<Elem>& avoid);

// The complete type of a concrete tuple over a finite base.
TypeDesc type_of(TheoryId theory, const std::vector<Elem>& tuple, const std::set<Elem>& base);

// Up to n distinct tuples satisfying pi (free vars = yvars), generated from
// non-algebraic completions via realize_type with growing avoid sets.
std::vector<std::vector<Elem>> sample_distinct(TheoryId theory, const FormulaPtr& pi,
                                               const std::vector<Var>& yvars, size_t n);

// Algebraic closure of a finite set.  Identity in EQ and DLO; EREL adds the
// class of every element member.
std::set<Elem> acl(TheoryId theory, const std::set<Elem>& base);

// Seed elements extended, per depth level, with one fresh realization of
// every non-algebraic 1-type (each sort) over the current pool.
std::vector<Elem> witness_pool(TheoryId theory, const std::set<Elem>& seeds, int depth);

std::vector<Sort> theory_sorts(TheoryId theory);

// Existential closure over the given variables.
FormulaPtr exists_closure(const FormulaPtr& f, const std::vector<Var>& vars);
FormulaPtr forall_closure(const FormulaPtr& f, const std::vector<Var>& vars);

std::string render_tuple(const std::vector<Elem>& tuple);
std::string render_elem_set(const std::set<Elem>& s);

}  // namespace thornlab

#endif
