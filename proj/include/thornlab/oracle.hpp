#ifndef THORNLAB_ORACLE_HPP
#define THORNLAB_ORACLE_HPP

#include "thornlab/theory.hpp"

namespace thornlab {

// Closed-form ground truth used to cross-check every search verdict.
// Deliberately built only on the formula/theory layers: nothing here calls
// into the dividing, forking or rank searches.

// Independence of tuples a, b over a finite base, per theory:
//   EQ   acl-disjointness: shared fresh values force dependence
//   DLO  dimension preservation: dim(a / base ∪ b) = dim(a / base)
//   EREL u-rank preservation, computed from the per-coordinate closed form
bool oracle_indep(TheoryId theory, const std::vector<Elem>& a, const std::vector<Elem>& b,
                  const std::set<Elem>& base);

// Name of the characterization oracle_indep applies for the theory.
std::string oracle_indep_rule(TheoryId theory);

// Topological dimension of the solution set of a DLO formula: maximum over
// the cells of a normal form of the number of coordinates not forced equal
// to a constant.  Throws on inconsistent input.
int oracle_dim(const FormulaPtr& f, const std::vector<Var>& vars);

// Closed-form foundation rank of a complete type.
int oracle_uth(TheoryId theory, const TypeDesc& t);

}  // namespace thornlab

#endif
