#ifndef THORNLAB_RANK_HPP
#define THORNLAB_RANK_HPP

#include <memory>

#include "thornlab/forking.hpp"

namespace thornlab {

// Parameters of the local rank: delta formulas split the object variables
// x, pi formulas constrain the splitting parameters y with outer parameters
// z, and k is the inconsistency width.
struct RankParams {
  std::vector<FormulaPtr> delta;  // formulas over xvars ∪ yvars
  std::vector<FormulaPtr> pi;     // formulas over yvars ∪ zvars
  std::vector<Var> xvars, yvars, zvars;
  int k = 2;
};

struct RankValue {
  enum class Kind { MinusInfinity, Finite, AtLeast };
  Kind kind = Kind::Finite;
  int value = 0;  // -1 rendered for MinusInfinity in reports
  int as_int() const { return kind == Kind::MinusInfinity ? -1 : value; }
};

// One splitting level: the chosen delta/pi pair, outer parameters c, the
// non-algebraic parameter type q over base ∪ c, and its realization a.
struct RankStep {
  size_t delta_idx = 0, pi_idx = 0;
  std::vector<Elem> c;
  TypeDesc q;
  std::vector<Elem> a;
};

// Witness chain for a Finite(n) value: n nested steps, each level's family
// k-inconsistent, every branch conjunction consistent.
struct RankTree {
  FormulaPtr phi;
  std::set<Elem> base;
  std::optional<RankStep> step;
  std::shared_ptr<RankTree> child;
};

// The local rank of phi (object variables params.xvars) over base.
std::pair<RankValue, RankTree> local_rank(TheoryId theory, const FormulaPtr& phi,
                                          const std::set<Elem>& base, const RankParams& params,
                                          int cap = 6);

// One link of a U-rank chain: the forking extension q and its evidence.
struct UthLink {
  TypeDesc q;
  std::set<Elem> over;  // the base q forks over
  ForkCert cert;
};

struct UthValue {
  int value = 0;
  bool capped = false;  // search stopped at the cap; value is a lower bound
  std::vector<UthLink> chain;  // length == value
};

// Foundation rank of thorn-forking: longest chain of forking extensions,
// searched over witness-pool parameter tuples.  cap 0 selects 2*arity + 1.
UthValue uth_rank(TheoryId theory, const TypeDesc& t, const SearchBudget& budget = {},
                  int cap = 0);

// The variant rank whose successor step asks for a k-wise union of
// conjugate extensions to fork; equals uth_rank on complete types.
UthValue uth_star_rank(TheoryId theory, const TypeDesc& t, const SearchBudget& budget = {},
                       int cap = 0);

struct LascarResult {
  int lhs = 0;  // uth(a / base ∪ b) + uth(b / base)
  int mid = 0;  // uth(ab / base)
  int rhs = 0;  // natural sum; coincides with + at the finite values here
  bool holds = false;
};

LascarResult lascar_check(TheoryId theory, const std::vector<Elem>& a,
                          const std::vector<Elem>& b, const std::set<Elem>& base,
                          const SearchBudget& budget = {});

bool verify_rank_tree(TheoryId theory, const RankTree& tree, const RankParams& params);
bool verify_uth_chain(TheoryId theory, const TypeDesc& t, const UthValue& v);

void clear_rank_cache();

}  // namespace thornlab

#endif
