#ifndef THORNLAB_VERIFY_HPP
#define THORNLAB_VERIFY_HPP

#include <cstdint>
#include <random>

#include "thornlab/oracle.hpp"
#include "thornlab/rank.hpp"

namespace thornlab {

struct SuiteResult {
  std::string name;
  int pass = 0, fail = 0;
  std::string counterexample;  // first failing instance, rendered
};

// Names accepted by run_suite, in canonical order.
const std::vector<std::string>& suite_names();

// Runs `count` seeded instances of the named property suite; instance i is
// generated from (seed, i) only, so results are independent of jobs.
SuiteResult run_suite(const std::string& name, uint64_t seed, int count, int jobs,
                      const SearchBudget& budget);

// Seeded generators shared by the suites and the acceptance harness.
Elem random_elem(TheoryId theory, std::mt19937_64& rng);
std::vector<Elem> random_tuple(TheoryId theory, std::mt19937_64& rng, size_t n);
std::set<Elem> random_base(TheoryId theory, std::mt19937_64& rng, size_t max_n);
FormulaPtr random_qf(TheoryId theory, std::mt19937_64& rng, const std::vector<Var>& vars,
                     int depth);
FormulaPtr random_sentence(TheoryId theory, std::mt19937_64& rng, int nvars, int depth);

// Atomic splitting formulas delta(x; y) per theory, used by the rank suites.
std::vector<FormulaPtr> atomic_deltas(TheoryId theory, const Var& x, const Var& y);

}  // namespace thornlab

#endif
