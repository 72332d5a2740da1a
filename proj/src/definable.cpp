#include "thornlab/definable.hpp"

#include <mutex>
#include <unordered_map>

namespace thornlab {

namespace {

std::vector<Var> indexed_copy(const std::vector<Var>& vars, int i) {
  std::vector<Var> out;
  for (auto& v : vars) out.push_back({v.name + "_" + std::to_string(i), v.sort});
  return out;
}

std::map<Var, Term> rename_binding(const std::vector<Var>& from, const std::vector<Var>& to) {
  std::map<Var, Term> bind;
  for (size_t i = 0; i < from.size(); ++i) bind[from[i]] = Term::variable(to[i]);
  return bind;
}

std::map<Var, Term> tuple_binding(const std::vector<Var>& vars, const std::vector<Elem>& vals) {
  std::map<Var, Term> bind;
  for (size_t i = 0; i < vars.size(); ++i) bind[vars[i]] = Term::literal(vals[i]);
  return bind;
}

// y_i != y_j for tuples: some coordinate differs
FormulaPtr tuples_differ(const std::vector<Var>& a, const std::vector<Var>& b) {
  std::vector<FormulaPtr> parts;
  for (size_t t = 0; t < a.size(); ++t)
    parts.push_back(f_not(f_eq(Term::variable(a[t]), Term::variable(b[t]))));
  return f_or(std::move(parts));
}

std::mutex kmutex;
std::unordered_map<std::string, bool> kcache;

bool models_pi(const Family& fam, const std::vector<Elem>& tup) {
  FormulaPtr inst = substitute(fam.pi, tuple_binding(fam.yvars, tup));
  return is_quantifier_free(inst) ? decide(fam.theory, inst) : decide(fam.theory, qe(fam.theory, inst));
}

// Tries to exhibit k distinct realizations of pi whose instances share a
// solution; a success certifies "not k-inconsistent" without the sentence.
bool jointly_consistent_k(const Family& fam, int k) {
  auto inst_of = [&](const std::vector<Elem>& t) {
    return substitute(fam.delta, tuple_binding(fam.yvars, t));
  };
  auto greedy = [&](const std::vector<std::vector<Elem>>& cands) {
    for (size_t start = 0; start < cands.size(); ++start) {
      std::vector<FormulaPtr> cur;
      for (size_t i = start; i < cands.size() && (int)cur.size() < k; ++i) {
        std::vector<FormulaPtr> trial = cur;
        trial.push_back(inst_of(cands[i]));
        if (decide(fam.theory, exists_closure(f_and(trial), fam.xvars))) cur = std::move(trial);
      }
      if ((int)cur.size() >= k) return true;
    }
    return false;
  };

  std::vector<std::vector<Elem>> samples = sample_distinct(fam.theory, fam.pi, fam.yvars, k);
  std::set<Elem> seeds = literals_of(fam.pi);
  size_t last = 0;
  for (int depth = 2; depth <= 5; ++depth) {
    std::vector<Elem> pool = witness_pool(fam.theory, seeds, depth);
    std::vector<std::vector<Elem>> tuples{{}};
    for (auto& yv : fam.yvars) {
      std::vector<std::vector<Elem>> next;
      for (auto& t : tuples)
        for (auto& e : pool)
          if (e.sort == yv.sort) {
            next.push_back(t);
            next.back().push_back(e);
          }
      tuples = std::move(next);
      if (tuples.size() > 4096) return greedy(samples);  // give up on assembly
    }
    std::vector<std::vector<Elem>> cands = samples;
    std::set<std::string> seen;
    for (auto& c : cands) seen.insert(render_tuple(c));
    for (auto& t : tuples) {
      if (cands.size() >= 128) break;
      if (!seen.insert(render_tuple(t)).second) continue;
      if (models_pi(fam, t)) cands.push_back(t);
    }
    if (greedy(cands)) return true;
    if (cands.size() == last || cands.size() >= 128) break;  // deepening stopped helping
    last = cands.size();
  }
  return false;
}

}  // namespace

void clear_inconsistency_cache() {
  std::lock_guard lock(kmutex);
  kcache.clear();
}

bool k_inconsistent(const Family& fam, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::string key = theory_name(fam.theory) + "|" + std::to_string(k) + "|" +
                    sort_sig(fam.delta) + fam.delta->str() + "|" + sort_sig(fam.pi) +
                    fam.pi->str();
  {
    std::lock_guard lock(kmutex);
    if (auto it = kcache.find(key); it != kcache.end()) return it->second;
  }

  auto record = [&](bool val) {
    std::lock_guard lock(kmutex);
    kcache.emplace(key, val);
    return val;
  };

  if (jointly_consistent_k(fam, k)) return record(false);

  // exact sentence: exists y_1..y_k pairwise distinct, all |= pi, with a
  // common solution of delta
  std::vector<FormulaPtr> parts;
  std::vector<std::vector<Var>> copies;
  std::vector<Var> all;
  for (int i = 1; i <= k; ++i) {
    copies.push_back(indexed_copy(fam.yvars, i));
    for (auto& v : copies.back()) all.push_back(v);
    parts.push_back(substitute(fam.pi, rename_binding(fam.yvars, copies.back())));
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) parts.push_back(tuples_differ(copies[i], copies[j]));
  std::vector<FormulaPtr> insts;
  for (int i = 0; i < k; ++i) insts.push_back(substitute(fam.delta, rename_binding(fam.yvars, copies[i])));
  parts.push_back(exists_closure(f_and(std::move(insts)), fam.xvars));
  FormulaPtr sentence = exists_closure(f_and(std::move(parts)), all);
  return record(!decide(fam.theory, sentence));
}

std::optional<int> min_inconsistency_k(const Family& fam, int k_max) {
  // k_max jointly consistent realizations rule out every k at once
  if (jointly_consistent_k(fam, k_max)) return std::nullopt;
  for (int k = 2; k <= k_max; ++k)
    if (k_inconsistent(fam, k)) return k;
  return std::nullopt;
}

bool is_algebraic(TheoryId theory, const std::vector<Elem>& a, const std::set<Elem>& base) {
  TypeDesc t = type_of(theory, a, base);
  return !solution_count(theory, t.iso, t.vars).infinite;
}

Family family_of_conjugates(TheoryId theory, const FormulaPtr& delta,
                            const std::vector<Var>& xvars, const std::vector<Var>& yvars,
                            const std::vector<Elem>& a, const std::set<Elem>& base) {
  if (a.size() != yvars.size()) throw std::invalid_argument("parameter tuple length mismatch");
  TypeDesc t = type_of(theory, a, base);
  FormulaPtr pi = substitute(t.iso, rename_binding(t.vars, yvars));
  return {theory, delta, xvars, yvars, pi};
}

}  // namespace thornlab
