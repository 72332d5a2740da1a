#include "thornlab/forking.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace thornlab {

namespace {

std::map<Var, Term> tuple_binding(const std::vector<Var>& vars, const std::vector<Elem>& vals) {
  std::map<Var, Term> bind;
  for (size_t i = 0; i < vars.size(); ++i) bind[vars[i]] = Term::literal(vals[i]);
  return bind;
}

std::vector<Elem> concat(const std::vector<Elem>& a, const std::vector<Elem>& b) {
  std::vector<Elem> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::string budget_sig(const SearchBudget& b) {
  return std::to_string(b.witness_len) + "," + std::to_string(b.n_max) + "," +
         std::to_string(b.pool_depth) + "," + std::to_string(b.k_max) + "," +
         (b.strict ? "s" : "n");
}

std::mutex fork_mutex;
std::unordered_map<std::string, Decision> divide_cache;
std::unordered_map<std::string, Decision> fork_cache;

// deterministic k-subset enumeration in lexicographic index order
bool next_combination(std::vector<size_t>& idx, size_t n) {
  size_t k = idx.size();
  for (size_t i = k; i-- > 0;) {
    if (idx[i] + (k - i) < n) {
      ++idx[i];
      for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

void clear_forking_cache() {
  std::lock_guard lock(fork_mutex);
  divide_cache.clear();
  fork_cache.clear();
}

Abstraction abstract_params(const FormulaPtr& inst, const std::string& prefix) {
  Abstraction out;
  out.delta = inst;
  int n = 0;
  for (const Elem& e : literals_of(inst)) {
    Var v{prefix + std::to_string(++n), e.sort};
    out.delta = replace_literal(out.delta, e, v);
    out.yvars.push_back(v);
    out.params.push_back(e);
  }
  return out;
}

std::pair<bool, std::optional<int>> strongly_divides(TheoryId theory, const FormulaPtr& delta,
                                                     const std::vector<Var>& xvars,
                                                     const std::vector<Var>& yvars,
                                                     const std::vector<Elem>& a,
                                                     const std::set<Elem>& base, int k_max) {
  if (a.empty()) return {false, std::nullopt};  // no parameters to conjugate
  if (is_algebraic(theory, a, base)) return {false, std::nullopt};
  Family fam = family_of_conjugates(theory, delta, xvars, yvars, a, base);
  auto k = min_inconsistency_k(fam, k_max);
  return {k.has_value(), k};
}

bool verify_divide(TheoryId theory, const DivideCert& cert) {
  if (!k_inconsistent(cert.family, cert.k)) return false;
  return solution_count(theory, cert.family.pi, cert.family.yvars).infinite;
}

Decision thorn_divides(TheoryId theory, const FormulaPtr& delta,
                       const std::vector<Var>& xvars, const std::vector<Var>& yvars,
                       const std::vector<Elem>& a, const std::set<Elem>& base,
                       const SearchBudget& budget) {
  std::string key = theory_name(theory) + "|" + sort_sig(delta) + delta->str() + "|" +
                    render_tuple(a) + "|" + render_elem_set(base) + "|" + budget_sig(budget);
  {
    std::lock_guard lock(fork_mutex);
    if (auto it = divide_cache.find(key); it != divide_cache.end()) return it->second;
  }
  auto record = [&](Decision d) {
    std::lock_guard lock(fork_mutex);
    divide_cache.emplace(key, d);
    return d;
  };

  std::set<Elem> seeds = base;
  for (auto& e : a) seeds.insert(e);
  for (auto& e : literals_of(delta)) seeds.insert(e);
  std::vector<Elem> pool;
  for (auto& e : witness_pool(theory, seeds, budget.pool_depth))
    if (!base.contains(e)) pool.push_back(e);

  std::set<std::string> seen;  // joint types of (a, c) over base already tried
  for (int len = 0; len <= budget.witness_len; ++len) {
    if ((size_t)len > pool.size()) break;
    std::vector<size_t> idx(len);
    for (int i = 0; i < len; ++i) idx[i] = i;
    bool more = true;
    while (more) {
      std::vector<Elem> c;
      for (size_t i : idx) c.push_back(pool[i]);
      if (!seen.insert(type_of(theory, concat(a, c), base).iso->str()).second) {
        more = len > 0 && next_combination(idx, pool.size());
        continue;
      }
      std::set<Elem> ext = base;
      ext.insert(c.begin(), c.end());
      auto [ok, k] = strongly_divides(theory, delta, xvars, yvars, a, ext, budget.k_max);
      if (ok) {
        DivideCert cert{delta, xvars, yvars, a, base, c,
                        family_of_conjugates(theory, delta, xvars, yvars, a, ext), *k};
        if (!verify_divide(theory, cert)) throw std::logic_error("division certificate failed re-check");
        return record({Verdict::Yes, cert, std::nullopt, ""});
      }
      more = len > 0 && next_combination(idx, pool.size());
    }
  }
  if (budget.strict)
    return record({Verdict::Unknown, std::nullopt, std::nullopt, "witness pool exhausted"});
  return record({Verdict::No, std::nullopt, std::nullopt, "witness pool exhausted"});
}

namespace {

void collect_subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  out.push_back(f);
  for (auto& k : f->kids) collect_subformulas(k, out);
}

// candidate shapes: parameter-abstracted subformulas of phi plus atomic
// signature formulas on each object variable
std::vector<std::pair<FormulaPtr, std::vector<Var>>> candidate_shapes(
    TheoryId theory, const FormulaPtr& phi, const std::vector<Var>& xvars) {
  std::vector<std::pair<FormulaPtr, std::vector<Var>>> shapes;
  std::set<std::string> seen;
  auto add = [&](FormulaPtr s, std::vector<Var> ys) {
    if (ys.empty() || ys.size() > 2) return;
    if (seen.insert(s->str()).second) shapes.emplace_back(std::move(s), std::move(ys));
  };
  std::vector<FormulaPtr> subs;
  collect_subformulas(phi, subs);
  for (auto& s : subs) {
    Abstraction abs = abstract_params(s, "q");
    add(abs.delta, abs.yvars);
  }
  Var y{"q1", Sort::Elem};
  Var c{"q1", Sort::Class};
  for (auto& u : xvars) {
    Term x = Term::variable(u);
    if (u.sort == Sort::Class) {
      add(f_eq(x, Term::variable(c)), {c});
      continue;
    }
    add(f_eq(x, Term::variable(y)), {y});
    if (theory == TheoryId::DLO) {
      add(f_less(x, Term::variable(y)), {y});
      add(f_less(Term::variable(y), x), {y});
    }
    if (theory == TheoryId::EREL) add(f_eq(Term::cl_of(x), Term::variable(c)), {c});
  }
  std::sort(shapes.begin(), shapes.end(),
            [](const auto& a, const auto& b) { return a.first->str() < b.first->str(); });
  return shapes;
}

}  // namespace

bool verify_fork(TheoryId theory, const FormulaPtr& phi, const std::vector<Var>& xvars,
                 const ForkCert& cert) {
  if (cert.disjuncts.empty()) return false;
  std::vector<FormulaPtr> parts;
  for (auto& d : cert.disjuncts) {
    if (!verify_divide(theory, d.cert)) return false;
    parts.push_back(d.instance);
  }
  FormulaPtr impl = forall_closure(f_implies(phi, f_or(std::move(parts))), xvars);
  if (!struct_eq(impl, cert.implication)) return false;
  return decide(theory, cert.implication);
}

Decision thorn_forks(TheoryId theory, const FormulaPtr& phi, const std::vector<Var>& xvars,
                     const std::set<Elem>& base, const SearchBudget& budget) {
  if (!satisfiable(theory, phi)) throw std::invalid_argument("inconsistent formula");
  std::string key = theory_name(theory) + "|" + sort_sig(phi) + phi->str() + "|" +
                    render_elem_set(base) + "|" + budget_sig(budget);
  {
    std::lock_guard lock(fork_mutex);
    if (auto it = fork_cache.find(key); it != fork_cache.end()) return it->second;
  }
  auto record = [&](Decision d) {
    std::lock_guard lock(fork_mutex);
    fork_cache.emplace(key, d);
    return d;
  };
  Verdict fail = budget.strict ? Verdict::Unknown : Verdict::No;

  std::set<Elem> seeds = base;
  for (auto& e : literals_of(phi)) seeds.insert(e);
  std::vector<Elem> pool = witness_pool(theory, seeds, budget.pool_depth);

  // concrete candidate instances consistent with phi
  std::vector<FormulaPtr> candidates;
  std::set<std::string> seen;
  for (auto& [shape, yvars] : candidate_shapes(theory, phi, xvars)) {
    std::vector<std::vector<Elem>> tuples{{}};
    for (auto& yv : yvars) {
      std::vector<std::vector<Elem>> next;
      for (auto& t : tuples)
        for (auto& e : pool)
          if (e.sort == yv.sort) next.push_back(concat(t, {e}));
      tuples = std::move(next);
    }
    for (auto& t : tuples) {
      FormulaPtr inst = substitute(shape, tuple_binding(yvars, t));
      if (inst->kind == Formula::Kind::True || inst->kind == Formula::Kind::False) continue;
      if (!seen.insert(inst->str()).second) continue;
      if (!satisfiable(theory, f_and2(phi, inst))) continue;
      candidates.push_back(inst);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const FormulaPtr& a, const FormulaPtr& b) { return a->str() < b->str(); });

  // keep those that divide over base
  std::vector<ForkDisjunct> dividing;
  for (auto& inst : candidates) {
    Abstraction abs = abstract_params(inst, "p");
    if (abs.yvars.empty()) continue;
    Decision d = thorn_divides(theory, abs.delta, xvars, abs.yvars, abs.params, base, budget);
    if (d.verdict == Verdict::Yes) dividing.push_back({inst, *d.divide});
  }
  if (dividing.empty()) return record({fail, std::nullopt, std::nullopt, "no dividing candidate"});

  auto implication_holds = [&](const std::vector<ForkDisjunct>& ds) {
    std::vector<FormulaPtr> parts;
    for (auto& d : ds) parts.push_back(d.instance);
    return decide(theory, forall_closure(f_implies(phi, f_or(std::move(parts))), xvars));
  };
  if (!implication_holds(dividing))
    return record({fail, std::nullopt, std::nullopt, "dividing candidates do not cover"});

  size_t n_max = std::min<size_t>(budget.n_max, dividing.size());
  for (size_t len = 1; len <= n_max; ++len) {
    std::vector<size_t> idx(len);
    for (size_t i = 0; i < len; ++i) idx[i] = i;
    do {
      std::vector<ForkDisjunct> sel;
      for (size_t i : idx) sel.push_back(dividing[i]);
      if (implication_holds(sel)) {
        std::vector<FormulaPtr> parts;
        for (auto& d : sel) parts.push_back(d.instance);
        ForkCert cert{sel, forall_closure(f_implies(phi, f_or(std::move(parts))), xvars)};
        if (!verify_fork(theory, phi, xvars, cert)) throw std::logic_error("forking certificate failed re-check");
        return record({Verdict::Yes, std::nullopt, cert, ""});
      }
    } while (next_combination(idx, dividing.size()));
  }
  return record({Verdict::Unknown, std::nullopt, std::nullopt,
                 "cover exists but needs more than n_max disjuncts"});
}

Decision thorn_indep(TheoryId theory, const std::vector<Elem>& a, const std::vector<Elem>& b,
                     const std::set<Elem>& base, const SearchBudget& budget) {
  std::set<Elem> ext = base;
  ext.insert(b.begin(), b.end());
  TypeDesc t = type_of(theory, a, ext);
  Decision forks = thorn_forks(theory, t.iso, t.vars, base, budget);
  switch (forks.verdict) {
    case Verdict::No: return {Verdict::Yes, std::nullopt, std::nullopt, forks.note};
    case Verdict::Yes: return {Verdict::No, std::nullopt, forks.fork, forks.note};
    case Verdict::Unknown: return forks;
  }
  return forks;
}

std::vector<std::vector<Elem>> morley_sequence(TheoryId theory, const TypeDesc& t, int length,
                                               const SearchBudget& budget) {
  if (!t.non_algebraic) throw std::invalid_argument("Morley sequences need a non-algebraic type");
  std::set<Elem> avoid = t.base;
  std::vector<std::vector<Elem>> seq;
  for (int i = 0; i < length; ++i) {
    auto r = realize_type(theory, t, avoid);
    for (auto& e : r) avoid.insert(e);
    seq.push_back(std::move(r));
  }

  // indiscernibility over the base: every increasing pair (and triple, for
  // singleton tuples) has the same type
  auto joint_iso = [&](const std::vector<Elem>& tup) {
    return type_of(theory, tup, t.base).iso->str();
  };
  if (length >= 2) {
    std::string ref = joint_iso(concat(seq[0], seq[1]));
    for (int i = 0; i < length; ++i)
      for (int j = i + 1; j < length; ++j)
        if (joint_iso(concat(seq[i], seq[j])) != ref)
          throw std::runtime_error("sequence is not 2-indiscernible");
  }
  if (length >= 3 && t.vars.size() == 1) {
    std::string ref = joint_iso(concat(concat(seq[0], seq[1]), seq[2]));
    for (int i = 0; i < length; ++i)
      for (int j = i + 1; j < length; ++j)
        for (int l = j + 1; l < length; ++l)
          if (joint_iso(concat(concat(seq[i], seq[j]), seq[l])) != ref)
            throw std::runtime_error("sequence is not 3-indiscernible");
  }

  // independence: each entry from the rest over the base
  for (int i = 0; i < length; ++i) {
    std::vector<Elem> rest;
    for (int j = 0; j < length; ++j)
      if (j != i) rest = concat(rest, seq[j]);
    Decision d = thorn_indep(theory, seq[i], rest, t.base, budget);
    if (d.verdict != Verdict::Yes)
      throw std::runtime_error("sequence entry " + std::to_string(i) + " is not independent from the rest");
  }
  return seq;
}

}  // namespace thornlab
