#include "thornlab/theory.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>

namespace thornlab {

namespace {

bool term_mentions(const Term& t, const Var& v) {
  switch (t.kind) {
    case Term::Kind::Variable: return t.var == v;
    case Term::Kind::Literal: return false;
    case Term::Kind::Cl: return term_mentions(*t.arg, v);
  }
  return false;
}

bool mentions(const FormulaPtr& f, const Var& v) { return free_vars(f).contains(v); }

bool term_ground(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable: return false;
    case Term::Kind::Literal: return true;
    case Term::Kind::Cl: return term_ground(*t.arg);
  }
  return false;
}

Elem ground_value(const Term& t) {
  if (t.kind == Term::Kind::Literal) return t.lit;
  return ground_value(*t.arg).cl();
}

// orientation-insensitive literal key + polarity, for cube pruning
std::pair<std::string, bool> literal_key(const FormulaPtr& f) {
  const Formula* g = f.get();
  bool pol = true;
  if (g->kind == Formula::Kind::Not) {
    pol = false;
    g = g->kids[0].get();
  }
  if (g->kind == Formula::Kind::Eq) {
    std::string a = g->lhs.str(), b = g->rhs.str();
    if (b < a) std::swap(a, b);
    return {a + " = " + b, pol};
  }
  if (g->kind == Formula::Kind::Less) return {g->lhs.str() + " < " + g->rhs.str(), pol};
  return {g->str(), pol};
}

using Cube = std::vector<FormulaPtr>;

constexpr size_t kCubeCap = 400000;

// Conjoins two cubes; nullopt when the result is syntactically inconsistent.
// drops duplicate cubes and strict supersets (a cube implies any subset cube);
// literals are interned so subsumption compares ints
void prune_cubes(std::vector<Cube>& cubes) {
  std::unordered_map<std::string, int> intern;
  std::unordered_map<const Formula*, int> by_node;
  auto lit_id = [&](const FormulaPtr& l) {
    auto hit = by_node.find(l.get());
    if (hit != by_node.end()) return hit->second;
    auto [s, p] = literal_key(l);
    int id = intern.emplace((p ? "+" : "-") + s, (int)intern.size()).first->second;
    by_node.emplace(l.get(), id);
    return id;
  };
  std::vector<std::vector<int>> keys(cubes.size());
  std::map<std::vector<int>, size_t> uniq;
  std::vector<char> dead(cubes.size(), 0);
  for (size_t i = 0; i < cubes.size(); ++i) {
    for (auto& l : cubes[i]) keys[i].push_back(lit_id(l));
    std::sort(keys[i].begin(), keys[i].end());
    if (!uniq.emplace(keys[i], i).second) dead[i] = 1;  // exact duplicate
  }
  for (size_t i = 0; i < cubes.size(); ++i) {
    if (dead[i]) continue;
    for (size_t j = i + 1; j < cubes.size(); ++j) {
      if (dead[j]) continue;
      if (keys[i].size() <= keys[j].size() &&
          std::includes(keys[j].begin(), keys[j].end(), keys[i].begin(), keys[i].end()))
        dead[j] = 1;
      else if (keys[j].size() <= keys[i].size() &&
               std::includes(keys[i].begin(), keys[i].end(), keys[j].begin(), keys[j].end()))
        dead[i] = 1;
      if (dead[i]) break;
    }
  }
  std::vector<Cube> out;
  for (size_t i = 0; i < cubes.size(); ++i)
    if (!dead[i]) out.push_back(std::move(cubes[i]));
  cubes = std::move(out);
}

std::optional<Cube> merge_cubes(const Cube& a, const Cube& b) {
  Cube out;
  std::map<std::string, bool> keys;
  std::set<std::string> lesses;
  auto push = [&](const FormulaPtr& lit) -> bool {
    auto [key, pol] = literal_key(lit);
    auto it = keys.find(key);
    if (it != keys.end()) return it->second == pol;  // dup ok, complement kills
    keys.emplace(key, pol);
    if (lit->kind == Formula::Kind::Less) {
      std::string l = lit->lhs.str(), r = lit->rhs.str();
      if (lesses.contains(r + "<" + l)) return false;
      std::string ek = l < r ? l + " = " + r : r + " = " + l;
      if (auto e = keys.find(ek); e != keys.end() && e->second) return false;
      lesses.insert(l + "<" + r);
    } else if (lit->kind == Formula::Kind::Eq) {
      std::string l = lit->lhs.str(), r = lit->rhs.str();
      if (lesses.contains(l + "<" + r) || lesses.contains(r + "<" + l)) return false;
    }
    out.push_back(lit);
    return true;
  };
  for (auto& l : a)
    if (!push(l)) return std::nullopt;
  for (auto& l : b)
    if (!push(l)) return std::nullopt;
  return out;
}

std::vector<Cube> dnf_rec(TheoryId th, const FormulaPtr& f, bool neg) {
  switch (f->kind) {
    case Formula::Kind::True: return neg ? std::vector<Cube>{} : std::vector<Cube>{{}};
    case Formula::Kind::False: return neg ? std::vector<Cube>{{}} : std::vector<Cube>{};
    case Formula::Kind::Eq:
      if (!neg) return {{f}};
      if (th == TheoryId::DLO) return {{f_less(f->lhs, f->rhs)}, {f_less(f->rhs, f->lhs)}};
      return {{f_not(f)}};
    case Formula::Kind::Less:
      if (!neg) return {{f}};
      return {{f_less(f->rhs, f->lhs)}, {f_eq(f->lhs, f->rhs)}};
    case Formula::Kind::Not: return dnf_rec(th, f->kids[0], !neg);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      std::vector<std::vector<Cube>> parts;
      bool product;
      if (f->kind == Formula::Kind::Implies) {
        // a -> b  ==  !a | b
        parts.push_back(dnf_rec(th, f->kids[0], !neg));
        parts.push_back(dnf_rec(th, f->kids[1], neg));
        product = neg;
      } else {
        for (auto& k : f->kids) parts.push_back(dnf_rec(th, k, neg));
        product = (f->kind == Formula::Kind::And) != neg;
      }
      if (!product) {
        std::vector<Cube> out;
        for (auto& p : parts)
          for (auto& c : p) out.push_back(c);
        return out;
      }
      std::sort(parts.begin(), parts.end(),
                [](const auto& a, const auto& b) { return a.size() < b.size(); });
      std::vector<Cube> acc{{}};
      for (auto& p : parts) {
        std::vector<Cube> next;
        size_t prune_at = 2048;
        for (auto& c1 : acc)
          for (auto& c2 : p) {
            if (auto m = merge_cubes(c1, c2)) next.push_back(std::move(*m));
            if (next.size() >= prune_at) {
              prune_cubes(next);
              prune_at = std::max<size_t>(2048, next.size() * 2);
              if (next.size() > kCubeCap) throw std::runtime_error("DNF size cap exceeded");
            }
          }
        if (next.size() > 64) prune_cubes(next);
        acc = std::move(next);
        if (acc.empty()) break;
      }
      return acc;
    }
    default: throw std::invalid_argument("positive_dnf needs a quantifier-free formula");
  }
}

}  // namespace

std::vector<std::vector<FormulaPtr>> positive_dnf(TheoryId th, const FormulaPtr& qf) {
  return dnf_rec(th, qf, false);
}

// ---------------------------------------------------------------------------
// One-variable elimination over a cube

namespace {

FormulaPtr elim_conjunct(TheoryId th, const Var& v, const Cube& lits) {
  std::vector<FormulaPtr> keep;
  std::vector<FormulaPtr> with_v;
  for (auto& l : lits) (mentions(l, v) ? with_v : keep).push_back(l);
  if (with_v.empty()) return f_and(std::move(keep));

  // equality pin: v = t with v not in t
  for (size_t i = 0; i < with_v.size(); ++i) {
    const FormulaPtr& l = with_v[i];
    if (l->kind != Formula::Kind::Eq) continue;
    const Term* other = nullptr;
    if (l->lhs.is_var(v) && !term_mentions(l->rhs, v)) other = &l->rhs;
    else if (l->rhs.is_var(v) && !term_mentions(l->lhs, v)) other = &l->lhs;
    if (!other) continue;
    std::map<Var, Term> bind{{v, *other}};
    for (size_t j = 0; j < with_v.size(); ++j)
      if (j != i) keep.push_back(substitute(with_v[j], bind));
    return f_and(std::move(keep));
  }

  switch (th) {
    case TheoryId::EQ:
      // only disequalities remain; the domain is infinite
      return f_and(std::move(keep));
    case TheoryId::DLO: {
      std::vector<Term> lowers, uppers;
      for (auto& l : with_v) {
        if (l->kind != Formula::Kind::Less) throw std::invalid_argument("unsupported atom in DLO elimination: " + l->str());
        if (l->lhs.is_var(v)) uppers.push_back(l->rhs);
        else if (l->rhs.is_var(v)) lowers.push_back(l->lhs);
        else throw std::invalid_argument("unsupported literal in DLO elimination: " + l->str());
      }
      // dense without endpoints: the cut is realizable iff every lower bound
      // is below every upper bound
      for (auto& lo : lowers)
        for (auto& up : uppers) keep.push_back(f_less(lo, up));
      return f_and(std::move(keep));
    }
    case TheoryId::EREL: {
      if (v.sort == Sort::Class) {
        // only class disequalities remain; infinitely many classes
        return f_and(std::move(keep));
      }
      std::vector<Term> cl_eq, cl_ne;
      for (auto& l : with_v) {
        const Formula* g = l.get();
        bool pos = true;
        if (g->kind == Formula::Kind::Not) {
          pos = false;
          g = g->kids[0].get();
        }
        if (g->kind != Formula::Kind::Eq) throw std::invalid_argument("unsupported atom in EREL elimination: " + l->str());
        bool lhs_clv = g->lhs.kind == Term::Kind::Cl && g->lhs.arg->is_var(v);
        bool rhs_clv = g->rhs.kind == Term::Kind::Cl && g->rhs.arg->is_var(v);
        if (lhs_clv || rhs_clv) {
          const Term& other = lhs_clv ? g->rhs : g->lhs;
          if (term_mentions(other, v)) throw std::invalid_argument("unsupported literal in EREL elimination: " + l->str());
          (pos ? cl_eq : cl_ne).push_back(other);
        } else {
          // element (dis)equality; positives were consumed by the pin pass,
          // and every class is infinite, so disequalities cost nothing
          if (pos) throw std::logic_error("unpinned element equality in EREL elimination");
        }
      }
      if (cl_eq.empty()) return f_and(std::move(keep));  // infinitely many classes
      const Term& pivot = cl_eq[0];
      for (size_t i = 1; i < cl_eq.size(); ++i) keep.push_back(f_eq(pivot, cl_eq[i]));
      for (auto& d : cl_ne) keep.push_back(f_not(f_eq(pivot, d)));
      return f_and(std::move(keep));
    }
  }
  throw std::logic_error("bad theory");
}

FormulaPtr elim_exists(TheoryId th, const Var& v, const FormulaPtr& body) {
  if (!mentions(body, v)) return body;
  // miniscoping: distribute over disjunctions, hoist v-free conjuncts
  if (body->kind == Formula::Kind::Or) {
    std::vector<FormulaPtr> out;
    for (auto& k : body->kids) out.push_back(elim_exists(th, v, k));
    return f_or(std::move(out));
  }
  if (body->kind == Formula::Kind::And) {
    std::vector<FormulaPtr> free, bound;
    for (auto& k : body->kids) (mentions(k, v) ? bound : free).push_back(k);
    if (!free.empty()) {
      free.push_back(elim_exists(th, v, f_and(std::move(bound))));
      return f_and(std::move(free));
    }
  }
  std::vector<FormulaPtr> out;
  for (auto& cube : dnf_rec(th, body, false)) out.push_back(elim_conjunct(th, v, cube));
  return f_or(std::move(out));
}

std::mutex cache_mutex;
std::unordered_map<std::string, FormulaPtr> qe_cache;
std::unordered_map<std::string, bool> decide_cache;

std::string cache_key(TheoryId th, const FormulaPtr& f) {
  return theory_name(th) + "|" + sort_sig(f) + "|" + f->str();
}

}  // namespace

void clear_decision_cache();  // defined after the type-enumeration memo

FormulaPtr qe(TheoryId th, const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Eq:
    case Formula::Kind::Less: return f;
    case Formula::Kind::Not: return f_not(qe(th, f->kids[0]));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(qe(th, k));
      return f->kind == Formula::Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case Formula::Kind::Implies: return f_implies(qe(th, f->kids[0]), qe(th, f->kids[1]));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string key = cache_key(th, f);
      {
        std::lock_guard lock(cache_mutex);
        if (auto it = qe_cache.find(key); it != qe_cache.end()) return it->second;
      }
      FormulaPtr body = qe(th, f->kids[0]);
      FormulaPtr out = f->kind == Formula::Kind::Exists
                           ? elim_exists(th, f->qvar, body)
                           : f_not(elim_exists(th, f->qvar, f_not(body)));
      std::lock_guard lock(cache_mutex);
      qe_cache.emplace(std::move(key), out);
      return out;
    }
  }
  throw std::logic_error("bad formula");
}

// ---------------------------------------------------------------------------
// Semantic evaluation: quantifiers range over region representatives

namespace {

std::vector<Elem> quantifier_candidates(TheoryId th, Sort sort, const std::set<Elem>& consts) {
  std::vector<Elem> out;
  switch (th) {
    case TheoryId::EQ: {
      long long mx = -1;
      for (auto& e : consts) {
        out.push_back(e);
        mx = std::max(mx, e.a);
      }
      out.push_back(Elem::eq_nat(mx + 1));
      return out;
    }
    case TheoryId::DLO: {
      std::vector<Rational> vals;
      for (auto& e : consts) vals.push_back(e.rat());
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      if (vals.empty()) return {Elem::dlo_rat(Rational(0))};
      out.push_back(Elem::dlo_rat(vals.front() - Rational(1)));
      for (size_t i = 0; i < vals.size(); ++i) {
        out.push_back(Elem::dlo_rat(vals[i]));
        if (i + 1 < vals.size()) out.push_back(Elem::dlo_rat((vals[i] + vals[i + 1]) / 2));
      }
      out.push_back(Elem::dlo_rat(vals.back() + Rational(1)));
      return out;
    }
    case TheoryId::EREL: {
      std::set<long long> classes;
      std::map<long long, long long> max_member;
      long long max_class = -1;
      std::vector<Elem> elems;
      for (auto& e : consts) {
        if (e.sort == Sort::Elem) {
          elems.push_back(e);
          classes.insert(e.a);
          auto [it, fresh] = max_member.try_emplace(e.a, e.b);
          if (!fresh) it->second = std::max(it->second, e.b);
        } else {
          classes.insert(e.a);
        }
        max_class = std::max(max_class, e.a);
      }
      if (sort == Sort::Class) {
        for (long long c : classes) out.push_back(Elem::erel_class(c));
        out.push_back(Elem::erel_class(max_class + 1));
        return out;
      }
      for (auto& e : elems) out.push_back(e);
      for (long long c : classes) {
        auto it = max_member.find(c);
        out.push_back(Elem::erel_pair(c, it == max_member.end() ? 0 : it->second + 1));
      }
      out.push_back(Elem::erel_pair(max_class + 1, 0));
      return out;
    }
  }
  return out;
}

bool sem_eval(TheoryId th, const FormulaPtr& f, std::map<Var, Elem>& env) {
  switch (f->kind) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Eq: return eval_term(f->lhs, env) == eval_term(f->rhs, env);
    case Formula::Kind::Less: return eval_term(f->lhs, env).rat() < eval_term(f->rhs, env).rat();
    case Formula::Kind::Not: return !sem_eval(th, f->kids[0], env);
    case Formula::Kind::And:
      for (auto& k : f->kids)
        if (!sem_eval(th, k, env)) return false;
      return true;
    case Formula::Kind::Or:
      for (auto& k : f->kids)
        if (sem_eval(th, k, env)) return true;
      return false;
    case Formula::Kind::Implies: return !sem_eval(th, f->kids[0], env) || sem_eval(th, f->kids[1], env);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::set<Elem> consts = literals_of(f->kids[0]);
      for (auto& [v, e] : env) consts.insert(e);
      const bool ex = f->kind == Formula::Kind::Exists;
      for (const Elem& cand : quantifier_candidates(th, f->qvar.sort, consts)) {
        env[f->qvar] = cand;
        bool sub = sem_eval(th, f->kids[0], env);
        env.erase(f->qvar);
        if (sub == ex) return ex;
      }
      return !ex;
    }
  }
  throw std::logic_error("bad formula");
}

}  // namespace

bool holds(TheoryId th, const FormulaPtr& closed) {
  if (!free_vars(closed).empty()) throw std::invalid_argument("holds requires a closed formula");
  std::map<Var, Elem> env;
  return sem_eval(th, closed, env);
}

bool decide(TheoryId th, const FormulaPtr& closed) {
  std::string key = cache_key(th, closed);
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = decide_cache.find(key); it != decide_cache.end()) return it->second;
  }
  bool val = eval_qf(qe(th, closed), {});
  std::lock_guard lock(cache_mutex);
  decide_cache.emplace(std::move(key), val);
  return val;
}

FormulaPtr exists_closure(const FormulaPtr& f, const std::vector<Var>& vars) {
  FormulaPtr out = f;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) out = f_exists(*it, out);
  return out;
}

FormulaPtr forall_closure(const FormulaPtr& f, const std::vector<Var>& vars) {
  FormulaPtr out = f;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) out = f_forall(*it, out);
  return out;
}

bool satisfiable(TheoryId th, const FormulaPtr& f) {
  auto fv = free_vars(f);
  return decide(th, exists_closure(f, {fv.begin(), fv.end()}));
}

// ---------------------------------------------------------------------------
// Solution counting

namespace {

SolutionCount count_rec(TheoryId th, const FormulaPtr& f, const std::vector<Var>& vars) {
  if (vars.empty()) {
    SolutionCount sc;
    if (decide(th, f)) sc.witnesses.push_back({});
    return sc;
  }
  const Var& x = vars[0];
  std::vector<Var> rest(vars.begin() + 1, vars.end());
  FormulaPtr g = qe(th, exists_closure(f, rest));

  std::set<Elem> values;
  for (auto& cube : positive_dnf(th, g)) {
    std::vector<Elem> pins;
    for (auto& l : cube) {
      if (l->kind != Formula::Kind::Eq) continue;
      if (l->lhs.is_var(x) && term_ground(l->rhs)) pins.push_back(ground_value(l->rhs));
      else if (l->rhs.is_var(x) && term_ground(l->lhs)) pins.push_back(ground_value(l->lhs));
    }
    if (pins.empty()) {
      if (decide(th, f_exists(x, f_and(cube)))) return {true, {}};
      continue;
    }
    for (auto& v : pins)
      if (decide(th, substitute(f_and(cube), {{x, Term::literal(v)}}))) values.insert(v);
  }

  SolutionCount out;
  for (const Elem& v : values) {
    SolutionCount sub = count_rec(th, substitute(f, {{x, Term::literal(v)}}), rest);
    if (sub.infinite) return {true, {}};
    for (auto& w : sub.witnesses) {
      std::vector<Elem> tup{v};
      tup.insert(tup.end(), w.begin(), w.end());
      out.witnesses.push_back(std::move(tup));
    }
  }
  return out;
}

}  // namespace

SolutionCount solution_count(TheoryId th, const FormulaPtr& f, const std::vector<Var>& vars) {
  for (auto& v : free_vars(f))
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw std::invalid_argument("free variable " + v.name + " not among the designated tuple");
  return count_rec(th, f, vars);
}

// ---------------------------------------------------------------------------
// Types over finite bases

namespace {

// canonical representative per EREL class visible from a base: a class
// literal when one is present, else cl of the least member
std::map<long long, Term> class_reps(const std::set<Elem>& base) {
  std::map<long long, Term> reps;
  for (auto& e : base)
    if (e.sort == Sort::Class) reps.emplace(e.a, Term::literal(e));
  for (auto& e : base)
    if (e.sort == Sort::Elem && !reps.contains(e.a)) reps.emplace(e.a, Term::cl_of(Term::literal(e)));
  return reps;
}

std::vector<TypeDesc> one_var_types(TheoryId th, const Var& v, const std::set<Elem>& base) {
  Term x = Term::variable(v);
  std::vector<TypeDesc> out;
  auto add = [&](FormulaPtr iso, bool nonalg) { out.push_back({th, {v}, base, std::move(iso), nonalg}); };
  switch (th) {
    case TheoryId::EQ: {
      std::vector<FormulaPtr> nots;
      for (auto& b : base) {
        add(f_eq(x, Term::literal(b)), false);
        nots.push_back(f_not(f_eq(x, Term::literal(b))));
      }
      add(f_and(std::move(nots)), true);
      return out;
    }
    case TheoryId::DLO: {
      std::vector<Elem> vals(base.begin(), base.end());
      if (vals.empty()) {
        add(f_true(), true);
        return out;
      }
      add(f_less(x, Term::literal(vals.front())), true);
      for (size_t i = 0; i < vals.size(); ++i) {
        add(f_eq(x, Term::literal(vals[i])), false);
        if (i + 1 < vals.size())
          add(f_and2(f_less(Term::literal(vals[i]), x), f_less(x, Term::literal(vals[i + 1]))), true);
      }
      add(f_less(Term::literal(vals.back()), x), true);
      return out;
    }
    case TheoryId::EREL: {
      auto reps = class_reps(base);
      if (v.sort == Sort::Class) {
        std::vector<FormulaPtr> nots;
        for (auto& [idx, rep] : reps) {
          add(f_eq(x, rep), false);
          nots.push_back(f_not(f_eq(x, rep)));
        }
        add(f_and(std::move(nots)), true);
        return out;
      }
      for (auto& e : base)
        if (e.sort == Sort::Elem) add(f_eq(x, Term::literal(e)), false);
      std::vector<FormulaPtr> generic;
      for (auto& [idx, rep] : reps) {
        std::vector<FormulaPtr> parts{f_eq(Term::cl_of(x), rep)};
        for (auto& e : base)
          if (e.sort == Sort::Elem && e.a == idx) parts.push_back(f_not(f_eq(x, Term::literal(e))));
        add(f_and(std::move(parts)), true);
        generic.push_back(f_not(f_eq(Term::cl_of(x), rep)));
      }
      add(f_and(std::move(generic)), true);
      return out;
    }
  }
  throw std::logic_error("bad theory");
}

std::mutex type_mutex;
std::map<std::string, std::vector<TypeDesc>> enum_cache;

std::string vars_sig(const std::vector<Var>& vars) {
  std::string s;
  for (auto& v : vars) {
    s += v.name;
    s += v.sort == Sort::Elem ? ":e " : ":c ";
  }
  return s;
}

}  // namespace

std::string render_tuple(const std::vector<Elem>& tuple) {
  std::string s;
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (i) s += ",";
    s += tuple[i].str();
  }
  return s;
}

std::string render_elem_set(const std::set<Elem>& s) {
  return render_tuple({s.begin(), s.end()});
}

std::vector<TypeDesc> enumerate_types(TheoryId th, const std::vector<Var>& vars, const std::set<Elem>& base) {
  if (vars.empty()) throw std::invalid_argument("enumerate_types needs at least one variable");
  std::string key = theory_name(th) + "|" + vars_sig(vars) + "|" + render_elem_set(base);
  {
    std::lock_guard lock(type_mutex);
    if (auto it = enum_cache.find(key); it != enum_cache.end()) return it->second;
  }
  std::vector<TypeDesc> out;
  std::vector<TypeDesc> firsts = one_var_types(th, vars[0], base);
  if (vars.size() == 1) {
    out = std::move(firsts);
  } else {
    std::vector<Var> rest(vars.begin() + 1, vars.end());
    for (auto& t1 : firsts) {
      std::vector<Elem> r1 = realize_type(th, t1, {});
      std::set<Elem> sub_base = base;
      sub_base.insert(r1[0]);
      for (auto& sub : enumerate_types(th, rest, sub_base)) {
        FormulaPtr sub_iso = sub.iso;
        if (t1.non_algebraic) {
          sub_iso = replace_literal(sub_iso, r1[0], vars[0]);
          // a fresh element realization also contributes a fresh class
          // literal; fold it back to cl(vars[0])
          if (th == TheoryId::EREL && r1[0].sort == Sort::Elem) {
            Elem cls = Elem::erel_class(r1[0].a);
            if (!acl(th, base).count(cls))
              sub_iso = replace_literal(sub_iso, cls, Term::cl_of(Term::variable(vars[0])));
          }
        }
        out.push_back({th, vars, base, f_and2(t1.iso, sub_iso), t1.non_algebraic || sub.non_algebraic});
      }
    }
  }
  std::lock_guard lock(type_mutex);
  enum_cache.emplace(std::move(key), out);
  return out;
}

// ---------------------------------------------------------------------------
// Realization

namespace {

struct OneVarConstraints {
  std::optional<Elem> pin;
  std::optional<long long> pinned_class;     // EREL elem
  std::set<long long> excluded_classes;      // EREL elem/class
  std::set<Elem> excluded;                   // disequality exclusions
  std::optional<Rational> lower, upper;      // DLO
};

OneVarConstraints read_constraints(const Var& v, const std::vector<FormulaPtr>& lits) {
  OneVarConstraints c;
  for (auto& l : lits) {
    const Formula* g = l.get();
    bool pos = true;
    if (g->kind == Formula::Kind::Not) {
      pos = false;
      g = g->kids[0].get();
    }
    if (g->kind == Formula::Kind::Less) {
      if (g->lhs.is_var(v) && term_ground(g->rhs)) {
        Rational u = ground_value(g->rhs).rat();
        if (!c.upper || u < *c.upper) c.upper = u;
      } else if (g->rhs.is_var(v) && term_ground(g->lhs)) {
        Rational lo = ground_value(g->lhs).rat();
        if (!c.lower || *c.lower < lo) c.lower = lo;
      } else {
        throw std::invalid_argument("cannot realize across literal " + l->str());
      }
      continue;
    }
    if (g->kind != Formula::Kind::Eq) throw std::invalid_argument("cannot realize across literal " + l->str());
    bool lhs_v = g->lhs.is_var(v), rhs_v = g->rhs.is_var(v);
    bool lhs_clv = g->lhs.kind == Term::Kind::Cl && g->lhs.arg->is_var(v);
    bool rhs_clv = g->rhs.kind == Term::Kind::Cl && g->rhs.arg->is_var(v);
    if (lhs_v || rhs_v) {
      const Term& other = lhs_v ? g->rhs : g->lhs;
      if (!term_ground(other)) throw std::invalid_argument("cannot realize across literal " + l->str());
      if (pos) c.pin = ground_value(other);
      else c.excluded.insert(ground_value(other));
    } else if (lhs_clv || rhs_clv) {
      const Term& other = lhs_clv ? g->rhs : g->lhs;
      if (!term_ground(other)) throw std::invalid_argument("cannot realize across literal " + l->str());
      long long idx = ground_value(other).a;
      if (pos) c.pinned_class = idx;
      else c.excluded_classes.insert(idx);
    } else {
      throw std::invalid_argument("cannot realize across literal " + l->str());
    }
  }
  return c;
}

Elem realize_one(TheoryId th, const Var& v, const std::vector<FormulaPtr>& lits, const std::set<Elem>& avoid) {
  OneVarConstraints c = read_constraints(v, lits);
  if (c.pin) return *c.pin;  // pinned coordinates follow their pins
  switch (th) {
    case TheoryId::EQ: {
      std::set<long long> bad;
      for (auto& e : c.excluded) bad.insert(e.a);
      for (auto& e : avoid) bad.insert(e.a);
      long long n = 0;
      while (bad.contains(n)) ++n;
      return Elem::eq_nat(n);
    }
    case TheoryId::DLO: {
      std::vector<Rational> pts;
      for (auto& e : avoid) {
        Rational r = e.rat();
        if ((!c.lower || *c.lower < r) && (!c.upper || r < *c.upper)) pts.push_back(r);
      }
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      std::optional<Rational> lo = c.lower;
      std::optional<Rational> hi = pts.empty() ? c.upper : std::optional<Rational>(pts.front());
      if (!lo && !hi) return Elem::dlo_rat(Rational(0));
      if (!lo) return Elem::dlo_rat(*hi - Rational(1));
      if (!hi) return Elem::dlo_rat(*lo + Rational(1));
      return Elem::dlo_rat((*lo + *hi) / 2);
    }
    case TheoryId::EREL: {
      if (v.sort == Sort::Class) {
        std::set<long long> bad = c.excluded_classes;
        for (auto& e : c.excluded) bad.insert(e.a);  // class-sort disequalities
        for (auto& e : avoid)
          if (e.sort == Sort::Class) bad.insert(e.a);
        long long n = 0;
        while (bad.contains(n)) ++n;
        return Elem::erel_class(n);
      }
      std::set<Elem> bad_elems = c.excluded;
      for (auto& e : avoid)
        if (e.sort == Sort::Elem) bad_elems.insert(e);
      long long cls;
      if (c.pinned_class) {
        cls = *c.pinned_class;
      } else {
        std::set<long long> bad_cls = c.excluded_classes;
        for (auto& e : avoid) bad_cls.insert(e.a);
        cls = 0;
        while (bad_cls.contains(cls)) ++cls;
      }
      long long m = 0;
      while (bad_elems.contains(Elem::erel_pair(cls, m))) ++m;
      return Elem::erel_pair(cls, m);
    }
  }
  throw std::logic_error("bad theory");
}

std::vector<FormulaPtr> conjuncts_of(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::True) return {};
  if (f->kind == Formula::Kind::And) return f->kids;
  return {f};
}

}  // namespace

std::vector<Elem> realize_type(TheoryId th, const TypeDesc& t, const std::set<Elem>& avoid) {
  std::set<Elem> av = avoid;
  FormulaPtr f = t.iso;
  std::vector<Elem> out;
  for (size_t i = 0; i < t.vars.size(); ++i) {
    const Var& v = t.vars[i];
    std::vector<FormulaPtr> relevant;
    for (auto& lit : conjuncts_of(f)) {
      std::set<Var> fv = free_vars(lit);
      if (fv.contains(v) && fv.size() == 1) relevant.push_back(lit);
    }
    Elem val = realize_one(th, v, relevant, av);
    out.push_back(val);
    f = substitute(f, {{v, Term::literal(val)}});
    if (f->kind == Formula::Kind::False)
      throw std::runtime_error("type exhausted: no realization avoids the given set");
    av.insert(val);
  }
  if (f->kind != Formula::Kind::True)
    throw std::runtime_error("realize_type left residual constraints: " + f->str());
  return out;
}

TypeDesc type_of(TheoryId th, const std::vector<Elem>& tuple, const std::set<Elem>& base) {
  std::vector<Var> vars;
  for (size_t i = 0; i < tuple.size(); ++i) vars.push_back({"x" + std::to_string(i + 1), tuple[i].sort});
  std::map<Var, Elem> env;
  for (size_t i = 0; i < tuple.size(); ++i) env[vars[i]] = tuple[i];
  for (auto& t : enumerate_types(th, vars, base))
    if (eval_qf(t.iso, env)) return t;
  throw std::logic_error("tuple realizes no enumerated type");  // unreachable: types partition
}

std::vector<std::vector<Elem>> sample_distinct(TheoryId th, const FormulaPtr& pi,
                                               const std::vector<Var>& yvars, size_t n) {
  std::set<Elem> base = literals_of(pi);
  std::vector<std::vector<Elem>> out;
  std::set<Elem> used;
  auto models_pi = [&](const std::vector<Elem>& tup) {
    std::map<Var, Term> bind;
    for (size_t i = 0; i < yvars.size(); ++i) bind[yvars[i]] = Term::literal(tup[i]);
    FormulaPtr inst = substitute(pi, bind);
    return is_quantifier_free(inst) ? decide(th, inst) : decide(th, qe(th, inst));
  };
  for (auto& t : enumerate_types(th, yvars, base)) {
    if (out.size() >= n) break;
    std::vector<Elem> probe = realize_type(th, t, {});
    if (!models_pi(probe)) continue;
    if (!t.non_algebraic) {
      out.push_back(probe);
      for (auto& e : probe) used.insert(e);
      continue;
    }
    while (out.size() < n) {
      std::vector<Elem> r = realize_type(th, t, used);
      out.push_back(r);
      for (auto& e : r) used.insert(e);
    }
  }
  return out;
}

std::set<Elem> acl(TheoryId th, const std::set<Elem>& base) {
  std::set<Elem> out = base;
  if (th == TheoryId::EREL)
    for (auto& e : base)
      if (e.sort == Sort::Elem) out.insert(e.cl());
  return out;
}

std::vector<Sort> theory_sorts(TheoryId th) {
  if (th == TheoryId::EREL) return {Sort::Elem, Sort::Class};
  return {Sort::Elem};
}

std::vector<Elem> witness_pool(TheoryId th, const std::set<Elem>& seeds, int depth) {
  std::set<Elem> pool = seeds;
  for (int d = 0; d < depth; ++d) {
    std::vector<Elem> fresh;
    for (Sort s : theory_sorts(th)) {
      Var v{"w", s};
      for (auto& t : enumerate_types(th, {v}, pool))
        if (t.non_algebraic) fresh.push_back(realize_type(th, t, pool)[0]);
    }
    pool.insert(fresh.begin(), fresh.end());
  }
  return {pool.begin(), pool.end()};
}

void clear_decision_cache() {
  {
    std::lock_guard lock(cache_mutex);
    qe_cache.clear();
    decide_cache.clear();
  }
  std::lock_guard lock(type_mutex);
  enum_cache.clear();
}

}  // namespace thornlab
