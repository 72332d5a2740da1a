#include "thornlab/rank.hpp"

#include <mutex>
#include <unordered_map>

namespace thornlab {

namespace {

std::map<Var, Term> tuple_binding(const std::vector<Var>& vars, const std::vector<Elem>& vals) {
  std::map<Var, Term> bind;
  for (size_t i = 0; i < vars.size(); ++i) bind[vars[i]] = Term::literal(vals[i]);
  return bind;
}

std::set<Elem> with_elems(std::set<Elem> s, const std::vector<Elem>& more) {
  s.insert(more.begin(), more.end());
  return s;
}

std::string params_sig(const RankParams& p) {
  std::string s = std::to_string(p.k);
  for (auto& d : p.delta) s += "|" + sort_sig(d) + d->str();
  s += "#";
  for (auto& f : p.pi) s += "|" + f->str();
  return s;
}

std::mutex rank_mutex;
std::unordered_map<std::string, std::pair<int, std::shared_ptr<RankTree>>> local_cache;

struct UthVal {
  int value = 0;
  bool capped = false;
};
std::unordered_map<std::string, UthVal> uth_cache;

// Renames the elements of (f, base) through a theory automorphism into a
// normal form, so search states that differ only in element identity share a
// cache entry.  EQ: constants -> 0,1,.. in value order.  DLO: constants ->
// 0,1,.. in ascending order (order-preserving).  EREL: classes -> 0,1,.. by
// first appearance, members within each class -> 0,1,..
std::string canon_sig(TheoryId th, const FormulaPtr& f, const std::set<Elem>& base,
                      const std::set<Elem>& mark = {}) {
  std::set<Elem> elems = literals_of(f);
  elems.insert(base.begin(), base.end());
  std::map<Elem, Elem> ren;
  if (th == TheoryId::EREL) {
    std::map<long long, long long> cls;
    std::map<long long, long long> next_member;
    for (auto& e : elems)
      if (!cls.count(e.a)) cls.emplace(e.a, (long long)cls.size());
    for (auto& e : elems)
      ren[e] = e.sort == Sort::Class ? Elem::erel_class(cls[e.a])
                                     : Elem::erel_pair(cls[e.a], next_member[e.a]++);
  } else {
    long long i = 0;
    for (auto& e : elems)  // set order is ascending, so DLO stays order-true
      ren[e] = th == TheoryId::EQ ? Elem::eq_nat(i++) : Elem::dlo_rat({i++, 1});
  }

  // two passes through disjoint temporaries so swaps cannot collide
  const long long off = 1LL << 40;
  FormulaPtr g = f;
  long long idx = 0;
  std::vector<std::pair<Elem, Elem>> temped;
  for (auto& [from, to] : ren) {
    Elem tmp = from;
    tmp.a = off + idx++;
    tmp.b = 1;  // keep DLO denominators valid
    g = replace_literal(g, from, Term::literal(tmp));
    temped.push_back({tmp, to});
  }
  for (auto& [tmp, to] : temped) g = replace_literal(g, tmp, Term::literal(to));

  std::set<Elem> mapped_base, mapped_mark;
  for (auto& e : base) mapped_base.insert(ren[e]);
  for (auto& e : mark) mapped_mark.insert(ren[e]);  // mark must sit inside base/f
  return sort_sig(g) + g->str() + "|" + render_elem_set(mapped_base) + "|" +
         render_elem_set(mapped_mark);
}

struct LocalCtx {
  TheoryId theory;
  const RankParams& params;
  std::vector<std::vector<Elem>> ctuples;  // outer-parameter candidates, fixed per query
  std::string sig;
};

// Rank with a depth budget; depth_left 0 cuts exploration, so a returned
// value below the initial budget is exact.
std::pair<int, std::shared_ptr<RankTree>> rank_rec(const LocalCtx& ctx, const FormulaPtr& phi,
                                                   const std::set<Elem>& base, int depth_left) {
  std::string key = ctx.sig + "|" + sort_sig(phi) + phi->str() + "|" + render_elem_set(base) + "|" +
                    std::to_string(depth_left);
  {
    std::lock_guard lock(rank_mutex);
    if (auto it = local_cache.find(key); it != local_cache.end()) return it->second;
  }

  auto leaf = std::make_shared<RankTree>(RankTree{phi, base, std::nullopt, nullptr});
  std::pair<int, std::shared_ptr<RankTree>> out{-1, leaf};
  if (satisfiable(ctx.theory, phi)) {
    out.first = 0;
    for (size_t di = 0; depth_left > 0 && di < ctx.params.delta.size(); ++di)
      for (size_t pi = 0; pi < ctx.params.pi.size(); ++pi)
        for (auto& c : ctx.ctuples) {
          FormulaPtr pic = substitute(ctx.params.pi[pi], tuple_binding(ctx.params.zvars, c));
          Family fam{ctx.theory, ctx.params.delta[di], ctx.params.xvars, ctx.params.yvars, pic};
          if (!k_inconsistent(fam, ctx.params.k)) continue;
          for (auto& q : enumerate_types(ctx.theory, ctx.params.yvars, with_elems(base, c))) {
            if (!q.non_algebraic) continue;
            std::vector<Elem> a = realize_type(ctx.theory, q, {});
            if (!decide(ctx.theory, substitute(pic, tuple_binding(ctx.params.yvars, a)))) continue;
            FormulaPtr child =
                f_and2(phi, substitute(ctx.params.delta[di], tuple_binding(ctx.params.yvars, a)));
            auto [r, sub] = rank_rec(ctx, child, with_elems(with_elems(base, c), a), depth_left - 1);
            if (r >= 0 && 1 + r > out.first) {
              out.first = 1 + r;
              out.second = std::make_shared<RankTree>(
                  RankTree{phi, base, RankStep{di, pi, c, q, a}, sub});
            }
          }
        }
  }
  std::lock_guard lock(rank_mutex);
  local_cache.emplace(key, out);
  return out;
}

FormulaPtr abstract_one(const FormulaPtr& f, const Elem& e, const Var& v) {
  return replace_literal(f, e, v);
}

int auto_cap(const TypeDesc& t, int cap) { return cap > 0 ? cap : 2 * (int)t.vars.size() + 1; }

bool extends(TheoryId theory, const TypeDesc& q, const TypeDesc& t) {
  return decide(theory, exists_closure(f_and2(q.iso, t.iso), q.vars));
}

std::vector<Elem> extension_candidates(TheoryId theory, const TypeDesc& t) {
  std::set<Elem> seeds = t.base;
  for (auto& e : literals_of(t.iso)) seeds.insert(e);
  std::vector<Elem> out;
  for (auto& e : witness_pool(theory, seeds, 2))
    if (!t.base.count(e)) out.push_back(e);
  return out;
}

// Complete extensions of t over B, generated from realizations: every pool
// tuple satisfying t.iso yields an extension tp(tuple/B), and tuples whose
// configuration over B matches up to automorphism give the same one.
std::vector<TypeDesc> realized_extensions(TheoryId theory, const TypeDesc& t,
                                          const std::set<Elem>& B) {
  std::set<Elem> seeds = B;
  for (auto& e : literals_of(t.iso)) seeds.insert(e);
  std::vector<Elem> pool = witness_pool(theory, seeds, 2);
  std::vector<std::vector<Elem>> tuples{{}};
  for (auto& v : t.vars) {
    std::vector<std::vector<Elem>> next;
    for (auto& tup : tuples)
      for (auto& e : pool)
        if (e.sort == v.sort) {
          next.push_back(tup);
          next.back().push_back(e);
        }
    tuples = std::move(next);
  }
  std::set<std::string> seen;
  std::vector<TypeDesc> out;
  for (auto& tup : tuples) {
    std::map<Var, Elem> env;
    std::vector<FormulaPtr> marker{t.iso};
    for (size_t i = 0; i < t.vars.size(); ++i) {
      env[t.vars[i]] = tup[i];
      marker.push_back(f_eq(Term::variable(t.vars[i]), Term::literal(tup[i])));
    }
    if (!eval_qf(t.iso, env)) continue;
    if (!seen.insert(canon_sig(theory, f_and(std::move(marker)), B, t.base)).second) continue;
    out.push_back(type_of(theory, tup, B));
  }
  return out;
}

// Successor test for the starred rank: the conjunction of q over k distinct
// conjugates of a must fork over (or be inconsistent with) base+a.
bool star_step_forks(TheoryId theory, const TypeDesc& t, const Elem& a, const TypeDesc& q,
                     const SearchBudget& budget) {
  TypeDesc ta = type_of(theory, {a}, t.base);
  if (!ta.non_algebraic) return false;
  Var y{"y0", a.sort};
  FormulaPtr delta = abstract_one(q.iso, a, y);
  if (!free_vars(delta).count(y)) return false;  // extension ignores a
  std::set<Elem> B = with_elems(t.base, {a});
  for (int k = 2; k <= budget.k_max; ++k) {
    std::vector<FormulaPtr> insts{q.iso};
    std::set<Elem> avoid = B;
    for (int i = 1; i < k; ++i) {
      std::vector<Elem> ai = realize_type(theory, ta, avoid);
      avoid.insert(ai[0]);
      insts.push_back(substitute(delta, {{y, Term::literal(ai[0])}}));
    }
    FormulaPtr joint = f_and(std::move(insts));
    if (!satisfiable(theory, joint) ||
        thorn_forks(theory, joint, q.vars, B, budget).verdict == Verdict::Yes)
      return true;
  }
  return false;
}

bool step_forks(TheoryId theory, const TypeDesc& t, const Elem& a, const TypeDesc& q,
                const SearchBudget& budget, bool starred, ForkCert* cert) {
  if (starred) return star_step_forks(theory, t, a, q, budget);
  Decision d = thorn_forks(theory, q.iso, q.vars, t.base, budget);
  if (d.verdict != Verdict::Yes) return false;
  if (cert) *cert = *d.fork;
  return true;
}

UthVal uth_value_rec(TheoryId theory, const TypeDesc& t, const SearchBudget& budget,
                     int depth_left, bool starred) {
  std::string key = (starred ? "s|" : "u|") + theory_name(theory) + "|" +
                    std::to_string(depth_left) + "|";
  for (auto& v : t.vars)  // iso may not mention a variable, so record sorts
    key += v.name + (v.sort == Sort::Class ? ":c|" : ":e|");
  key += canon_sig(theory, t.iso, t.base);
  {
    std::lock_guard lock(rank_mutex);
    if (auto it = uth_cache.find(key); it != uth_cache.end()) return it->second;
  }
  UthVal out;
  if (t.non_algebraic && depth_left > 0) {
    std::set<std::string> orbit_seen, ext_seen;
    for (auto& a : extension_candidates(theory, t)) {
      std::set<Elem> B = with_elems(t.base, {a});
      if (!orbit_seen.insert(canon_sig(theory, t.iso, B, t.base)).second) continue;
      for (auto& q : realized_extensions(theory, t, B)) {
        if (!ext_seen.insert(canon_sig(theory, q.iso, B, t.base)).second) continue;
        if (!step_forks(theory, t, a, q, budget, starred, nullptr)) continue;
        UthVal sub = uth_value_rec(theory, q, budget, depth_left - 1, starred);
        out.value = std::max(out.value, 1 + sub.value);
        if (out.value == depth_left) break;  // budget reached, nothing can beat it
      }
      if (out.value == depth_left) break;
    }
  }
  out.capped = t.non_algebraic && out.value == depth_left;
  std::lock_guard lock(rank_mutex);
  uth_cache.emplace(key, out);
  return out;
}

// Rebuilds a witnessing chain after the value is known: greedy descent picking
// any forking extension whose own rank is one less.
std::vector<UthLink> build_chain(TheoryId theory, TypeDesc t, const SearchBudget& budget,
                                 int value, bool starred) {
  std::vector<UthLink> chain;
  while (value > 0) {
    bool found = false;
    for (auto& a : extension_candidates(theory, t)) {
      std::set<Elem> B = with_elems(t.base, {a});
      for (auto& q : realized_extensions(theory, t, B)) {
        ForkCert cert;
        if (!step_forks(theory, t, a, q, budget, starred, &cert)) continue;
        if (uth_value_rec(theory, q, budget, value - 1, starred).value != value - 1) continue;
        chain.push_back({q, t.base, cert});
        t = q;
        --value;
        found = true;
        break;
      }
      if (found) break;
    }
    if (!found)
      throw std::logic_error("rank chain reconstruction failed at " + t.iso->str() + " | " +
                             render_elem_set(t.base) + " | value " + std::to_string(value) +
                             (starred ? " starred" : ""));
  }
  return chain;
}

}  // namespace

std::pair<RankValue, RankTree> local_rank(TheoryId theory, const FormulaPtr& phi,
                                          const std::set<Elem>& base, const RankParams& params,
                                          int cap) {
  std::set<Elem> full = base;
  for (auto& e : literals_of(phi)) full.insert(e);
  std::set<Elem> seeds = full;
  for (auto& f : params.delta)
    for (auto& e : literals_of(f)) seeds.insert(e);
  for (auto& f : params.pi)
    for (auto& e : literals_of(f)) seeds.insert(e);

  LocalCtx ctx{theory, params, {}, theory_name(theory) + "|" + params_sig(params)};
  if (params.zvars.empty()) {
    ctx.ctuples = {{}};
  } else {
    std::vector<Elem> pool = witness_pool(theory, seeds, 1);
    ctx.ctuples = {{}};
    for (auto& zv : params.zvars) {
      std::vector<std::vector<Elem>> next;
      for (auto& tup : ctx.ctuples)
        for (auto& e : pool)
          if (e.sort == zv.sort) {
            next.push_back(tup);
            next.back().push_back(e);
          }
      ctx.ctuples = std::move(next);
    }
  }

  auto [value, tree] = rank_rec(ctx, phi, full, cap);
  RankValue rv;
  if (value < 0)
    rv = {RankValue::Kind::MinusInfinity, 0};
  else if (value >= cap)
    rv = {RankValue::Kind::AtLeast, cap};
  else
    rv = {RankValue::Kind::Finite, value};
  return {rv, *tree};
}

UthValue uth_rank(TheoryId theory, const TypeDesc& t, const SearchBudget& budget, int cap) {
  if (!satisfiable(theory, t.iso)) throw std::invalid_argument("inconsistent type");
  UthVal v = uth_value_rec(theory, t, budget, auto_cap(t, cap), false);
  return {v.value, v.capped, build_chain(theory, t, budget, v.value, false)};
}

UthValue uth_star_rank(TheoryId theory, const TypeDesc& t, const SearchBudget& budget, int cap) {
  if (!satisfiable(theory, t.iso)) throw std::invalid_argument("inconsistent type");
  UthVal v = uth_value_rec(theory, t, budget, auto_cap(t, cap), true);
  return {v.value, v.capped, build_chain(theory, t, budget, v.value, true)};
}

LascarResult lascar_check(TheoryId theory, const std::vector<Elem>& a,
                          const std::vector<Elem>& b, const std::set<Elem>& base,
                          const SearchBudget& budget) {
  std::vector<Elem> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  std::set<Elem> baseb = with_elems(base, b);
  int left = uth_rank(theory, type_of(theory, a, baseb), budget).value;
  int right = uth_rank(theory, type_of(theory, b, base), budget).value;
  LascarResult r;
  r.lhs = left + right;
  r.mid = uth_rank(theory, type_of(theory, ab, base), budget).value;
  r.rhs = left + right;  // natural sum of finite ordinals
  r.holds = r.lhs <= r.mid && r.mid <= r.rhs;
  return r;
}

bool verify_rank_tree(TheoryId theory, const RankTree& tree, const RankParams& params) {
  if (!satisfiable(theory, tree.phi)) return false;
  if (!tree.step) return true;
  const RankStep& s = *tree.step;
  if (s.delta_idx >= params.delta.size() || s.pi_idx >= params.pi.size()) return false;
  FormulaPtr pic = substitute(params.pi[s.pi_idx], tuple_binding(params.zvars, s.c));
  Family fam{theory, params.delta[s.delta_idx], params.xvars, params.yvars, pic};
  if (!k_inconsistent(fam, params.k)) return false;
  if (!s.q.non_algebraic) return false;
  if (!decide(theory, substitute(s.q.iso, tuple_binding(s.q.vars, s.a)))) return false;
  if (!tree.child) return false;
  FormulaPtr expected =
      f_and2(tree.phi, substitute(params.delta[s.delta_idx], tuple_binding(params.yvars, s.a)));
  if (!struct_eq(tree.child->phi, expected)) return false;
  return verify_rank_tree(theory, *tree.child, params);
}

bool verify_uth_chain(TheoryId theory, const TypeDesc& t, const UthValue& v) {
  if ((int)v.chain.size() != v.value) return false;
  const TypeDesc* prev = &t;
  for (auto& link : v.chain) {
    if (!extends(theory, link.q, *prev)) return false;
    if (!link.cert.disjuncts.empty() &&
        !verify_fork(theory, link.q.iso, link.q.vars, link.cert))
      return false;
    prev = &link.q;
  }
  return true;
}

void clear_rank_cache() {
  std::lock_guard lock(rank_mutex);
  local_cache.clear();
  uth_cache.clear();
}

}  // namespace thornlab
