#include "thornlab/oracle.hpp"

#include <map>

namespace thornlab {

namespace {

std::set<Elem> distinct(const std::vector<Elem>& t) { return {t.begin(), t.end()}; }

// Coordinates of a carrying a degree of freedom over ctx (EQ and DLO, where
// the algebraic closure is the set itself).
int free_dim(const std::vector<Elem>& a, const std::set<Elem>& ctx) {
  int n = 0;
  for (auto& e : distinct(a))
    if (!ctx.count(e)) ++n;
  return n;
}

bool class_in_acl(long long cls, const std::set<Elem>& ctx) {
  for (auto& e : ctx)
    if (e.a == cls && (e.sort == Sort::Class || e.sort == Sort::Elem)) return true;
  return false;
}

// Per-coordinate EREL rank, derived from the forking chains of the
// two-sorted structure (infinitely many classes, each infinite):
//   - a class gamma outside acl(ctx) can first be fixed (the conjugates of
//     "cl-image equals gamma" over its generic type are pairwise disjoint),
//     and nothing else about it can fork afterwards: rank 1;
//   - an element e with fresh class has that chain available (fix the
//     class: rank drops to the in-class case) and then the singleton chain
//     (conjugates of "x equals e" over the in-class generic type are
//     disjoint): rank 2;
//   - an element whose class is already algebraic only has the singleton
//     chain left: rank 1;
//   - anything in acl(ctx) admits no non-algebraic conjugate family: rank 0.
int erel_coord_rank(const Elem& e, const std::set<Elem>& ctx) {
  if (e.sort == Sort::Class) return class_in_acl(e.a, ctx) ? 0 : 1;
  if (ctx.count(e)) return 0;
  return class_in_acl(e.a, ctx) ? 1 : 2;
}

// Total rank by additivity along the coordinates.
int erel_uth(const std::vector<Elem>& a, const std::set<Elem>& base) {
  std::set<Elem> ctx = base;
  int total = 0;
  for (auto& e : a) {
    total += erel_coord_rank(e, ctx);
    ctx.insert(e);
  }
  return total;
}

struct UnionFind {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& k) {
    auto it = parent.find(k);
    if (it == parent.end()) {
      parent[k] = k;
      return k;
    }
    if (it->second == k) return k;
    return parent[k] = find(it->second);
  }
  void unite(const std::string& a, const std::string& b) { parent[find(a)] = find(b); }
};

std::string term_key(const Term& t) {
  return t.kind == Term::Kind::Variable ? "v:" + t.var.name : "c:" + t.lit.str();
}

}  // namespace

bool oracle_indep(TheoryId theory, const std::vector<Elem>& a, const std::vector<Elem>& b,
                  const std::set<Elem>& base) {
  switch (theory) {
    case TheoryId::EQ:
    case TheoryId::DLO: {
      std::set<Elem> withb = base;
      withb.insert(b.begin(), b.end());
      return free_dim(a, withb) == free_dim(a, base);
    }
    case TheoryId::EREL: {
      std::set<Elem> withb = base;
      withb.insert(b.begin(), b.end());
      return erel_uth(a, withb) == erel_uth(a, base);
    }
  }
  throw std::logic_error("bad theory");
}

std::string oracle_indep_rule(TheoryId theory) {
  switch (theory) {
    case TheoryId::EQ: return "acl-disjointness";
    case TheoryId::DLO: return "dimension-preservation";
    case TheoryId::EREL: return "u-rank-preservation";
  }
  throw std::logic_error("bad theory");
}

int oracle_dim(const FormulaPtr& f, const std::vector<Var>& vars) {
  FormulaPtr qf = is_quantifier_free(f) ? f : qe(TheoryId::DLO, f);
  int best = -1;
  for (auto& cube : positive_dnf(TheoryId::DLO, qf)) {
    if (!decide(TheoryId::DLO, exists_closure(f_and(std::vector<FormulaPtr>(cube)), vars))) continue;
    UnionFind uf;
    for (auto& v : vars) uf.find("v:" + v.name);
    for (auto& lit : cube)
      if (lit->kind == Formula::Kind::Eq) uf.unite(term_key(lit->lhs), term_key(lit->rhs));
    std::set<std::string> pinned, cells;
    for (auto& [k, unused] : uf.parent)
      if (k[0] == 'c') pinned.insert(uf.find(k));
    for (auto& v : vars) {
      std::string root = uf.find("v:" + v.name);
      if (!pinned.count(root)) cells.insert(root);
    }
    best = std::max(best, (int)cells.size());
  }
  if (best < 0) throw std::invalid_argument("inconsistent formula");
  return best;
}

int oracle_uth(TheoryId theory, const TypeDesc& t) {
  switch (theory) {
    case TheoryId::DLO: return oracle_dim(t.iso, t.vars);
    case TheoryId::EQ: {
      std::vector<Elem> r = realize_type(theory, t, {});
      std::set<Elem> ctx = t.base;
      int total = 0;
      for (auto& e : r) {
        if (!ctx.count(e)) ++total;
        ctx.insert(e);
      }
      return total;
    }
    case TheoryId::EREL: return erel_uth(realize_type(theory, t, {}), t.base);
  }
  throw std::logic_error("bad theory");
}

}  // namespace thornlab
