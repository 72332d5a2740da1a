#include "thornlab/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace thornlab {

std::string theory_name(TheoryId t) {
  switch (t) {
    case TheoryId::EQ: return "eq";
    case TheoryId::DLO: return "dlo";
    case TheoryId::EREL: return "erel";
  }
  return "?";
}

TheoryId theory_from_name(const std::string& s) {
  if (s == "eq") return TheoryId::EQ;
  if (s == "dlo") return TheoryId::DLO;
  if (s == "erel") return TheoryId::EREL;
  throw std::invalid_argument("unknown theory: " + s);
}

std::string Elem::str() const {
  switch (theory) {
    case TheoryId::EQ: return "#" + std::to_string(a);
    case TheoryId::DLO: return rat().str();
    case TheoryId::EREL:
      if (sort == Sort::Class) return "@" + std::to_string(a);
      return std::to_string(a) + "." + std::to_string(b);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Terms

Term Term::cl_of(Term inner) {
  if (inner.sort() != Sort::Elem) throw std::invalid_argument("cl applied to non-element term");
  if (inner.kind == Kind::Literal) return Term::literal(inner.lit.cl());
  Term t;
  t.kind = Kind::Cl;
  t.arg = std::make_shared<const Term>(std::move(inner));
  return t;
}

std::string Term::str() const {
  switch (kind) {
    case Kind::Variable: return var.name;
    case Kind::Literal: return lit.str();
    case Kind::Cl: return "cl(" + arg->str() + ")";
  }
  return "?";
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Variable: return a.var == b.var;
    case Term::Kind::Literal: return a.lit == b.lit;
    case Term::Kind::Cl: return *a.arg == *b.arg;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Constructors

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

bool is_ground(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable: return false;
    case Term::Kind::Literal: return true;
    case Term::Kind::Cl: return is_ground(*t.arg);
  }
  return false;
}

Elem eval_ground(const Term& t) {
  if (t.kind == Term::Kind::Literal) return t.lit;
  return eval_ground(*t.arg).cl();
}

}  // namespace

FormulaPtr f_true() {
  static FormulaPtr t = make({.kind = Formula::Kind::True});
  return t;
}

FormulaPtr f_false() {
  static FormulaPtr f = make({.kind = Formula::Kind::False});
  return f;
}

FormulaPtr f_bool(bool b) { return b ? f_true() : f_false(); }

FormulaPtr f_eq(Term a, Term b) {
  if (a.sort() != b.sort()) throw std::invalid_argument("equality between different sorts: " + a.str() + " = " + b.str());
  if (is_ground(a) && is_ground(b)) return f_bool(eval_ground(a) == eval_ground(b));
  if (a == b) return f_true();
  Formula f;
  f.kind = Formula::Kind::Eq;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

FormulaPtr f_less(Term a, Term b) {
  if (a.sort() != Sort::Elem || b.sort() != Sort::Elem) throw std::invalid_argument("< requires element terms");
  if (is_ground(a) && is_ground(b)) return f_bool(eval_ground(a).rat() < eval_ground(b).rat());
  if (a == b) return f_false();
  Formula f;
  f.kind = Formula::Kind::Less;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

FormulaPtr f_not(FormulaPtr a) {
  if (a->kind == Formula::Kind::True) return f_false();
  if (a->kind == Formula::Kind::False) return f_true();
  if (a->kind == Formula::Kind::Not) return a->kids[0];
  Formula f;
  f.kind = Formula::Kind::Not;
  f.kids = {std::move(a)};
  return make(std::move(f));
}

static FormulaPtr nary(Formula::Kind kind, std::vector<FormulaPtr> kids) {
  const bool conj = kind == Formula::Kind::And;
  const FormulaPtr unit = conj ? f_true() : f_false();
  const FormulaPtr zero = conj ? f_false() : f_true();
  std::vector<FormulaPtr> flat;
  std::vector<std::string> seen;
  for (auto& k : kids) {
    std::vector<FormulaPtr> parts = (k->kind == kind) ? k->kids : std::vector<FormulaPtr>{k};
    for (auto& p : parts) {
      if (p->kind == zero->kind) return zero;
      if (p->kind == unit->kind) continue;
      std::string s = p->str();
      if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
      seen.push_back(std::move(s));
      flat.push_back(p);
    }
  }
  if (flat.empty()) return unit;
  if (flat.size() == 1) return flat[0];
  Formula f;
  f.kind = kind;
  f.kids = std::move(flat);
  return make(std::move(f));
}

FormulaPtr f_and(std::vector<FormulaPtr> kids) { return nary(Formula::Kind::And, std::move(kids)); }
FormulaPtr f_or(std::vector<FormulaPtr> kids) { return nary(Formula::Kind::Or, std::move(kids)); }
FormulaPtr f_and2(FormulaPtr a, FormulaPtr b) { return f_and({std::move(a), std::move(b)}); }
FormulaPtr f_or2(FormulaPtr a, FormulaPtr b) { return f_or({std::move(a), std::move(b)}); }

FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Formula::Kind::True) return b;
  if (a->kind == Formula::Kind::False) return f_true();
  if (b->kind == Formula::Kind::True) return f_true();
  Formula f;
  f.kind = Formula::Kind::Implies;
  f.kids = {std::move(a), std::move(b)};
  return make(std::move(f));
}

static FormulaPtr quantifier(Formula::Kind kind, Var v, FormulaPtr body) {
  if (body->kind == Formula::Kind::True || body->kind == Formula::Kind::False) return body;
  if (!free_vars(body).contains(v)) return body;
  Formula f;
  f.kind = kind;
  f.qvar = std::move(v);
  f.kids = {std::move(body)};
  return make(std::move(f));
}

FormulaPtr f_exists(Var v, FormulaPtr body) { return quantifier(Formula::Kind::Exists, std::move(v), std::move(body)); }
FormulaPtr f_forall(Var v, FormulaPtr body) { return quantifier(Formula::Kind::Forall, std::move(v), std::move(body)); }

bool struct_eq(const FormulaPtr& a, const FormulaPtr& b) { return a->str() == b->str(); }

// ---------------------------------------------------------------------------
// Rendering.  Precedence: quantifier 0 < "->" 1 < "|" 2 < "&" 3 < "!" 4 < atom.

namespace {

int prec(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 0;
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not: return 4;
    default: return 5;
  }
}

void render(const Formula& f, int min_prec, std::string& out) {
  const bool parens = prec(f) < min_prec;
  if (parens) out += "(";
  switch (f.kind) {
    case Formula::Kind::True: out += "true"; break;
    case Formula::Kind::False: out += "false"; break;
    case Formula::Kind::Eq: out += f.lhs.str() + " = " + f.rhs.str(); break;
    case Formula::Kind::Less: out += f.lhs.str() + " < " + f.rhs.str(); break;
    case Formula::Kind::Not:
      out += "!";
      render(*f.kids[0], 4, out);
      break;
    case Formula::Kind::And:
      for (size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += " & ";
        render(*f.kids[i], 4, out);
      }
      break;
    case Formula::Kind::Or:
      for (size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += " | ";
        render(*f.kids[i], 3, out);
      }
      break;
    case Formula::Kind::Implies:
      render(*f.kids[0], 2, out);
      out += " -> ";
      render(*f.kids[1], 1, out);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out += f.kind == Formula::Kind::Exists ? "exists " : "forall ";
      out += f.qvar.name;
      out += ". ";
      render(*f.kids[0], 0, out);
      break;
  }
  if (parens) out += ")";
}

}  // namespace

std::string Formula::str() const {
  std::string out;
  render(*this, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Traversals

static void term_vars(const Term& t, std::set<Var>& out) {
  switch (t.kind) {
    case Term::Kind::Variable: out.insert(t.var); break;
    case Term::Kind::Literal: break;
    case Term::Kind::Cl: term_vars(*t.arg, out); break;
  }
}

static void collect_free(const Formula& f, std::set<Var> bound, std::set<Var>& out) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Less: {
      std::set<Var> vs;
      term_vars(f.lhs, vs);
      term_vars(f.rhs, vs);
      for (auto& v : vs)
        if (!bound.contains(v)) out.insert(v);
      break;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      bound.insert(f.qvar);
      collect_free(*f.kids[0], bound, out);
      break;
    default:
      for (auto& k : f.kids) collect_free(*k, bound, out);
  }
}

std::set<Var> free_vars(const FormulaPtr& f) {
  std::set<Var> out;
  collect_free(*f, {}, out);
  return out;
}

static void term_literals(const Term& t, std::set<Elem>& out) {
  switch (t.kind) {
    case Term::Kind::Literal: out.insert(t.lit); break;
    case Term::Kind::Cl: term_literals(*t.arg, out); break;
    default: break;
  }
}

static void collect_literals(const Formula& f, std::set<Elem>& out) {
  if (f.kind == Formula::Kind::Eq || f.kind == Formula::Kind::Less) {
    term_literals(f.lhs, out);
    term_literals(f.rhs, out);
  }
  for (auto& k : f.kids) collect_literals(*k, out);
}

std::set<Elem> literals_of(const FormulaPtr& f) {
  std::set<Elem> out;
  collect_literals(*f, out);
  return out;
}

bool is_quantifier_free(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) return false;
  for (auto& k : f->kids)
    if (!is_quantifier_free(k)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Substitution

Term substitute(const Term& t, const std::map<Var, Term>& binding) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      auto it = binding.find(t.var);
      if (it == binding.end()) return t;
      if (it->second.sort() != t.var.sort) throw std::invalid_argument("sort mismatch substituting " + t.var.name);
      return it->second;
    }
    case Term::Kind::Literal: return t;
    case Term::Kind::Cl: return Term::cl_of(substitute(*t.arg, binding));
  }
  return t;
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<Var, Term>& binding) {
  if (binding.empty()) return f;
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Eq: return f_eq(substitute(f->lhs, binding), substitute(f->rhs, binding));
    case Formula::Kind::Less: return f_less(substitute(f->lhs, binding), substitute(f->rhs, binding));
    case Formula::Kind::Not: return f_not(substitute(f->kids[0], binding));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (auto& k : f->kids) kids.push_back(substitute(k, binding));
      return f->kind == Formula::Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case Formula::Kind::Implies:
      return f_implies(substitute(f->kids[0], binding), substitute(f->kids[1], binding));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::map<Var, Term> inner = binding;
      inner.erase(f->qvar);
      if (inner.empty()) return f;
      // rename the bound variable if some replacement term would capture it
      std::set<Var> incoming;
      for (auto& [v, t] : inner) {
        std::set<Var> vs;
        term_vars(t, vs);
        incoming.insert(vs.begin(), vs.end());
      }
      Var qv = f->qvar;
      FormulaPtr body = f->kids[0];
      if (incoming.contains(qv)) {
        std::set<Var> taken = free_vars(body);
        taken.insert(incoming.begin(), incoming.end());
        int i = 1;
        Var fresh{qv.name + std::to_string(i), qv.sort};
        while (taken.contains(fresh)) fresh.name = qv.name + std::to_string(++i);
        body = substitute(body, {{qv, Term::variable(fresh)}});
        qv = fresh;
      }
      FormulaPtr nb = substitute(body, inner);
      return f->kind == Formula::Kind::Exists ? f_exists(qv, nb) : f_forall(qv, nb);
    }
  }
  return f;
}

static Term replace_in_term(const Term& t, const Elem& e, const Term& v) {
  switch (t.kind) {
    case Term::Kind::Literal: return t.lit == e ? v : t;
    case Term::Kind::Cl: return Term::cl_of(replace_in_term(*t.arg, e, v));
    default: return t;
  }
}

FormulaPtr replace_literal(const FormulaPtr& f, const Elem& e, const Term& v) {
  switch (f->kind) {
    case Formula::Kind::Eq: return f_eq(replace_in_term(f->lhs, e, v), replace_in_term(f->rhs, e, v));
    case Formula::Kind::Less: return f_less(replace_in_term(f->lhs, e, v), replace_in_term(f->rhs, e, v));
    case Formula::Kind::Not: return f_not(replace_literal(f->kids[0], e, v));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(replace_literal(k, e, v));
      return f->kind == Formula::Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case Formula::Kind::Implies:
      return f_implies(replace_literal(f->kids[0], e, v), replace_literal(f->kids[1], e, v));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      FormulaPtr body = replace_literal(f->kids[0], e, v);
      return f->kind == Formula::Kind::Exists ? f_exists(f->qvar, body) : f_forall(f->qvar, body);
    }
    default: return f;
  }
}

FormulaPtr replace_literal(const FormulaPtr& f, const Elem& e, const Var& v) {
  return replace_literal(f, e, Term::variable(v));
}

static void collect_vars(const Term& t, std::map<std::string, char>& out) {
  switch (t.kind) {
    case Term::Kind::Variable: out[t.var.name] = t.var.sort == Sort::Class ? 'c' : 'e'; break;
    case Term::Kind::Cl: collect_vars(*t.arg, out); break;
    default: break;
  }
}

static void collect_vars(const FormulaPtr& f, std::map<std::string, char>& out) {
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Less:
      collect_vars(f->lhs, out);
      collect_vars(f->rhs, out);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out[f->qvar.name] = f->qvar.sort == Sort::Class ? 'c' : 'e';
      [[fallthrough]];
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      for (auto& k : f->kids) collect_vars(k, out);
      break;
    default: break;
  }
}

std::string sort_sig(const FormulaPtr& f) {
  std::map<std::string, char> vars;
  collect_vars(f, vars);
  std::string s;
  for (auto& [name, sort] : vars) {
    if (sort == 'e') continue;  // element is the default; record only classes
    s += name;
    s += ':';
    s += sort;
    s += ' ';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Ground evaluation

Elem eval_term(const Term& t, const std::map<Var, Elem>& env) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      auto it = env.find(t.var);
      if (it == env.end()) throw std::invalid_argument("unassigned variable " + t.var.name);
      return it->second;
    }
    case Term::Kind::Literal: return t.lit;
    case Term::Kind::Cl: return eval_term(*t.arg, env).cl();
  }
  throw std::logic_error("bad term");
}

bool eval_qf(const FormulaPtr& f, const std::map<Var, Elem>& env) {
  switch (f->kind) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Eq: return eval_term(f->lhs, env) == eval_term(f->rhs, env);
    case Formula::Kind::Less: return eval_term(f->lhs, env).rat() < eval_term(f->rhs, env).rat();
    case Formula::Kind::Not: return !eval_qf(f->kids[0], env);
    case Formula::Kind::And:
      for (auto& k : f->kids)
        if (!eval_qf(k, env)) return false;
      return true;
    case Formula::Kind::Or:
      for (auto& k : f->kids)
        if (eval_qf(k, env)) return true;
      return false;
    case Formula::Kind::Implies: return !eval_qf(f->kids[0], env) || eval_qf(f->kids[1], env);
    default: throw std::invalid_argument("eval_qf on quantified formula");
  }
}

}  // namespace thornlab
