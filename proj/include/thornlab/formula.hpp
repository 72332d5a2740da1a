#ifndef THORNLAB_FORMULA_HPP
#define THORNLAB_FORMULA_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "thornlab/element.hpp"

namespace thornlab {

struct Var {
  std::string name;
  Sort sort = Sort::Elem;
  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var&, const Var&) = default;
};

// Term := variable | element literal | cl(term).  `cl` is the class
// projection of EREL and the only function symbol in any signature.
struct Term {
  enum class Kind { Variable, Literal, Cl };
  Kind kind = Kind::Variable;
  Var var;
  Elem lit;
  std::shared_ptr<const Term> arg;

  static Term variable(Var v) { Term t; t.kind = Kind::Variable; t.var = std::move(v); return t; }
  static Term literal(Elem e) { Term t; t.kind = Kind::Literal; t.lit = e; return t; }
  static Term cl_of(Term inner);  // folds cl(literal) to a class literal

  Sort sort() const {
    switch (kind) {
      case Kind::Variable: return var.sort;
      case Kind::Literal: return lit.sort;
      case Kind::Cl: return Sort::Class;
    }
    return Sort::Elem;
  }
  bool is_var(const Var& v) const { return kind == Kind::Variable && var == v; }

  std::string str() const;
  friend bool operator==(const Term& a, const Term& b);
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable AST. And/Or are n-ary and kept flattened; Implies is binary;
// quantifiers bind a single sorted variable.
struct Formula {
  enum class Kind { True, False, Eq, Less, Not, And, Or, Implies, Exists, Forall };
  Kind kind = Kind::True;
  Term lhs, rhs;                   // Eq, Less
  std::vector<FormulaPtr> kids;    // Not:1  Implies:2  And/Or:n  quantifier body:1
  Var qvar;

  std::string str() const;  // canonical rendering
};

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_eq(Term a, Term b);
FormulaPtr f_less(Term a, Term b);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(std::vector<FormulaPtr> kids);   // flattens, drops "true", absorbs "false"
FormulaPtr f_or(std::vector<FormulaPtr> kids);    // dual
FormulaPtr f_and2(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or2(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(Var v, FormulaPtr body);
FormulaPtr f_forall(Var v, FormulaPtr body);
FormulaPtr f_bool(bool b);

bool struct_eq(const FormulaPtr& a, const FormulaPtr& b);

std::set<Var> free_vars(const FormulaPtr& f);
std::set<Elem> literals_of(const FormulaPtr& f);
bool is_quantifier_free(const FormulaPtr& f);

// Capture-avoiding substitution of free variables.
FormulaPtr substitute(const FormulaPtr& f, const std::map<Var, Term>& binding);
Term substitute(const Term& t, const std::map<Var, Term>& binding);

// Replaces every occurrence of an element literal by a variable.
FormulaPtr replace_literal(const FormulaPtr& f, const Elem& e, const Var& v);
FormulaPtr replace_literal(const FormulaPtr& f, const Elem& e, const Term& repl);

// Compact sort signature of every variable (free or bound) in f.  Renderings
// do not show sorts, so any cache keyed on str() must append this to keep
// same-named variables of different sorts apart.
std::string sort_sig(const FormulaPtr& f);

// Truth value of a quantifier-free formula under a total assignment.
bool eval_qf(const FormulaPtr& f, const std::map<Var, Elem>& env);
Elem eval_term(const Term& t, const std::map<Var, Elem>& env);

// The fixed language of one theory; gates which atoms the parser accepts.
struct Signature {
  TheoryId theory;
  std::vector<std::string> sorts;
  bool has_less = false;   // DLO
  bool has_cl = false;     // EREL (cl function and E relation)
  static const Signature& of(TheoryId t);
};

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(std::string msg, size_t p) : std::runtime_error(std::move(msg)), pos(p) {}
};

// Parses the concrete grammar; infers variable sorts (defaulting to the
// element sort), desugars E(s,t) to cl(s) = cl(t) and multi-variable
// quantifier prefixes to nested single-variable quantifiers.
FormulaPtr parse(const std::string& text, const Signature& sig);
FormulaPtr parse(const std::string& text, TheoryId theory);
Elem parse_element(const std::string& text, TheoryId theory);
std::vector<Elem> parse_element_list(const std::string& text, TheoryId theory);

}  // namespace thornlab

#endif
