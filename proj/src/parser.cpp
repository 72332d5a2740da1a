#include <cctype>
#include <functional>
#include <optional>

#include "thornlab/formula.hpp"

namespace thornlab {

const Signature& Signature::of(TheoryId t) {
  static const Signature eq{TheoryId::EQ, {"elem"}, false, false};
  static const Signature dlo{TheoryId::DLO, {"elem"}, true, false};
  static const Signature erel{TheoryId::EREL, {"elem", "class"}, false, true};
  switch (t) {
    case TheoryId::EQ: return eq;
    case TheoryId::DLO: return dlo;
    case TheoryId::EREL: return erel;
  }
  return eq;
}

namespace {

struct Token {
  enum class Kind { Ident, KwExists, KwForall, KwTrue, KwFalse, KwCl, KwE, LParen, RParen, Comma, Dot, Eq, Less, Bang, Amp, Bar, Arrow, Literal, End };
  Kind kind;
  std::string text;
  Elem lit;
  size_t pos;
};

class Lexer {
 public:
  Lexer(const std::string& s, TheoryId theory) : s_(s), theory_(theory) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    size_t start = i_;
    if (i_ >= s_.size()) {
      tok_ = {Token::Kind::End, "", {}, start};
      return;
    }
    char c = s_[i_];
    auto sym = [&](Token::Kind k, size_t len) {
      tok_ = {k, s_.substr(i_, len), {}, start};
      i_ += len;
    };
    switch (c) {
      case '(': return sym(Token::Kind::LParen, 1);
      case ')': return sym(Token::Kind::RParen, 1);
      case ',': return sym(Token::Kind::Comma, 1);
      case '.': return sym(Token::Kind::Dot, 1);
      case '=': return sym(Token::Kind::Eq, 1);
      case '<': return sym(Token::Kind::Less, 1);
      case '!': return sym(Token::Kind::Bang, 1);
      case '&': return sym(Token::Kind::Amp, 1);
      case '|': return sym(Token::Kind::Bar, 1);
      default: break;
    }
    if (c == '-') {
      if (i_ + 1 < s_.size() && s_[i_ + 1] == '>') return sym(Token::Kind::Arrow, 2);
      if (theory_ == TheoryId::DLO && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) return lex_number(start);
      throw ParseError("unexpected '-'", start);
    }
    if (c == '#') {
      if (theory_ != TheoryId::EQ) throw ParseError("'#' literal outside EQ", start);
      ++i_;
      tok_ = {Token::Kind::Literal, "", Elem::eq_nat(lex_nat(start)), start};
      return;
    }
    if (c == '@') {
      if (theory_ != TheoryId::EREL) throw ParseError("'@' literal outside EREL", start);
      ++i_;
      tok_ = {Token::Kind::Literal, "", Elem::erel_class(lex_nat(start)), start};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(start);
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      std::string w = s_.substr(i_, j - i_);
      i_ = j;
      if (w == "exists") tok_ = {Token::Kind::KwExists, w, {}, start};
      else if (w == "forall") tok_ = {Token::Kind::KwForall, w, {}, start};
      else if (w == "true") tok_ = {Token::Kind::KwTrue, w, {}, start};
      else if (w == "false") tok_ = {Token::Kind::KwFalse, w, {}, start};
      else if (w == "cl") tok_ = {Token::Kind::KwCl, w, {}, start};
      else if (w == "E") tok_ = {Token::Kind::KwE, w, {}, start};
      else if (std::islower(static_cast<unsigned char>(w[0]))) tok_ = {Token::Kind::Ident, w, {}, start};
      else throw ParseError("bad identifier '" + w + "'", start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  long long lex_nat(size_t at) {
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) throw ParseError("digit expected", at);
    long long n = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) n = n * 10 + (s_[i_++] - '0');
    return n;
  }

  void lex_number(size_t start) {
    bool neg = false;
    if (s_[i_] == '-') {
      neg = true;
      ++i_;
    }
    long long a = lex_nat(start);
    if (theory_ == TheoryId::DLO) {
      long long d = 1;
      if (i_ < s_.size() && s_[i_] == '/') {
        ++i_;
        d = lex_nat(start);
      }
      tok_ = {Token::Kind::Literal, "", Elem::dlo_rat(Rational(neg ? -a : a, d)), start};
      return;
    }
    if (theory_ == TheoryId::EREL) {
      if (neg) throw ParseError("negative EREL literal", start);
      if (i_ >= s_.size() || s_[i_] != '.') throw ParseError("EREL element literal must be 'n.m'", start);
      ++i_;
      long long m = lex_nat(start);
      tok_ = {Token::Kind::Literal, "", Elem::erel_pair(a, m), start};
      return;
    }
    throw ParseError("numeric literal outside DLO/EREL (EQ elements are written #n)", start);
  }

  const std::string& s_;
  TheoryId theory_;
  size_t i_ = 0;
  Token tok_;
};

// Sort inference over variable names: union-find with optional concrete sort
// per group.  EREL is the only theory where anything is at stake.
class SortSolver {
 public:
  void require(const std::string& name, Sort s, size_t pos) {
    auto& g = group(find(name));
    if (g.sort && *g.sort != s) throw ParseError("sort error: variable '" + name + "' used at both sorts", pos);
    g.sort = s;
  }
  void unify(const std::string& a, const std::string& b, size_t pos) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return;
    auto& ga = group(ra);
    auto& gb = group(rb);
    if (ga.sort && gb.sort && *ga.sort != *gb.sort) throw ParseError("sort error: '" + a + "' and '" + b + "' compared across sorts", pos);
    if (gb.sort && !ga.sort) ga.sort = gb.sort;
    parent_[rb] = ra;
  }
  Sort sort_of(const std::string& name) {
    auto& g = group(find(name));
    return g.sort.value_or(Sort::Elem);
  }

 private:
  struct Group { std::optional<Sort> sort; };
  std::string find(const std::string& n) {
    auto it = parent_.find(n);
    if (it == parent_.end() || it->second == n) {
      parent_[n] = n;
      return n;
    }
    std::string r = find(it->second);
    parent_[n] = r;
    return r;
  }
  Group& group(const std::string& root) { return groups_[root]; }
  std::map<std::string, std::string> parent_;
  std::map<std::string, Group> groups_;
};

// First pass builds an untyped AST mirror; the sort solver then assigns every
// variable name a sort and the tree is rebuilt with typed Vars.
struct PTerm {
  enum class Kind { Var, Lit, Cl };
  Kind kind;
  std::string name;
  Elem lit;
  std::shared_ptr<PTerm> arg;
  size_t pos;
};

struct PNode {
  enum class Kind { True, False, Eq, Less, E, Not, And, Or, Implies, Exists, Forall };
  Kind kind;
  PTerm lhs, rhs;
  std::vector<std::shared_ptr<PNode>> kids;
  std::vector<std::string> qvars;
  size_t pos;
};
using PNodePtr = std::shared_ptr<PNode>;

class Parser {
 public:
  Parser(const std::string& text, const Signature& sig) : sig_(sig), lex_(text, sig.theory) {}

  FormulaPtr run() {
    PNodePtr root = formula();
    if (lex_.peek().kind != Token::Kind::End) throw ParseError("trailing input", lex_.peek().pos);
    infer(*root);
    return build(*root);
  }

 private:
  PNodePtr node(PNode n) { return std::make_shared<PNode>(std::move(n)); }

  PNodePtr formula() {
    auto k = lex_.peek().kind;
    if (k == Token::Kind::KwExists || k == Token::Kind::KwForall) {
      size_t pos = lex_.peek().pos;
      bool ex = k == Token::Kind::KwExists;
      lex_.take();
      std::vector<std::string> vars;
      vars.push_back(expect_ident());
      while (lex_.peek().kind == Token::Kind::Comma) {
        lex_.take();
        vars.push_back(expect_ident());
      }
      expect(Token::Kind::Dot, "'.'");
      PNode n;
      n.kind = ex ? PNode::Kind::Exists : PNode::Kind::Forall;
      n.qvars = std::move(vars);
      n.kids = {formula()};
      n.pos = pos;
      return node(std::move(n));
    }
    return impl();
  }

  PNodePtr impl() {
    PNodePtr a = disj();
    if (lex_.peek().kind == Token::Kind::Arrow) {
      size_t pos = lex_.take().pos;
      PNode n;
      n.kind = PNode::Kind::Implies;
      n.kids = {a, impl()};
      n.pos = pos;
      return node(std::move(n));
    }
    return a;
  }

  PNodePtr disj() {
    PNodePtr a = conj();
    if (lex_.peek().kind != Token::Kind::Bar) return a;
    PNode n;
    n.kind = PNode::Kind::Or;
    n.kids = {a};
    n.pos = lex_.peek().pos;
    while (lex_.peek().kind == Token::Kind::Bar) {
      lex_.take();
      n.kids.push_back(conj());
    }
    return node(std::move(n));
  }

  PNodePtr conj() {
    PNodePtr a = lit();
    if (lex_.peek().kind != Token::Kind::Amp) return a;
    PNode n;
    n.kind = PNode::Kind::And;
    n.kids = {a};
    n.pos = lex_.peek().pos;
    while (lex_.peek().kind == Token::Kind::Amp) {
      lex_.take();
      n.kids.push_back(lit());
    }
    return node(std::move(n));
  }

  PNodePtr lit() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::Bang: {
        size_t pos = lex_.take().pos;
        PNode n;
        n.kind = PNode::Kind::Not;
        n.kids = {lit()};
        n.pos = pos;
        return node(std::move(n));
      }
      case Token::Kind::LParen: {
        lex_.take();
        PNodePtr f = formula();
        expect(Token::Kind::RParen, "')'");
        return f;
      }
      case Token::Kind::KwTrue: {
        size_t pos = lex_.take().pos;
        PNode n;
        n.kind = PNode::Kind::True;
        n.pos = pos;
        return node(std::move(n));
      }
      case Token::Kind::KwFalse: {
        size_t pos = lex_.take().pos;
        PNode n;
        n.kind = PNode::Kind::False;
        n.pos = pos;
        return node(std::move(n));
      }
      case Token::Kind::KwE: {
        if (!sig_.has_cl) throw ParseError("relation E is not in the " + theory_name(sig_.theory) + " signature", t.pos);
        size_t pos = lex_.take().pos;
        expect(Token::Kind::LParen, "'('");
        PTerm a = term();
        expect(Token::Kind::Comma, "','");
        PTerm b = term();
        expect(Token::Kind::RParen, "')'");
        PNode n;
        n.kind = PNode::Kind::E;
        n.lhs = std::move(a);
        n.rhs = std::move(b);
        n.pos = pos;
        return node(std::move(n));
      }
      default: return atom();
    }
  }

  PNodePtr atom() {
    size_t pos = lex_.peek().pos;
    PTerm a = term();
    const Token& op = lex_.peek();
    PNode n;
    n.pos = pos;
    if (op.kind == Token::Kind::Eq) {
      lex_.take();
      n.kind = PNode::Kind::Eq;
    } else if (op.kind == Token::Kind::Less) {
      if (!sig_.has_less) throw ParseError("relation < is not in the " + theory_name(sig_.theory) + " signature", op.pos);
      lex_.take();
      n.kind = PNode::Kind::Less;
    } else {
      throw ParseError("'=' or '<' expected", op.pos);
    }
    n.lhs = std::move(a);
    n.rhs = term();
    return node(std::move(n));
  }

  PTerm term() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::Ident: {
        Token tk = lex_.take();
        return {PTerm::Kind::Var, tk.text, {}, nullptr, tk.pos};
      }
      case Token::Kind::Literal: {
        Token tk = lex_.take();
        return {PTerm::Kind::Lit, "", tk.lit, nullptr, tk.pos};
      }
      case Token::Kind::KwCl: {
        if (!sig_.has_cl) throw ParseError("function cl is not in the " + theory_name(sig_.theory) + " signature", t.pos);
        size_t pos = lex_.take().pos;
        expect(Token::Kind::LParen, "'('");
        PTerm inner = term();
        expect(Token::Kind::RParen, "')'");
        PTerm out{PTerm::Kind::Cl, "", {}, std::make_shared<PTerm>(std::move(inner)), pos};
        return out;
      }
      default: throw ParseError("term expected", t.pos);
    }
  }

  std::string expect_ident() {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Ident) throw ParseError("variable expected", t.pos);
    return lex_.take().text;
  }

  void expect(Token::Kind k, const std::string& what) {
    if (lex_.peek().kind != k) throw ParseError(what + " expected", lex_.peek().pos);
    lex_.take();
  }

  // --- sort inference -----------------------------------------------------

  std::optional<Sort> term_sort(const PTerm& t) {
    switch (t.kind) {
      case PTerm::Kind::Var: return std::nullopt;
      case PTerm::Kind::Lit: return t.lit.sort;
      case PTerm::Kind::Cl:
        if (t.arg->kind == PTerm::Kind::Var) solver_.require(t.arg->name, Sort::Elem, t.pos);
        else constrain_term(*t.arg, Sort::Elem);
        return Sort::Class;
    }
    return std::nullopt;
  }

  void constrain_term(const PTerm& t, Sort s) {
    if (t.kind == PTerm::Kind::Var) solver_.require(t.name, s, t.pos);
    else if (auto ts = term_sort(t); ts && *ts != s) throw ParseError("sort error at term " + render_pterm(t), t.pos);
  }

  static std::string render_pterm(const PTerm& t) {
    switch (t.kind) {
      case PTerm::Kind::Var: return t.name;
      case PTerm::Kind::Lit: return t.lit.str();
      case PTerm::Kind::Cl: return "cl(" + render_pterm(*t.arg) + ")";
    }
    return "?";
  }

  void infer(const PNode& n) {
    switch (n.kind) {
      case PNode::Kind::Eq: {
        auto ls = term_sort(n.lhs);
        auto rs = term_sort(n.rhs);
        if (ls && rs && *ls != *rs) throw ParseError("sort error: '=' across sorts", n.pos);
        if (ls) constrain_term(n.rhs, *ls);
        else if (rs) constrain_term(n.lhs, *rs);
        else if (n.lhs.kind == PTerm::Kind::Var && n.rhs.kind == PTerm::Kind::Var)
          solver_.unify(n.lhs.name, n.rhs.name, n.pos);
        break;
      }
      case PNode::Kind::Less:
        constrain_term(n.lhs, Sort::Elem);
        constrain_term(n.rhs, Sort::Elem);
        break;
      case PNode::Kind::E:
        constrain_term(n.lhs, Sort::Elem);
        constrain_term(n.rhs, Sort::Elem);
        break;
      default:
        for (auto& k : n.kids) infer(*k);
    }
  }

  // --- typed rebuild ------------------------------------------------------

  Term build_term(const PTerm& t) {
    switch (t.kind) {
      case PTerm::Kind::Var: return Term::variable({t.name, solver_.sort_of(t.name)});
      case PTerm::Kind::Lit: return Term::literal(t.lit);
      case PTerm::Kind::Cl: return Term::cl_of(build_term(*t.arg));
    }
    throw std::logic_error("bad pterm");
  }

  FormulaPtr build(const PNode& n) {
    switch (n.kind) {
      case PNode::Kind::True: return f_true();
      case PNode::Kind::False: return f_false();
      case PNode::Kind::Eq: {
        Term a = build_term(n.lhs);
        Term b = build_term(n.rhs);
        if (a.sort() != b.sort()) throw ParseError("sort error: '=' across sorts", n.pos);
        return f_eq(std::move(a), std::move(b));
      }
      case PNode::Kind::Less: return f_less(build_term(n.lhs), build_term(n.rhs));
      case PNode::Kind::E: return f_eq(Term::cl_of(build_term(n.lhs)), Term::cl_of(build_term(n.rhs)));
      case PNode::Kind::Not: return f_not(build(*n.kids[0]));
      case PNode::Kind::And:
      case PNode::Kind::Or: {
        std::vector<FormulaPtr> kids;
        for (auto& k : n.kids) kids.push_back(build(*k));
        return n.kind == PNode::Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
      }
      case PNode::Kind::Implies: return f_implies(build(*n.kids[0]), build(*n.kids[1]));
      case PNode::Kind::Exists:
      case PNode::Kind::Forall: {
        FormulaPtr body = build(*n.kids[0]);
        for (auto it = n.qvars.rbegin(); it != n.qvars.rend(); ++it) {
          Var v{*it, solver_.sort_of(*it)};
          body = n.kind == PNode::Kind::Exists ? f_exists(v, body) : f_forall(v, body);
        }
        return body;
      }
    }
    throw std::logic_error("bad pnode");
  }

  const Signature& sig_;
  Lexer lex_;
  SortSolver solver_;
};

}  // namespace

FormulaPtr parse(const std::string& text, const Signature& sig) { return Parser(text, sig).run(); }
FormulaPtr parse(const std::string& text, TheoryId theory) { return parse(text, Signature::of(theory)); }

Elem parse_element(const std::string& text, TheoryId theory) {
  Lexer lex(text, theory);
  if (lex.peek().kind != Token::Kind::Literal) throw ParseError("element literal expected", lex.peek().pos);
  Token t = lex.take();
  if (lex.peek().kind != Token::Kind::End) throw ParseError("trailing input after element", lex.peek().pos);
  return t.lit;
}

std::vector<Elem> parse_element_list(const std::string& text, TheoryId theory) {
  std::vector<Elem> out;
  size_t start = 0;
  auto trimmed_empty = [](const std::string& s) {
    return s.find_first_not_of(" \t") == std::string::npos;
  };
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!trimmed_empty(piece)) out.push_back(parse_element(piece, theory));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace thornlab
