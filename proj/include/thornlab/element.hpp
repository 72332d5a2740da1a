#ifndef THORNLAB_ELEMENT_HPP
#define THORNLAB_ELEMENT_HPP

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace thornlab {

enum class TheoryId { EQ, DLO, EREL };

std::string theory_name(TheoryId t);
TheoryId theory_from_name(const std::string& s);

// EREL is two-sorted; EQ and DLO only use Sort::Elem.
enum class Sort { Elem, Class };

// Exact rational, always normalized with positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) { normalize(); }
  explicit Rational(long long n) : num(n), den(1) {}

  void normalize() {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational operator/(Rational a, long long k) { return {a.num, a.den * k}; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    // cross-multiplication is safe at the magnitudes this library produces
    return a.num * b.den <=> b.num * a.den;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// One element of a canonical model.
//   EQ        : natural number n              -> "#n"
//   DLO       : rational q                    -> "q"
//   EREL elem : pair (class index, member)    -> "i.j"
//   EREL class: class index n                 -> "@n"
struct Elem {
  TheoryId theory = TheoryId::EQ;
  Sort sort = Sort::Elem;
  long long a = 0;  // EQ value / DLO numerator / EREL class index
  long long b = 1;  // DLO denominator / EREL member index

  static Elem eq_nat(long long n) { return {TheoryId::EQ, Sort::Elem, n, 1}; }
  static Elem dlo_rat(Rational q) { return {TheoryId::DLO, Sort::Elem, q.num, q.den}; }
  static Elem erel_pair(long long cls, long long member) { return {TheoryId::EREL, Sort::Elem, cls, member}; }
  static Elem erel_class(long long cls) { return {TheoryId::EREL, Sort::Class, cls, 0}; }

  Rational rat() const { return {a, b}; }
  // class of an EREL element, as a class-sort value
  Elem cl() const { return erel_class(a); }

  friend bool operator==(const Elem&, const Elem&) = default;
  friend std::strong_ordering operator<=>(const Elem& x, const Elem& y) {
    if (auto c = x.sort <=> y.sort; c != 0) return c;
    if (x.theory == TheoryId::DLO && x.sort == Sort::Elem) return x.rat() <=> y.rat();
    if (auto c = x.a <=> y.a; c != 0) return c;
    return x.b <=> y.b;
  }

  std::string str() const;
};

}  // namespace thornlab

#endif
