#pragma once

#include <cctype>
#include <sstream>
#include <string>

#include "poly.hpp"

namespace singscope {

class parse_error : public poly_error {
  public:
    parse_error(const std::string& what, std::size_t offset)
        : poly_error("syntax error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

namespace detail {

/// Recursive-descent parser for the expression grammar: variables x1,x2
/// (aliases x,y), integer and rational literals a / a/b, operators + - * ^
/// with ^ tightest then * then +/-, parentheses, * optional before a
/// variable or '(', whitespace ignored. Exponents are non-negative integers.
class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    LatticePolynomial run() {
        LatticePolynomial p = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw parse_error("unexpected trailing input", pos_);
        return p;
    }

  private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    LatticePolynomial parse_sum() {
        bool neg = false;
        if (peek() == '-') {
            ++pos_;
            neg = true;
        } else if (peek() == '+') {
            ++pos_;
        }
        LatticePolynomial acc = parse_product();
        if (neg) acc = -acc;
        while (true) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                LatticePolynomial t = parse_product();
                if (c == '+')
                    acc += t;
                else
                    acc -= t;
            } else {
                return acc;
            }
        }
    }

    LatticePolynomial parse_product() {
        LatticePolynomial acc = parse_power();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc *= parse_power();
            } else if (c == '(' || is_var_start(c)) {
                // implicit multiplication
                acc *= parse_power();
            } else {
                return acc;
            }
        }
    }

    LatticePolynomial parse_power() {
        LatticePolynomial base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            long e = parse_exponent();
            return base.pow(static_cast<int>(e));
        }
        return base;
    }

    static bool is_var_start(char c) { return c == 'x' || c == 'y'; }

    LatticePolynomial parse_atom() {
        char c = peek();
        std::size_t at = pos_;
        if (c == '(') {
            ++pos_;
            LatticePolynomial inner = parse_sum();
            if (peek() != ')') throw parse_error("expected ')'", pos_);
            ++pos_;
            return inner;
        }
        if (is_var_start(c)) return parse_variable();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rational q = parse_literal();
            return LatticePolynomial::constant(q);
        }
        if (c == '\0') throw parse_error("unexpected end of input", at);
        throw parse_error(std::string("unexpected character '") + c + "'", at);
    }

    LatticePolynomial parse_variable() {
        std::size_t at = pos_;
        char c = text_[pos_++];
        bool digit_next = pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
        if (c == 'y') {
            if (digit_next) throw parse_error("unknown identifier", at);
            return LatticePolynomial::var2();
        }
        if (!digit_next) return LatticePolynomial::var1();  // bare 'x'
        char idx = text_[pos_];
        bool longer = pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
        if ((idx != '1' && idx != '2') || longer) throw parse_error("unknown identifier", at);
        ++pos_;
        return idx == '1' ? LatticePolynomial::var1() : LatticePolynomial::var2();
    }

    long parse_unsigned_integer() {
        skip_ws();
        std::size_t at = pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw parse_error("expected integer", at);
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1000000) throw parse_error("integer too large", at);
            ++pos_;
        }
        return v;
    }

    Rational parse_literal() {
        long num = parse_unsigned_integer();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            std::size_t at = pos_;
            long den = parse_unsigned_integer();
            if (den == 0) throw parse_error("zero denominator", at);
            return rat(num, den);
        }
        return Rational(num);
    }

    long parse_exponent() {
        skip_ws();
        std::size_t at = pos_;
        if (peek() == '-') throw parse_error("negative exponent", at);
        long e = parse_unsigned_integer();
        if (pos_ < text_.size() && text_[pos_] == '/') throw parse_error("fractional exponent", pos_);
        return e;
    }
};

}  // namespace detail

/// Parses user-supplied text into an exact polynomial. Total over the grammar;
/// throws parse_error (with byte offset) otherwise.
inline LatticePolynomial parse_poly(const std::string& text) { return detail::Parser(text).run(); }

/// Canonical rendering: graded-lex descending terms, coefficients as p/q.
/// parse(print(p)) == p.
inline std::string to_string(const LatticePolynomial& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) {
                out << "-";
                a = -a;
            }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_var = m.e1 > 0 || m.e2 > 0;
        if (a != 1 || !has_var) {
            out << to_string(a);
            if (has_var) out << "*";
        }
        if (m.e1 > 0) {
            out << "x1";
            if (m.e1 > 1) out << "^" << m.e1;
        }
        if (m.e2 > 0) {
            if (m.e1 > 0) out << "*";
            out << "x2";
            if (m.e2 > 1) out << "^" << m.e2;
        }
    }
    return out.str();
}

}  // namespace singscope
