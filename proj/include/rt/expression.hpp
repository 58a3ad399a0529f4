#pragma once
// Small complex expression language for symbols and radial functions.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// Names: z1..zn (complex coordinate), r1..rn (modulus), t1..tn (= r_j^2),
// th1..thn (argument), pi, i. Functions: exp log sqrt abs conj re im sin cos.
// Compiled to postfix code; evaluation is reentrant.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rt/error.hpp"
#include "rt/text.hpp"

namespace rt {

class Expression {
 public:
  using Complex = std::complex<double>;

  enum class Op : unsigned char { Const, Z, R, T, Theta, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Abs, Conj, Re, Im, Sin, Cos };

  static Expression parse(std::string_view src) {
    Expression e;
    e.source_ = std::string(src);
    text::Cursor c(src);
    Builder b{c, e};
    b.expr();
    if (!c.at_end()) c.fail("operator or end of expression");
    int depth = 0;
    for (const auto& ins : e.code_) {
      depth += ins.op <= Op::Theta ? 1 : (ins.op <= Op::Pow ? -1 : 0);
      e.max_depth_ = std::max(e.max_depth_, depth);
    }
    return e;
  }

  const std::string& source() const { return source_; }
  /// Largest coordinate index used (1-based), 0 for constants.
  std::size_t arity() const { return arity_; }
  /// True when the value depends on angles (z_j or th_j appear).
  bool uses_angles() const { return angles_; }
  bool is_constant() const { return arity_ == 0; }

  void require_dim(std::size_t n) const {
    if (arity_ > n)
      throw ConfigError("expression '" + source_ + "' uses coordinate " + std::to_string(arity_) + " but n = " +
                        std::to_string(n));
  }

  /// Value at radii r and angles theta (theta may be empty when no angle is used).
  Complex operator()(std::span<const double> r, std::span<const double> theta = {}) const {
    if (max_depth_ <= 32) {
      std::array<Complex, 32> stack;
      return run(stack.data(), r, theta);
    }
    std::vector<Complex> stack(static_cast<std::size_t>(max_depth_));
    return run(stack.data(), r, theta);
  }

 private:
  struct Instr {
    Op op;
    std::size_t arg = 0;
    Complex value{};
  };

  struct Builder {
    text::Cursor& c;
    Expression& e;

    void emit(Op op, std::size_t arg = 0, Complex v = {}) { e.code_.push_back({op, arg, v}); }

    void expr() {
      term();
      for (;;) {
        if (c.accept('+')) {
          term();
          emit(Op::Add);
        } else if (c.accept('-')) {
          term();
          emit(Op::Sub);
        } else {
          return;
        }
      }
    }

    void term() {
      unary();
      for (;;) {
        if (c.accept('*')) {
          unary();
          emit(Op::Mul);
        } else if (c.accept('/')) {
          unary();
          emit(Op::Div);
        } else {
          return;
        }
      }
    }

    void unary() {
      if (c.accept('-')) {
        unary();
        emit(Op::Neg);
      } else if (c.accept('+')) {
        unary();
      } else {
        power();
      }
    }

    void power() {
      atom();
      if (c.accept('^')) {
        unary();
        emit(Op::Pow);
      }
    }

    void atom() {
      const char ch = c.peek();
      if (ch == '(') {
        c.expect('(');
        expr();
        c.expect(')');
        return;
      }
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        emit(Op::Const, 0, c.number());
        return;
      }
      if (!std::isalpha(static_cast<unsigned char>(ch))) c.fail("number, name or '('");
      const std::size_t at = c.position();
      const std::string name = c.identifier();
      if (c.peek() == '(') {
        static const std::pair<const char*, Op> fns[] = {{"exp", Op::Exp}, {"log", Op::Log},   {"sqrt", Op::Sqrt},
                                                         {"abs", Op::Abs}, {"conj", Op::Conj}, {"re", Op::Re},
                                                         {"im", Op::Im},   {"sin", Op::Sin},   {"cos", Op::Cos}};
        for (const auto& [fname, op] : fns) {
          if (name != fname) continue;
          c.expect('(');
          expr();
          c.expect(')');
          emit(op);
          return;
        }
        throw ParseError(at, "function name", name);
      }
      if (name == "pi") return emit(Op::Const, 0, std::numbers::pi);
      if (name == "i") return emit(Op::Const, 0, Complex(0, 1));
      static const std::pair<const char*, Op> vars[] = {{"th", Op::Theta}, {"z", Op::Z}, {"r", Op::R}, {"t", Op::T}};
      for (const auto& [prefix, op] : vars) {
        const std::string p(prefix);
        if (name.size() <= p.size() || name.compare(0, p.size(), p) != 0) continue;
        const std::string digits = name.substr(p.size());
        if (digits.find_first_not_of("0123456789") != std::string::npos || digits[0] == '0') continue;
        const std::size_t j = std::stoul(digits);
        e.arity_ = std::max(e.arity_, j);
        if (op == Op::Z || op == Op::Theta) e.angles_ = true;
        return emit(op, j - 1);
      }
      throw ParseError(at, "variable (z1, r1, t1, th1, ...) or constant", name);
    }
  };

  static Complex power(Complex a, Complex b) {
    if (b.imag() == 0) {
      const double p = b.real();
      if (p == std::round(p) && std::abs(p) <= 64) {
        Complex acc = 1, base = a;
        for (long e = std::lround(std::abs(p)); e > 0; e >>= 1) {
          if (e & 1) acc *= base;
          base *= base;
        }
        return p < 0 ? 1.0 / acc : acc;
      }
      if (a.imag() == 0 && a.real() >= 0) return std::pow(a.real(), p);
    }
    return std::pow(a, b);
  }

  Complex run(Complex* st, std::span<const double> r, std::span<const double> th) const {
    std::size_t sp = 0;
    for (const auto& ins : code_) {
      switch (ins.op) {
        case Op::Const: st[sp++] = ins.value; break;
        case Op::R: st[sp++] = r[ins.arg]; break;
        case Op::T: st[sp++] = r[ins.arg] * r[ins.arg]; break;
        case Op::Theta: st[sp++] = th.empty() ? 0.0 : th[ins.arg]; break;
        case Op::Z: st[sp++] = th.empty() ? Complex(r[ins.arg]) : std::polar(r[ins.arg], th[ins.arg]); break;
        case Op::Add: --sp; st[sp - 1] += st[sp]; break;
        case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
        case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
        case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
        case Op::Pow: --sp; st[sp - 1] = power(st[sp - 1], st[sp]); break;
        case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Op::Log: st[sp - 1] = std::log(st[sp - 1]); break;
        case Op::Sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
        case Op::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
        case Op::Conj: st[sp - 1] = std::conj(st[sp - 1]); break;
        case Op::Re: st[sp - 1] = st[sp - 1].real(); break;
        case Op::Im: st[sp - 1] = st[sp - 1].imag(); break;
        case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
        case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      }
    }
    return st[0];
  }

  std::string source_;
  std::vector<Instr> code_;
  std::size_t arity_ = 0;
  bool angles_ = false;
  int max_depth_ = 0;
};

}  // namespace rt
