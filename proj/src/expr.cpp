#include "fps/expr.hpp"

#include <cctype>
#include <sstream>

namespace fps {

ExprPtr make_constant(Rational v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Constant;
  e->value = std::move(v);
  return e;
}

ExprPtr make_var_x() {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::VarX;
  return e;
}

ExprPtr make_var_y(int deriv, int comp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::VarY;
  e->deriv = deriv;
  e->comp = comp;
  e->comp_explicit = true;
  return e;
}

ExprPtr make_neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Neg;
  e->lhs = std::move(a);
  return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr make_pow(ExprPtr a, unsigned exponent) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Pow;
  e->lhs = std::move(a);
  e->exponent = exponent;
  return e;
}

ExprPtr make_call(AnalyticFn fn, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Call;
  e->fn = fn;
  e->lhs = std::move(a);
  return e;
}

namespace {

enum class TokKind { Number, Ident, Sym, End };

struct Token {
  TokKind kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) step();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = TokKind::End;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '.')) {
        text.push_back(src_[pos_]);
        step();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        int save_line = line_, save_col = col_;
        std::string exp_part(1, src_[pos_]);
        step();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
          exp_part.push_back(src_[pos_]);
          step();
        }
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            exp_part.push_back(src_[pos_]);
            step();
          }
          text += exp_part;
        } else {
          pos_ = save;
          line_ = save_line;
          col_ = save_col;
        }
      }
      tok_.kind = TokKind::Number;
      tok_.text = text;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string text;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) {
        text.push_back(src_[pos_]);
        step();
      }
      tok_.kind = TokKind::Ident;
      tok_.text = text;
      return;
    }
    tok_.kind = TokKind::Sym;
    tok_.text = std::string(1, c);
    step();
  }

  void step() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr parse() {
    ExprPtr e = expression();
    if (lex_.peek().kind != TokKind::End) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = lex_.peek();
    throw parse_error(msg, t.line, t.col);
  }

  bool accept_sym(const char* s) {
    if (lex_.peek().kind == TokKind::Sym && lex_.peek().text == s) {
      lex_.next();
      return true;
    }
    return false;
  }

  void expect_sym(const char* s, const char* what) {
    if (!accept_sym(s)) fail(std::string("expected '") + s + "' " + what);
  }

  unsigned expect_uint(const char* what) {
    if (lex_.peek().kind != TokKind::Number) fail(std::string("expected integer ") + what);
    Token t = lex_.next();
    for (char c : t.text)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw parse_error(std::string("expected integer ") + what, t.line, t.col);
    return static_cast<unsigned>(std::stoul(t.text));
  }

  ExprPtr with_span(ExprPtr e, const Token& t) {
    auto m = std::const_pointer_cast<Expr>(e);
    m->span = {t.line, t.col};
    return m;
  }

  ExprPtr expression() {
    ExprPtr e = term();
    while (lex_.peek().kind == TokKind::Sym &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      Token op = lex_.next();
      ExprPtr r = term();
      e = with_span(make_binary(op.text == "+" ? ExprKind::Add : ExprKind::Sub, e, r), op);
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (lex_.peek().kind == TokKind::Sym &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      Token op = lex_.next();
      ExprPtr r = factor();
      if (op.text == "/" && e->kind == ExprKind::Constant && r->kind == ExprKind::Constant) {
        // Constant quotients fold to rational literals, so "1/2" and "1 / 2"
        // produce the same tree.
        if (sgn(r->value) == 0) throw parse_error("division by zero literal", op.line, op.col);
        e = with_span(make_constant(e->value / r->value), op);
      } else {
        e = with_span(make_binary(op.text == "*" ? ExprKind::Mul : ExprKind::Div, e, r), op);
      }
    }
    return e;
  }

  ExprPtr factor() {
    if (lex_.peek().kind == TokKind::Sym && lex_.peek().text == "-") {
      Token op = lex_.next();
      return with_span(make_neg(factor()), op);
    }
    ExprPtr a = atom();
    if (lex_.peek().kind == TokKind::Sym && lex_.peek().text == "^") {
      Token op = lex_.next();
      unsigned k = expect_uint("exponent");
      return with_span(make_pow(a, k), op);
    }
    return a;
  }

  ExprPtr atom() {
    const Token& t = lex_.peek();
    if (t.kind == TokKind::Number) {
      Token num = lex_.next();
      try {
        return with_span(make_constant(rational_from_string(num.text)), num);
      } catch (const usage_error& e) {
        throw parse_error(e.what(), num.line, num.col);
      }
    }
    if (t.kind == TokKind::Ident) {
      Token id = lex_.next();
      if (id.text == "x") return with_span(make_var_x(), id);
      if (id.text == "y") return yref(id);
      AnalyticFn fn;
      if (id.text == "exp")
        fn = AnalyticFn::Exp;
      else if (id.text == "log")
        fn = AnalyticFn::Log;
      else if (id.text == "sin")
        fn = AnalyticFn::Sin;
      else if (id.text == "cos")
        fn = AnalyticFn::Cos;
      else
        throw parse_error("unknown identifier '" + id.text + "'", id.line, id.col);
      expect_sym("(", "after function name");
      ExprPtr arg = expression();
      expect_sym(")", "to close function call");
      return with_span(make_call(fn, arg), id);
    }
    if (t.kind == TokKind::Sym && t.text == "(") {
      lex_.next();
      ExprPtr e = expression();
      expect_sym(")", "to close group");
      return e;
    }
    fail("expected number, variable, function call, or '('");
  }

  ExprPtr yref(const Token& y_tok) {
    int primes = 0;
    while (accept_sym("'")) ++primes;
    if (primes > 3)
      throw parse_error("prime sugar is limited to three primes; use y(j) instead", y_tok.line,
                        y_tok.col);
    int deriv = primes;
    if (accept_sym("(")) {
      if (primes > 0)
        throw parse_error("cannot combine prime sugar with an explicit derivative index",
                          y_tok.line, y_tok.col);
      deriv = static_cast<int>(expect_uint("derivative order"));
      expect_sym(")", "to close derivative index");
    }
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::VarY;
    e->deriv = deriv;
    e->span = {y_tok.line, y_tok.col};
    if (accept_sym("[")) {
      e->comp = static_cast<int>(expect_uint("component index"));
      e->comp_explicit = true;
      expect_sym("]", "to close component index");
    }
    return e;
  }

  Lexer lex_;
};

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
  }
}

void print_rec(const Expr& e, int parent_prec, std::ostream& os) {
  const int prec = precedence(e.kind);
  const bool parens = prec < parent_prec;
  if (parens) os << '(';
  switch (e.kind) {
    case ExprKind::Constant: os << e.value.get_str(); break;
    case ExprKind::VarX: os << 'x'; break;
    case ExprKind::VarY: os << "y(" << e.deriv << ")[" << e.comp << ']'; break;
    case ExprKind::Neg:
      os << '-';
      print_rec(*e.lhs, prec + 1, os);
      break;
    case ExprKind::Add:
      print_rec(*e.lhs, prec, os);
      os << " + ";
      print_rec(*e.rhs, prec + 1, os);
      break;
    case ExprKind::Sub:
      print_rec(*e.lhs, prec, os);
      os << " - ";
      print_rec(*e.rhs, prec + 1, os);
      break;
    case ExprKind::Mul:
      print_rec(*e.lhs, prec, os);
      os << '*';
      print_rec(*e.rhs, prec + 1, os);
      break;
    case ExprKind::Div:
      print_rec(*e.lhs, prec, os);
      os << '/';
      print_rec(*e.rhs, prec + 1, os);
      break;
    case ExprKind::Pow:
      print_rec(*e.lhs, prec + 1, os);
      os << '^' << e.exponent;
      break;
    case ExprKind::Call:
      os << analytic_fn_name(e.fn) << '(';
      print_rec(*e.lhs, 0, os);
      os << ')';
      break;
  }
  if (parens) os << ')';
}

}  // namespace

ExprPtr parse_expression(const std::string& source) { return Parser(source).parse(); }

std::string print_expression(const Expr& e) {
  std::ostringstream os;
  print_rec(e, 0, os);
  return os.str();
}

bool expr_structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Constant: return a.value == b.value;
    case ExprKind::VarX: return true;
    case ExprKind::VarY: return a.deriv == b.deriv && a.comp == b.comp;
    case ExprKind::Neg:
    case ExprKind::Call:
      return (a.kind != ExprKind::Call || a.fn == b.fn) &&
             expr_structurally_equal(*a.lhs, *b.lhs);
    case ExprKind::Pow:
      return a.exponent == b.exponent && expr_structurally_equal(*a.lhs, *b.lhs);
    default:
      return expr_structurally_equal(*a.lhs, *b.lhs) && expr_structurally_equal(*a.rhs, *b.rhs);
  }
}

ExprPtr validate_expression(const ExprPtr& e, int n, int d, FieldMode mode) {
  switch (e->kind) {
    case ExprKind::Constant:
    case ExprKind::VarX: return e;
    case ExprKind::VarY: {
      if (e->deriv > n) {
        std::ostringstream msg;
        msg << "derivative order " << e->deriv << " exceeds n = " << n;
        throw validation_error(msg.str(), e->span.line, e->span.col);
      }
      int comp = e->comp;
      if (!e->comp_explicit) {
        if (d != 1)
          throw validation_error("component index required when d > 1", e->span.line, e->span.col);
        comp = 0;
      }
      if (comp >= d) {
        std::ostringstream msg;
        msg << "component index " << comp << " out of range for d = " << d;
        throw validation_error(msg.str(), e->span.line, e->span.col);
      }
      if (!e->comp_explicit) {
        auto m = std::make_shared<Expr>(*e);
        m->comp = comp;
        m->comp_explicit = true;
        return m;
      }
      return e;
    }
    case ExprKind::Neg: {
      auto m = std::make_shared<Expr>(*e);
      m->lhs = validate_expression(e->lhs, n, d, mode);
      return m;
    }
    case ExprKind::Pow: {
      auto m = std::make_shared<Expr>(*e);
      m->lhs = validate_expression(e->lhs, n, d, mode);
      return m;
    }
    case ExprKind::Call: {
      if (mode == FieldMode::RationalExact)
        throw validation_error(std::string(analytic_fn_name(e->fn)) +
                                   " is not available in rational mode",
                               e->span.line, e->span.col);
      auto m = std::make_shared<Expr>(*e);
      m->lhs = validate_expression(e->lhs, n, d, mode);
      return m;
    }
    case ExprKind::Div: {
      if (mode == FieldMode::RationalExact && e->rhs->kind != ExprKind::Constant)
        throw validation_error("rational mode allows division by constants only", e->span.line,
                               e->span.col);
      auto m = std::make_shared<Expr>(*e);
      m->lhs = validate_expression(e->lhs, n, d, mode);
      m->rhs = validate_expression(e->rhs, n, d, mode);
      return m;
    }
    default: {
      auto m = std::make_shared<Expr>(*e);
      m->lhs = validate_expression(e->lhs, n, d, mode);
      m->rhs = validate_expression(e->rhs, n, d, mode);
      return m;
    }
  }
}

void validate_problem(Problem& p) {
  if (p.num_eqs_r < 1 || p.dim_d < 1 || p.deriv_order_n < 0)
    throw validation_error("problem requires r >= 1, d >= 1, n >= 0");
  if (static_cast<int>(p.equations.size()) != p.num_eqs_r)
    throw validation_error("equation count does not match r");
  for (auto& eq : p.equations)
    eq = validate_expression(eq, p.deriv_order_n, p.dim_d, p.field);
}

}  // namespace fps
