#include "symjet/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace symjet {

namespace {

struct Token {
  enum class K { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  K k;
  double num = 0.0;
  std::string ident;
  int col = 0;  // 1-based
};

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    tok_.col = static_cast<int>(pos_) + 1;
    if (pos_ >= s_.size()) {
      tok_.k = Token::K::End;
      return;
    }
    char c = s_[pos_];
    switch (c) {
      case '+': tok_.k = Token::K::Plus; ++pos_; return;
      case '-': tok_.k = Token::K::Minus; ++pos_; return;
      case '*': tok_.k = Token::K::Star; ++pos_; return;
      case '/': tok_.k = Token::K::Slash; ++pos_; return;
      case '^': tok_.k = Token::K::Caret; ++pos_; return;
      case '(': tok_.k = Token::K::LParen; ++pos_; return;
      case ')': tok_.k = Token::K::RParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) throw SyntaxError("bad number", tok_.col);
      pos_ += static_cast<size_t>(end - begin);
      tok_.k = Token::K::Num;
      tok_.num = v;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      tok_.k = Token::K::Ident;
      tok_.ident = s_.substr(start, pos_ - start);
      return;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", tok_.col);
  }

  const std::string& s_;
  size_t pos_ = 0;
  Token tok_;
};

ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

class Parser {
public:
  Parser(const std::string& text, int n) : lex_(text), n_(n) {}

  Expr run() {
    ExprPtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.k != Token::K::End) throw SyntaxError("trailing input", t.col);
    return Expr(e, seen_var_ ? max_var_ + 1 : 0);
  }

private:
  ExprPtr parse_sum() {
    ExprPtr lhs = parse_term();
    for (;;) {
      Token::K k = lex_.peek().k;
      if (k == Token::K::Plus || k == Token::K::Minus) {
        lex_.take();
        ExprPtr rhs = parse_term();
        ExprNode n;
        n.kind = (k == Token::K::Plus) ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
        n.a = lhs;
        n.b = rhs;
        lhs = make(std::move(n));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      Token::K k = lex_.peek().k;
      if (k == Token::K::Star || k == Token::K::Slash) {
        lex_.take();
        ExprPtr rhs = parse_unary();
        ExprNode n;
        n.kind = (k == Token::K::Star) ? ExprNode::Kind::Mul : ExprNode::Kind::Div;
        n.a = lhs;
        n.b = rhs;
        lhs = make(std::move(n));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (lex_.peek().k == Token::K::Minus) {
      lex_.take();
      ExprNode n;
      n.kind = ExprNode::Kind::Neg;
      n.a = parse_unary();
      return make(std::move(n));
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (lex_.peek().k != Token::K::Caret) return base;
    Token caret = lex_.take();
    // Integer exponent, optionally negative.
    bool neg = false;
    if (lex_.peek().k == Token::K::Minus) {
      lex_.take();
      neg = true;
    }
    Token t = lex_.take();
    if (t.k != Token::K::Num) throw SyntaxError("expected integer exponent", caret.col + 1);
    double rounded = std::round(t.num);
    if (std::abs(t.num - rounded) > 0.0)
      throw SyntaxError("exponent must be an integer", t.col);
    ExprNode n;
    n.kind = ExprNode::Kind::Pow;
    n.exponent = static_cast<int>(rounded) * (neg ? -1 : 1);
    n.a = base;
    return make(std::move(n));
  }

  ExprPtr parse_atom() {
    Token t = lex_.take();
    switch (t.k) {
      case Token::K::Num: {
        ExprNode n;
        n.kind = ExprNode::Kind::Const;
        n.value = t.num;
        return make(std::move(n));
      }
      case Token::K::LParen: {
        ExprPtr e = parse_sum();
        Token close = lex_.take();
        if (close.k != Token::K::RParen) throw SyntaxError("expected ')'", close.col);
        return e;
      }
      case Token::K::Ident:
        return parse_ident(t);
      case Token::K::End:
        throw SyntaxError("unexpected end of input", t.col);
      default:
        throw SyntaxError("unexpected token", t.col);
    }
  }

  ExprPtr parse_ident(const Token& t) {
    static const std::pair<const char*, Func> kFuncs[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos},   {"exp", Func::Exp},
        {"log", Func::Log}, {"sqrt", Func::Sqrt}, {"atan", Func::Atan}};
    for (const auto& [name, f] : kFuncs) {
      if (t.ident == name) {
        Token open = lex_.take();
        if (open.k != Token::K::LParen) throw SyntaxError("expected '(' after function", open.col);
        ExprPtr arg = parse_sum();
        Token close = lex_.take();
        if (close.k != Token::K::RParen) throw SyntaxError("expected ')'", close.col);
        ExprNode n;
        n.kind = ExprNode::Kind::Call;
        n.func = f;
        n.a = arg;
        return make(std::move(n));
      }
    }
    // Variables x1..xn.
    if (t.ident.size() >= 2 && t.ident[0] == 'x') {
      bool digits = true;
      for (size_t i = 1; i < t.ident.size(); ++i)
        digits = digits && std::isdigit(static_cast<unsigned char>(t.ident[i]));
      if (digits) {
        int idx = std::stoi(t.ident.substr(1)) - 1;
        if (idx < 0 || idx >= n_)
          throw SyntaxError("variable '" + t.ident + "' out of range for dimension " +
                                std::to_string(n_),
                            t.col);
        seen_var_ = true;
        max_var_ = std::max(max_var_, idx);
        ExprNode n;
        n.kind = ExprNode::Kind::Var;
        n.var = idx;
        return make(std::move(n));
      }
    }
    throw SyntaxError("unknown identifier '" + t.ident + "'", t.col);
  }

  Lexer lex_;
  int n_;
  int max_var_ = -1;
  bool seen_var_ = false;
};

double eval_node(const ExprNode& n, const std::vector<double>& x) {
  switch (n.kind) {
    case ExprNode::Kind::Const: return n.value;
    case ExprNode::Kind::Var: return x[static_cast<size_t>(n.var)];
    case ExprNode::Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case ExprNode::Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case ExprNode::Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case ExprNode::Kind::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case ExprNode::Kind::Pow: return std::pow(eval_node(*n.a, x), n.exponent);
    case ExprNode::Kind::Neg: return -eval_node(*n.a, x);
    case ExprNode::Kind::Call: {
      double a = eval_node(*n.a, x);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Log: return std::log(a);
        case Func::Sqrt: return std::sqrt(a);
        case Func::Atan: return std::atan(a);
      }
      return 0.0;
    }
  }
  return 0.0;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Atan: return "atan";
  }
  return "?";
}

int precedence(ExprNode::Kind k) {
  switch (k) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    case ExprNode::Kind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const ExprNode& n, std::ostringstream& out, int parent_prec) {
  int prec = precedence(n.kind);
  bool paren = prec < parent_prec;
  if (paren) out << '(';
  switch (n.kind) {
    case ExprNode::Kind::Const: {
      std::ostringstream num;
      num.precision(17);
      num << n.value;
      out << num.str();
      break;
    }
    case ExprNode::Kind::Var: out << 'x' << (n.var + 1); break;
    case ExprNode::Kind::Add:
      print_node(*n.a, out, prec);
      out << " + ";
      // Right operands bind one level tighter so reparsing rebuilds the
      // same (left-associated) tree.
      print_node(*n.b, out, prec + 1);
      break;
    case ExprNode::Kind::Sub:
      print_node(*n.a, out, prec);
      out << " - ";
      print_node(*n.b, out, prec + 1);
      break;
    case ExprNode::Kind::Mul:
      print_node(*n.a, out, prec);
      out << "*";
      print_node(*n.b, out, prec + 1);
      break;
    case ExprNode::Kind::Div:
      print_node(*n.a, out, prec);
      out << "/";
      print_node(*n.b, out, prec + 1);
      break;
    case ExprNode::Kind::Pow:
      print_node(*n.a, out, prec + 1);
      out << "^" << n.exponent;
      break;
    case ExprNode::Kind::Neg:
      out << "-";
      print_node(*n.a, out, prec);
      break;
    case ExprNode::Kind::Call:
      out << func_name(n.func) << "(";
      print_node(*n.a, out, 0);
      out << ")";
      break;
  }
  if (paren) out << ')';
}

void compile_node(const ExprNode& n, std::vector<TapeOp>& ops) {
  TapeOp op;
  switch (n.kind) {
    case ExprNode::Kind::Const:
      op.k = TapeOp::K::Const;
      op.imm = n.value;
      ops.push_back(op);
      return;
    case ExprNode::Kind::Var:
      op.k = TapeOp::K::Var;
      op.var = n.var;
      ops.push_back(op);
      return;
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub:
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div:
      compile_node(*n.a, ops);
      compile_node(*n.b, ops);
      op.k = n.kind == ExprNode::Kind::Add   ? TapeOp::K::Add
             : n.kind == ExprNode::Kind::Sub ? TapeOp::K::Sub
             : n.kind == ExprNode::Kind::Mul ? TapeOp::K::Mul
                                             : TapeOp::K::Div;
      ops.push_back(op);
      return;
    case ExprNode::Kind::Pow:
      compile_node(*n.a, ops);
      op.k = TapeOp::K::PowInt;
      op.exponent = n.exponent;
      ops.push_back(op);
      return;
    case ExprNode::Kind::Neg:
      compile_node(*n.a, ops);
      op.k = TapeOp::K::Neg;
      ops.push_back(op);
      return;
    case ExprNode::Kind::Call:
      compile_node(*n.a, ops);
      op.k = TapeOp::K::Call;
      op.func = n.func;
      ops.push_back(op);
      return;
  }
}

bool node_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::Const: return a.value == b.value;
    case ExprNode::Kind::Var: return a.var == b.var;
    case ExprNode::Kind::Pow: return a.exponent == b.exponent && node_equal(*a.a, *b.a);
    case ExprNode::Kind::Neg: return node_equal(*a.a, *b.a);
    case ExprNode::Kind::Call: return a.func == b.func && node_equal(*a.a, *b.a);
    default: return node_equal(*a.a, *b.a) && node_equal(*a.b, *b.b);
  }
}

}  // namespace

Expr parse_expr(const std::string& text, int n) {
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (text.empty() || blank) throw SyntaxError("empty expression", 1);
  return Parser(text, n).run();
}

double Expr::eval(const std::vector<double>& x) const {
  if (!root_) throw Error("evaluating an empty expression");
  return eval_node(*root_, x);
}

std::string Expr::to_string() const {
  if (!root_) return "";
  std::ostringstream out;
  print_node(*root_, out, 0);
  return out.str();
}

bool Expr::structurally_equal(const Expr& other) const {
  if (!root_ || !other.root_) return root_ == other.root_;
  return node_equal(*root_, *other.root_);
}

Tape::Tape(const Expr& e) {
  if (e.valid()) compile_node(*e.root(), ops_);
}

double Tape::eval(const double* x) const {
  double stack[64];
  int top = -1;
  for (const TapeOp& op : ops_) {
    switch (op.k) {
      case TapeOp::K::Const: stack[++top] = op.imm; break;
      case TapeOp::K::Var: stack[++top] = x[op.var]; break;
      case TapeOp::K::Add: --top; stack[top] += stack[top + 1]; break;
      case TapeOp::K::Sub: --top; stack[top] -= stack[top + 1]; break;
      case TapeOp::K::Mul: --top; stack[top] *= stack[top + 1]; break;
      case TapeOp::K::Div: --top; stack[top] /= stack[top + 1]; break;
      case TapeOp::K::Neg: stack[top] = -stack[top]; break;
      case TapeOp::K::PowInt: stack[top] = std::pow(stack[top], op.exponent); break;
      case TapeOp::K::Call:
        switch (op.func) {
          case Func::Sin: stack[top] = std::sin(stack[top]); break;
          case Func::Cos: stack[top] = std::cos(stack[top]); break;
          case Func::Exp: stack[top] = std::exp(stack[top]); break;
          case Func::Log: stack[top] = std::log(stack[top]); break;
          case Func::Sqrt: stack[top] = std::sqrt(stack[top]); break;
          case Func::Atan: stack[top] = std::atan(stack[top]); break;
        }
        break;
    }
  }
  return stack[0];
}

}  // namespace symjet
