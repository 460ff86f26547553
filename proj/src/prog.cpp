#include "causalmc/prog.h"

#include <cassert>
#include <set>
#include <cctype>
#include <sstream>

namespace cmc {

ExprPtr Expr::constant(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->num = v;
  return e;
}

ExprPtr Expr::regref(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Reg;
  e->reg = std::move(name);
  return e;
}

ExprPtr Expr::negate(ExprPtr sub) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Not;
  e->lhs = std::move(sub);
  return e;
}

ExprPtr Expr::bin(BinOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Bin;
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

namespace {

Value wrap_add(Value a, Value b) {
  return static_cast<Value>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
Value wrap_sub(Value a, Value b) {
  return static_cast<Value>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
Value wrap_mul(Value a, Value b) {
  return static_cast<Value>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}

}  // namespace

Value eval_expr(const Expr& e, const RegisterValuation& regs) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.num;
    case Expr::Kind::Reg: {
      auto it = regs.find(e.reg);
      return it == regs.end() ? 0 : it->second;
    }
    case Expr::Kind::Not:
      return eval_expr(*e.lhs, regs) == 0 ? 1 : 0;
    case Expr::Kind::Bin: {
      Value a = eval_expr(*e.lhs, regs);
      Value b = eval_expr(*e.rhs, regs);
      switch (e.op) {
        case BinOp::Add: return wrap_add(a, b);
        case BinOp::Sub: return wrap_sub(a, b);
        case BinOp::Mul: return wrap_mul(a, b);
        case BinOp::Eq:  return a == b ? 1 : 0;
        case BinOp::Ne:  return a != b ? 1 : 0;
        case BinOp::Lt:  return a < b ? 1 : 0;
        case BinOp::Le:  return a <= b ? 1 : 0;
        case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
        case BinOp::Or:  return (a != 0 || b != 0) ? 1 : 0;
      }
    }
  }
  assert(false && "corrupt expression node");
  return 0;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Const: return a.num == b.num;
    case Expr::Kind::Reg:   return a.reg == b.reg;
    case Expr::Kind::Not:   return expr_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Bin:
      return a.op == b.op && expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
  }
  return false;
}

namespace {

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq:  return "==";
    case BinOp::Ne:  return "!=";
    case BinOp::Lt:  return "<";
    case BinOp::Le:  return "<=";
    case BinOp::And: return "&&";
    case BinOp::Or:  return "||";
  }
  return "?";
}

}  // namespace

std::string expr_to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const: return std::to_string(e.num);
    case Expr::Kind::Reg:   return e.reg;
    case Expr::Kind::Not:   return "!(" + expr_to_string(*e.lhs) + ")";
    case Expr::Kind::Bin:
      return "(" + expr_to_string(*e.lhs) + " " + op_text(e.op) + " " +
             expr_to_string(*e.rhs) + ")";
  }
  return "?";
}

int Program::var_index(const std::string& name) const {
  for (size_t i = 0; i < shared_vars.size(); i++)
    if (shared_vars[i] == name) return static_cast<int>(i);
  return -1;
}

int Program::num_transactions() const {
  int n = 0;
  for (const auto& p : processes) n += static_cast<int>(p.transactions.size());
  return n;
}

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                         std::to_string(col) + ": " + msg),
      line(line), col(col) {}

namespace {

struct Token {
  enum class Kind { Ident, Int, Sym, Eof };
  Kind kind;
  std::string text;
  Value num = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {
    advance();
    cur_ = tok_;
    advance();
  }

  const Token& peek() const { return cur_; }
  const Token& peek2() const { return tok_; }

  Token next() {
    Token t = cur_;
    cur_ = tok_;
    advance();
    return t;
  }

 private:
  Token cur_;
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::Eof;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      tok_.kind = Token::Kind::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
      tok_.kind = Token::Kind::Int;
      tok_.text = src_.substr(start, pos_ - start);
      try {
        tok_.num = std::stoll(tok_.text);
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range", tok_.line, tok_.col);
      }
      return;
    }
    // multi-char operators
    static const char* two[] = {":=", "==", "!=", "<=", "&&", "||", ".."};
    for (const char* op : two) {
      if (src_.compare(pos_, 2, op) == 0) {
        tok_.kind = Token::Kind::Sym;
        tok_.text = op;
        bump();
        bump();
        return;
      }
    }
    tok_.kind = Token::Kind::Sym;
    tok_.text = std::string(1, c);
    bump();
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (src_.compare(pos_, 2, "//") == 0) {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    pos_++;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Program parse() {
    Program prog;
    while (is_kw("var")) {
      lex_.next();
      Token name = expect_ident("variable name");
      if (prog.var_index(name.text) >= 0)
        throw ParseError("duplicate variable '" + name.text + "'", name.line, name.col);
      prog.shared_vars.push_back(name.text);
      expect_sym(";");
    }
    if (prog.shared_vars.empty() && !is_kw("process"))
      throw ParseError("expected 'var' or 'process'", lex_.peek().line, lex_.peek().col);
    while (is_kw("process")) {
      lex_.next();
      Token name = expect_ident("process name");
      for (const auto& p : prog.processes)
        if (p.name == name.text)
          throw ParseError("duplicate process '" + name.text + "'", name.line, name.col);
      Process proc;
      proc.name = name.text;
      regs_.clear();
      expect_sym("{");
      while (is_kw("transaction")) {
        lex_.next();
        expect_sym("{");
        Transaction txn;
        txn.body = parse_stmts(prog);
        expect_sym("}");
        proc.transactions.push_back(std::move(txn));
      }
      expect_sym("}");
      if (proc.transactions.empty())
        throw ParseError("process '" + proc.name + "' has no transactions",
                         name.line, name.col);
      prog.processes.push_back(std::move(proc));
    }
    Token t = lex_.peek();
    if (t.kind != Token::Kind::Eof)
      throw ParseError("unexpected '" + t.text + "'", t.line, t.col);
    if (prog.processes.empty())
      throw ParseError("program has no processes", t.line, t.col);
    return prog;
  }

 private:
  std::vector<Instr> parse_stmts(const Program& prog) {
    std::vector<Instr> out;
    while (!is_sym("}")) out.push_back(parse_stmt(prog));
    return out;
  }

  Instr parse_stmt(const Program& prog) {
    Token t = lex_.peek();
    Instr ins;
    ins.line = t.line;
    ins.col = t.col;
    if (is_kw("assert") || is_kw("assume")) {
      lex_.next();
      ins.kind = t.text == "assert" ? Instr::Kind::Assert : Instr::Kind::Assume;
      expect_sym("(");
      ins.expr = parse_expr(prog);
      expect_sym(")");
      expect_sym(";");
      return ins;
    }
    if (is_kw("if")) {
      lex_.next();
      ins.kind = Instr::Kind::If;
      expect_sym("(");
      ins.expr = parse_expr(prog);
      expect_sym(")");
      expect_sym("{");
      ins.body = parse_stmts(prog);
      expect_sym("}");
      if (is_kw("else")) {
        lex_.next();
        expect_sym("{");
        ins.else_body = parse_stmts(prog);
        expect_sym("}");
      }
      return ins;
    }
    if (is_kw("for")) {
      lex_.next();
      ins.kind = Instr::Kind::Loop;
      Token counter = expect_ident("loop counter");
      if (prog.var_index(counter.text) >= 0)
        throw ParseError("loop counter '" + counter.text + "' shadows a shared variable",
                         counter.line, counter.col);
      ins.reg = counter.text;
      regs_.insert(counter.text);
      expect_kw("in");
      ins.lo = expect_int("loop start");
      expect_sym("..");
      ins.hi = expect_int("loop end");
      expect_sym("{");
      ins.body = parse_stmts(prog);
      expect_sym("}");
      return ins;
    }
    Token name = expect_ident("statement");
    expect_sym(":=");
    bool lhs_shared = prog.var_index(name.text) >= 0;
    // A bare declared variable on the right-hand side is a shared read; a
    // bare identifier that is neither declared nor an assigned register is
    // most likely a misspelled variable.
    Token rhs = lex_.peek();
    if (rhs.kind == Token::Kind::Ident && prog.var_index(rhs.text) >= 0) {
      lex_.next();
      Token after = lex_.peek();
      if (!is_sym_tok(after, ";"))
        throw ParseError("shared variable '" + rhs.text +
                         "' cannot appear inside an expression", rhs.line, rhs.col);
      expect_sym(";");
      if (lhs_shared)
        throw ParseError("cannot copy shared variable '" + rhs.text +
                         "' directly into '" + name.text + "'; read it into a register first",
                         name.line, name.col);
      ins.kind = Instr::Kind::SharedRead;
      ins.reg = name.text;
      ins.var = rhs.text;
      regs_.insert(ins.reg);
      return ins;
    }
    if (rhs.kind == Token::Kind::Ident && !regs_.count(rhs.text) &&
        is_sym_tok(lex_.peek2(), ";"))
      throw ParseError("undeclared variable '" + rhs.text + "'", rhs.line, rhs.col);
    ins.expr = parse_expr(prog);
    expect_sym(";");
    if (lhs_shared) {
      ins.kind = Instr::Kind::SharedWrite;
      ins.var = name.text;
    } else {
      ins.kind = Instr::Kind::RegAssign;
      ins.reg = name.text;
      regs_.insert(ins.reg);
    }
    return ins;
  }

  // precedence climbing: || < && < ==,!= < <,<= < +,- < * < unary
  ExprPtr parse_expr(const Program& prog) { return parse_or(prog); }

  ExprPtr parse_or(const Program& prog) {
    ExprPtr e = parse_and(prog);
    while (is_sym("||")) {
      lex_.next();
      e = Expr::bin(BinOp::Or, e, parse_and(prog));
    }
    return e;
  }

  ExprPtr parse_and(const Program& prog) {
    ExprPtr e = parse_eq(prog);
    while (is_sym("&&")) {
      lex_.next();
      e = Expr::bin(BinOp::And, e, parse_eq(prog));
    }
    return e;
  }

  ExprPtr parse_eq(const Program& prog) {
    ExprPtr e = parse_rel(prog);
    while (is_sym("==") || is_sym("!=")) {
      BinOp op = lex_.next().text == "==" ? BinOp::Eq : BinOp::Ne;
      e = Expr::bin(op, e, parse_rel(prog));
    }
    return e;
  }

  ExprPtr parse_rel(const Program& prog) {
    ExprPtr e = parse_add(prog);
    while (is_sym("<") || is_sym("<=")) {
      BinOp op = lex_.next().text == "<" ? BinOp::Lt : BinOp::Le;
      e = Expr::bin(op, e, parse_add(prog));
    }
    return e;
  }

  ExprPtr parse_add(const Program& prog) {
    ExprPtr e = parse_mul(prog);
    while (is_sym("+") || is_sym("-")) {
      BinOp op = lex_.next().text == "+" ? BinOp::Add : BinOp::Sub;
      e = Expr::bin(op, e, parse_mul(prog));
    }
    return e;
  }

  ExprPtr parse_mul(const Program& prog) {
    ExprPtr e = parse_unary(prog);
    while (is_sym("*")) {
      lex_.next();
      e = Expr::bin(BinOp::Mul, e, parse_unary(prog));
    }
    return e;
  }

  ExprPtr parse_unary(const Program& prog) {
    if (is_sym("!")) {
      lex_.next();
      return Expr::negate(parse_unary(prog));
    }
    if (is_sym("-")) {
      lex_.next();
      return Expr::bin(BinOp::Sub, Expr::constant(0), parse_unary(prog));
    }
    Token t = lex_.peek();
    if (t.kind == Token::Kind::Int) {
      lex_.next();
      return Expr::constant(t.num);
    }
    if (is_sym("(")) {
      lex_.next();
      ExprPtr e = parse_expr(prog);
      expect_sym(")");
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      if (prog.var_index(t.text) >= 0)
        throw ParseError("shared variable '" + t.text +
                         "' cannot appear inside an expression", t.line, t.col);
      lex_.next();
      return Expr::regref(t.text);
    }
    throw ParseError("expected expression", t.line, t.col);
  }

  bool is_kw(const char* kw) const {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::Ident && t.text == kw;
  }
  bool is_sym(const char* s) const { return is_sym_tok(lex_.peek(), s); }
  static bool is_sym_tok(const Token& t, const char* s) {
    return t.kind == Token::Kind::Sym && t.text == s;
  }

  Token expect_ident(const char* what) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Ident)
      throw ParseError(std::string("expected ") + what, t.line, t.col);
    return t;
  }
  Value expect_int(const char* what) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Int)
      throw ParseError(std::string("expected ") + what, t.line, t.col);
    return t.num;
  }
  void expect_sym(const char* s) {
    Token t = lex_.next();
    if (!is_sym_tok(t, s))
      throw ParseError(std::string("expected '") + s + "', found '" + t.text + "'",
                       t.line, t.col);
  }
  void expect_kw(const char* kw) {
    Token t = lex_.next();
    if (t.kind != Token::Kind::Ident || t.text != kw)
      throw ParseError(std::string("expected '") + kw + "'", t.line, t.col);
  }

  Lexer lex_;
  std::set<std::string> regs_;
};

ExprPtr subst_expr(const ExprPtr& e, const std::string& name, Value v) {
  switch (e->kind) {
    case Expr::Kind::Const: return e;
    case Expr::Kind::Reg:   return e->reg == name ? Expr::constant(v) : e;
    case Expr::Kind::Not:   return Expr::negate(subst_expr(e->lhs, name, v));
    case Expr::Kind::Bin:
      return Expr::bin(e->op, subst_expr(e->lhs, name, v), subst_expr(e->rhs, name, v));
  }
  return e;
}

void subst_block(std::vector<Instr>& block, const std::string& name, Value v) {
  for (Instr& ins : block) {
    if (ins.kind == Instr::Kind::Loop && ins.reg == name)
      continue;  // inner counter shadows
    if (ins.expr) ins.expr = subst_expr(ins.expr, name, v);
    subst_block(ins.body, name, v);
    subst_block(ins.else_body, name, v);
  }
}

std::vector<Instr> unroll_block(const std::vector<Instr>& block, int bound) {
  std::vector<Instr> out;
  for (const Instr& ins : block) {
    if (ins.kind == Instr::Kind::Loop) {
      Value len = ins.hi > ins.lo ? ins.hi - ins.lo : 0;
      Value iters = std::min<Value>(len, bound);
      for (Value k = 0; k < iters; k++) {
        std::vector<Instr> copy = ins.body;
        subst_block(copy, ins.reg, ins.lo + k);
        std::vector<Instr> expanded = unroll_block(copy, bound);
        out.insert(out.end(), expanded.begin(), expanded.end());
      }
      continue;
    }
    Instr copy = ins;
    copy.body = unroll_block(ins.body, bound);
    copy.else_body = unroll_block(ins.else_body, bound);
    out.push_back(std::move(copy));
  }
  return out;
}

bool block_has_loops(const std::vector<Instr>& block) {
  for (const Instr& ins : block) {
    if (ins.kind == Instr::Kind::Loop) return true;
    if (block_has_loops(ins.body) || block_has_loops(ins.else_body)) return true;
  }
  return false;
}

bool block_equal(const std::vector<Instr>& a, const std::vector<Instr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++) {
    const Instr& x = a[i];
    const Instr& y = b[i];
    if (x.kind != y.kind || x.var != y.var || x.reg != y.reg ||
        x.lo != y.lo || x.hi != y.hi)
      return false;
    if ((x.expr == nullptr) != (y.expr == nullptr)) return false;
    if (x.expr && !expr_equal(*x.expr, *y.expr)) return false;
    if (!block_equal(x.body, y.body) || !block_equal(x.else_body, y.else_body))
      return false;
  }
  return true;
}

void print_block(std::ostringstream& os, const std::vector<Instr>& block, int ind) {
  std::string pad(ind, ' ');
  for (const Instr& ins : block) {
    switch (ins.kind) {
      case Instr::Kind::SharedWrite:
        os << pad << ins.var << " := " << expr_to_string(*ins.expr) << ";\n";
        break;
      case Instr::Kind::SharedRead:
        os << pad << ins.reg << " := " << ins.var << ";\n";
        break;
      case Instr::Kind::RegAssign:
        os << pad << ins.reg << " := " << expr_to_string(*ins.expr) << ";\n";
        break;
      case Instr::Kind::Assert:
        os << pad << "assert(" << expr_to_string(*ins.expr) << ");\n";
        break;
      case Instr::Kind::Assume:
        os << pad << "assume(" << expr_to_string(*ins.expr) << ");\n";
        break;
      case Instr::Kind::If:
        os << pad << "if (" << expr_to_string(*ins.expr) << ") {\n";
        print_block(os, ins.body, ind + 2);
        os << pad << "}";
        if (!ins.else_body.empty()) {
          os << " else {\n";
          print_block(os, ins.else_body, ind + 2);
          os << pad << "}";
        }
        os << "\n";
        break;
      case Instr::Kind::Loop:
        os << pad << "for " << ins.reg << " in " << ins.lo << ".." << ins.hi << " {\n";
        print_block(os, ins.body, ind + 2);
        os << pad << "}\n";
        break;
    }
  }
}

}  // namespace

Program parse_program_raw(const std::string& text) {
  Parser parser(text);
  return parser.parse();
}

Program parse_program(const std::string& text, int unroll_bound) {
  return unroll(parse_program_raw(text), unroll_bound);
}

Program unroll(const Program& p, int bound) {
  if (bound < 1) throw std::invalid_argument("unroll bound must be positive");
  Program out = p;
  for (auto& proc : out.processes)
    for (auto& txn : proc.transactions)
      txn.body = unroll_block(txn.body, bound);
  return out;
}

bool program_has_loops(const Program& p) {
  for (const auto& proc : p.processes)
    for (const auto& txn : proc.transactions)
      if (block_has_loops(txn.body)) return true;
  return false;
}

bool program_equal(const Program& a, const Program& b) {
  if (a.shared_vars != b.shared_vars) return false;
  if (a.processes.size() != b.processes.size()) return false;
  for (size_t i = 0; i < a.processes.size(); i++) {
    const Process& x = a.processes[i];
    const Process& y = b.processes[i];
    if (x.name != y.name || x.transactions.size() != y.transactions.size())
      return false;
    for (size_t j = 0; j < x.transactions.size(); j++)
      if (!block_equal(x.transactions[j].body, y.transactions[j].body)) return false;
  }
  return true;
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& v : p.shared_vars) os << "var " << v << ";\n";
  for (const auto& proc : p.processes) {
    os << "process " << proc.name << " {\n";
    for (const auto& txn : proc.transactions) {
      os << "  transaction {\n";
      print_block(os, txn.body, 4);
      os << "  }\n";
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace cmc
