#ifndef CAUSALMC_PROG_H
#define CAUSALMC_PROG_H

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmc {

using Value = int64_t;

/* Register valuations are process-local. Unassigned registers read as 0. */
using RegisterValuation = std::map<std::string, Value>;

enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/* Expression tree over local registers and integer constants.
 * Arithmetic is 64-bit two's complement with wrapping overflow;
 * comparison and boolean operators yield 0/1. */
struct Expr {
  enum class Kind { Const, Reg, Not, Bin };

  Kind kind = Kind::Const;
  Value num = 0;
  std::string reg;
  BinOp op = BinOp::Add;
  ExprPtr lhs, rhs;

  static ExprPtr constant(Value v);
  static ExprPtr regref(std::string name);
  static ExprPtr negate(ExprPtr e);
  static ExprPtr bin(BinOp op, ExprPtr l, ExprPtr r);
};

Value eval_expr(const Expr& e, const RegisterValuation& regs);

bool expr_equal(const Expr& a, const Expr& b);
std::string expr_to_string(const Expr& e);

struct Instr {
  enum class Kind { SharedWrite, SharedRead, RegAssign, Assert, Assume, If, Loop };

  Kind kind = Kind::RegAssign;
  std::string var;   // SharedWrite target / SharedRead source variable
  std::string reg;   // SharedRead/RegAssign destination, Loop counter
  ExprPtr expr;      // written value, assigned value, or condition
  std::vector<Instr> body;       // If then-branch, Loop body
  std::vector<Instr> else_body;  // If else-branch
  Value lo = 0, hi = 0;          // Loop range [lo, hi)
  int line = 0, col = 0;
};

struct Transaction {
  std::vector<Instr> body;
};

struct Process {
  std::string name;
  std::vector<Transaction> transactions;
};

struct Program {
  std::vector<std::string> shared_vars;  // declaration order; all start at 0
  std::vector<Process> processes;

  int var_index(const std::string& name) const;  // -1 when undeclared
  int num_transactions() const;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col);
};

/* Parses the DSL and unrolls every loop up to `unroll_bound` iterations.
 * The returned program contains no Loop instructions. */
Program parse_program(const std::string& text, int unroll_bound = 4);

/* Parse only; loops are kept as Loop instructions. */
Program parse_program_raw(const std::string& text);

/* Expands every loop to min(range length, bound) iterations, substituting
 * the counter as a constant. Idempotent on loop-free programs. */
Program unroll(const Program& p, int bound);

bool program_has_loops(const Program& p);
bool program_equal(const Program& a, const Program& b);
std::string print_program(const Program& p);

}  // namespace cmc

#endif
