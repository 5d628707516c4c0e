#pragma once

#include "errlens/diagnostic.hpp"

#include <memory>
#include <string>
#include <vector>

namespace errlens::minilang {

enum class BinaryOp
{
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Equal,
    NotEqual,
    And,
    Or,
};

enum class UnaryOp
{
    Neg,
    Not,
};

const char* to_string(BinaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr
{
    enum class Kind
    {
        Number,
        String,
        Variable,
        Unary,
        Binary,
        Call,
    };

    Kind kind = Kind::Number;
    SourceSpan span;
    double number = 0.0;
    bool integral = false;
    std::string text; // string literal value, variable name or callee
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    std::vector<ExprPtr> operands; // unary: 1, binary: 2, call: arguments
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

struct Stmt
{
    enum class Kind
    {
        Assign,
        Call,    // plain call statement
        Print,   // print(args...)
        Println, // println(), the blank line
        Return,
        For,     // for var in from .. to { body }
        While,
        If,
    };

    Kind kind = Kind::Assign;
    SourceSpan span;
    std::string name;            // assignment target, callee or loop variable
    std::vector<ExprPtr> exprs;  // assign: [rhs]; call/print: args; return: [value?]; for: [from,to]; while/if: [cond]
    Block body;                  // for/while/if-then
    Block else_body;
};

struct Function
{
    std::string name;
    std::vector<std::string> params;
    Block body;
    SourceSpan span;
};

struct Program
{
    std::vector<Function> functions;
    std::string source;

    const Function* find(std::string_view name) const;
};

/// Parses MiniLang source. Throws InputError with line/column diagnostics on
/// syntax errors and duplicate function names.
Program parse_program(std::string source);

} // namespace errlens::minilang
