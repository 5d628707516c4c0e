#include "errlens/minilang/ast.hpp"
#include "errlens/minilang/expression_form.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace errlens;
using namespace errlens::minilang;

namespace {

// Parses `expr` as the right-hand side of an assignment.
struct Parsed
{
    Program program;
    const Expr& expr() const { return *program.functions[0].body[0]->exprs[0]; }
};

Parsed parse_expr(const std::string& expr) { return { parse_program("func f(n, m) { h = " + expr + "; }") }; }

ExpressionForm classify(const std::string& expr, const std::string& var = "n")
{
    const auto p = parse_expr(expr);
    return classify_expression(p.expr(), var);
}

Diagnostic first_error(const std::string& src)
{
    try
    {
        parse_program(src);
    }
    catch (const InputError& e)
    {
        return e.diagnostics().at(0);
    }
    ADD_FAILURE() << "no error for: " << src;
    return {};
}

} // namespace

TEST(Parser, SingleAssignment)
{
    const auto p = parse_program("func f(n) { h = 8 * n; }");
    ASSERT_EQ(p.functions.size(), 1u);
    EXPECT_EQ(p.functions[0].name, "f");
    EXPECT_EQ(p.functions[0].params, std::vector<std::string> { "n" });
    ASSERT_EQ(p.functions[0].body.size(), 1u);
    EXPECT_EQ(p.functions[0].body[0]->kind, Stmt::Kind::Assign);
    EXPECT_EQ(p.functions[0].body[0]->name, "h");
}

TEST(Parser, EmptySource)
{
    EXPECT_TRUE(parse_program("").functions.empty());
    EXPECT_TRUE(parse_program("  # only a comment\n").functions.empty());
}

TEST(Parser, SyntaxErrorPointsAtBrace)
{
    const auto d = first_error("func f( {");
    EXPECT_EQ(d.code, "syntax");
    EXPECT_EQ(d.line, 1);
    EXPECT_EQ(d.column, 9);
}

TEST(Parser, DuplicateFunction)
{
    const auto d = first_error("func f() { }\nfunc f() { }");
    EXPECT_EQ(d.code, "duplicate_function");
    EXPECT_EQ(d.line, 2);
}

TEST(Parser, StatementKinds)
{
    const auto p = parse_program(R"(
func g(n) {
    x = 1.5;
    s = "a\"b\n";
    g(n - 1);
    print(x, s);
    println();
    for i in 0 .. n { print(i); }
    while x < 10 { x = x * 2; }
    if x == 1 { return x; } else if x > 2 { return 0; } else { return; }
}
)");
    const auto& b = p.functions.at(0).body;
    ASSERT_EQ(b.size(), 8u);
    EXPECT_EQ(b[0]->kind, Stmt::Kind::Assign);
    EXPECT_EQ(b[1]->exprs[0]->text, "a\"b\n");
    EXPECT_EQ(b[2]->kind, Stmt::Kind::Call);
    EXPECT_EQ(b[3]->kind, Stmt::Kind::Print);
    EXPECT_EQ(b[3]->exprs.size(), 2u);
    EXPECT_EQ(b[4]->kind, Stmt::Kind::Println);
    EXPECT_EQ(b[5]->kind, Stmt::Kind::For);
    EXPECT_EQ(b[5]->name, "i");
    EXPECT_EQ(b[6]->kind, Stmt::Kind::While);
    EXPECT_EQ(b[7]->kind, Stmt::Kind::If);
    ASSERT_EQ(b[7]->else_body.size(), 1u);
    EXPECT_EQ(b[7]->else_body[0]->kind, Stmt::Kind::If);
}

TEST(Parser, PrintlnTakesNoArguments)
{
    EXPECT_EQ(first_error("func f() { println(1); }").code, "syntax");
}

TEST(Parser, PowerIsRightAssociative)
{
    const auto p = parse_expr("2 ** 3 ** 2");
    const Expr& e = p.expr();
    ASSERT_EQ(e.kind, Expr::Kind::Binary);
    EXPECT_EQ(e.operands[0]->kind, Expr::Kind::Number);
    EXPECT_EQ(e.operands[1]->kind, Expr::Kind::Binary);
}

TEST(Parser, SpansCoverTokens)
{
    const std::string src = "func f(n) {\n  h = 8 * n;\n}\n";
    const auto p = parse_program(src);
    const auto& s = *p.functions[0].body[0];
    EXPECT_EQ(s.span.line, 2);
    EXPECT_EQ(s.span.column, 3);
    EXPECT_EQ(src.substr(s.exprs[0]->span.begin, s.exprs[0]->span.end - s.exprs[0]->span.begin), "8 * n");
}

TEST(Parser, RangeAfterInteger)
{
    const auto p = parse_program("func f() { for i in 1..4 { } }");
    const auto& s = *p.functions[0].body[0];
    EXPECT_EQ(s.exprs[0]->number, 1.0);
    EXPECT_EQ(s.exprs[1]->number, 4.0);
}

TEST(Classify, PaperForms)
{
    EXPECT_EQ(classify("8 * n").render(), "linear{a=8,b=0}");
    EXPECT_EQ(classify("2 * n ** 2").render(), "polynomial{degree=2,a=2}");
    EXPECT_EQ(classify("2 ** n").render(), "exponential{a=1,d=2}");
    EXPECT_EQ(classify("7").render(), "constant{7}");
}

TEST(Classify, FoldsConstants)
{
    EXPECT_EQ(classify("(4 + 4) * n").render(), "linear{a=8,b=0}");
    EXPECT_EQ(classify("n * 2 + 3 - 1").render(), "linear{a=2,b=2}");
    EXPECT_EQ(classify("n * n * 2").render(), "polynomial{degree=2,a=2}");
    EXPECT_EQ(classify("(n + 1) ** 2").render(), "polynomial{degree=2,a=1}");
    EXPECT_EQ(classify("3 * 2 ** (n + 1)").render(), "exponential{a=6,d=2}");
    EXPECT_EQ(classify("n - n").render(), "constant{0}");
    EXPECT_EQ(classify("n / 4").render(), "linear{a=0.25,b=0}");
}

TEST(Classify, Other)
{
    EXPECT_EQ(classify("n ** 0.5").family, FormFamily::Other);
    EXPECT_EQ(classify("1 / n").family, FormFamily::Other);
    EXPECT_EQ(classify("n ** n").family, FormFamily::Other);
    EXPECT_EQ(classify("n < 3").family, FormFamily::Other);
    EXPECT_EQ(classify("\"s\"").family, FormFamily::Other);
}

TEST(Classify, OtherVariablesAreOpaqueCoefficients)
{
    const auto f = classify("m * n");
    EXPECT_EQ(f.family, FormFamily::Linear);
    EXPECT_FALSE(f.a);
    EXPECT_EQ(f.render(), "linear{a=?,b=0}");
    EXPECT_EQ(classify("m * 3", "n").family, FormFamily::Constant);
}

TEST(Classify, FreeVariables)
{
    const auto p = parse_expr("m * n + g(n, m) + n");
    EXPECT_EQ(free_variables(p.expr()), (std::vector<std::string> { "m", "n" }));
}

namespace {

// Random expressions in n with small integer constants, so every coefficient
// is exact and reordering cannot change rounding.
std::string random_expr(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_int_distribution<int> small(1, 9);
    switch (pick(rng))
    {
    case 0: return std::to_string(small(rng));
    case 1: return "n";
    case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 5: return "(" + random_expr(rng, depth - 1) + ") ** " + std::to_string(small(rng) % 3 + 1);
    default: return std::to_string(small(rng) % 3 + 2) + " ** (" + random_expr(rng, depth - 1) + ")";
    }
}

} // namespace

// Property: swapping the operands of a top-level + or * leaves the form unchanged.
TEST(ClassifyProperty, TopLevelCommutativity)
{
    std::mt19937 rng(42);
    int non_trivial = 0;
    for (int i = 0; i < 500; ++i)
    {
        const std::string a = random_expr(rng, 3);
        const std::string b = random_expr(rng, 3);
        for (const char* op : { " + ", " * " })
        {
            const auto lhs = classify("(" + a + ")" + op + "(" + b + ")");
            const auto rhs = classify("(" + b + ")" + op + "(" + a + ")");
            EXPECT_EQ(lhs, rhs) << a << op << b << ": " << lhs.render() << " vs " << rhs.render();
            non_trivial += lhs.family != FormFamily::Other;
        }
    }
    EXPECT_GT(non_trivial, 300);
}

TEST(ClassifyProperty, Deterministic)
{
    std::mt19937 rng(8);
    for (int i = 0; i < 100; ++i)
    {
        const std::string e = random_expr(rng, 4);
        EXPECT_EQ(classify(e), classify(e)) << e;
    }
}

TEST(FormatNumber, ShortestRoundTrip)
{
    EXPECT_EQ(format_number(8), "8");
    EXPECT_EQ(format_number(0.25), "0.25");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
}
