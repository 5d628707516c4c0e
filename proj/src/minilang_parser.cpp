#include "errlens/minilang/ast.hpp"

#include <charconv>
#include <set>

namespace errlens::minilang {

const char* to_string(BinaryOp op)
{
    switch (op)
    {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Pow: return "**";
        case BinaryOp::Less: return "<";
        case BinaryOp::LessEq: return "<=";
        case BinaryOp::Greater: return ">";
        case BinaryOp::GreaterEq: return ">=";
        case BinaryOp::Equal: return "==";
        case BinaryOp::NotEqual: return "!=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

const Function* Program::find(std::string_view name) const
{
    for (const auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

namespace {

enum class Tok
{
    End,
    Ident,
    Number,
    String,
    Punct,
};

struct Token
{
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    bool integral = false;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    int column = 1;
};

class Lexer
{
public:
    explicit Lexer(const std::string& src)
        : m_src(src)
    {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true)
        {
            skip_trivia();
            Token t;
            t.begin = m_pos;
            t.line = m_line;
            t.column = m_col;
            if (m_pos >= m_src.size())
            {
                t.end = m_pos;
                out.push_back(t);
                return out;
            }
            const char c = m_src[m_pos];
            if (is_ident_start(c))
            {
                while (m_pos < m_src.size() && is_ident_char(m_src[m_pos]))
                    advance();
                t.kind = Tok::Ident;
                t.text = m_src.substr(t.begin, m_pos - t.begin);
            }
            else if (is_digit(c))
                lex_number(t);
            else if (c == '"')
                lex_string(t);
            else
                lex_punct(t);
            t.end = m_pos;
            out.push_back(std::move(t));
        }
    }

private:
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    [[noreturn]] void fail(const std::string& msg, int line, int col) const
    {
        throw InputError("syntax", msg, line, col);
    }

    void advance()
    {
        if (m_src[m_pos] == '\n')
        {
            ++m_line;
            m_col = 1;
        }
        else
            ++m_col;
        ++m_pos;
    }

    void skip_trivia()
    {
        while (m_pos < m_src.size())
        {
            const char c = m_src[m_pos];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
                advance();
            else if (c == '#')
            {
                while (m_pos < m_src.size() && m_src[m_pos] != '\n')
                    advance();
            }
            else
                break;
        }
    }

    void lex_number(Token& t)
    {
        while (m_pos < m_src.size() && is_digit(m_src[m_pos]))
            advance();
        bool integral = true;
        // "1..4" is a range, not a float.
        if (m_pos + 1 < m_src.size() && m_src[m_pos] == '.' && is_digit(m_src[m_pos + 1]))
        {
            integral = false;
            advance();
            while (m_pos < m_src.size() && is_digit(m_src[m_pos]))
                advance();
        }
        const std::string text = m_src.substr(t.begin, m_pos - t.begin);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size())
            fail("malformed number '" + text + "'", t.line, t.column);
        t.kind = Tok::Number;
        t.text = text;
        t.number = v;
        t.integral = integral;
    }

    void lex_string(Token& t)
    {
        advance();
        std::string value;
        while (true)
        {
            if (m_pos >= m_src.size() || m_src[m_pos] == '\n')
                fail("unterminated string literal", t.line, t.column);
            const char c = m_src[m_pos];
            if (c == '"')
            {
                advance();
                break;
            }
            if (c == '\\')
            {
                advance();
                if (m_pos >= m_src.size())
                    fail("unterminated string literal", t.line, t.column);
                const char e = m_src[m_pos];
                switch (e)
                {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    default: fail(std::string("unknown escape '\\") + e + "'", m_line, m_col - 1);
                }
                advance();
                continue;
            }
            value += c;
            advance();
        }
        t.kind = Tok::String;
        t.text = std::move(value);
    }

    void lex_punct(Token& t)
    {
        static const char* const two[] = { "**", "==", "!=", "<=", ">=", "&&", "||", ".." };
        for (const char* op : two)
        {
            if (m_src.compare(m_pos, 2, op) == 0)
            {
                advance();
                advance();
                t.kind = Tok::Punct;
                t.text = op;
                return;
            }
        }
        static const std::string one = "+-*/%=<>(){},;!";
        const char c = m_src[m_pos];
        if (one.find(c) == std::string::npos)
            fail(std::string("unexpected character '") + c + "'", t.line, t.column);
        advance();
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
    }

    const std::string& m_src;
    std::size_t m_pos = 0;
    int m_line = 1;
    int m_col = 1;
};

const std::set<std::string> keywords = { "func", "for", "in", "while", "if", "else", "return", "print", "println" };

class Parser
{
public:
    Parser(std::vector<Token> toks)
        : m_toks(std::move(toks))
    {}

    std::vector<Function> program()
    {
        std::vector<Function> fns;
        std::set<std::string> names;
        while (peek().kind != Tok::End)
        {
            Function f = function();
            if (!names.insert(f.name).second)
                throw InputError("duplicate_function", "duplicate function name '" + f.name + "'", f.span.line,
                    f.span.column);
            fns.push_back(std::move(f));
        }
        return fns;
    }

private:
    const Token& peek(std::size_t k = 0) const { return m_toks[std::min(m_pos + k, m_toks.size() - 1)]; }
    const Token& prev() const { return m_toks[m_pos - 1]; }

    bool is_punct(const char* p, std::size_t k = 0) const
    {
        return peek(k).kind == Tok::Punct && peek(k).text == p;
    }
    bool is_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    [[noreturn]] void unexpected(const std::string& expected) const
    {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        if (t.kind == Tok::String)
            found = "string literal";
        throw InputError("syntax", "expected " + expected + ", found " + found, t.line, t.column);
    }

    const Token& next() { return m_toks[m_pos++]; }

    void expect(const char* p)
    {
        if (!is_punct(p))
            unexpected(std::string("'") + p + "'");
        ++m_pos;
    }

    void expect_keyword(const char* kw)
    {
        if (!is_keyword(kw))
            unexpected(std::string("'") + kw + "'");
        ++m_pos;
    }

    std::string identifier(const char* what)
    {
        if (peek().kind != Tok::Ident || keywords.count(peek().text))
            unexpected(what);
        return next().text;
    }

    SourceSpan span_from(const Token& first) const
    {
        const Token& last = prev();
        SourceSpan s;
        s.begin = first.begin;
        s.end = last.end;
        s.line = first.line;
        s.column = first.column;
        s.end_line = last.line;
        s.end_column = last.column + static_cast<int>(last.end - last.begin);
        return s;
    }

    Function function()
    {
        const Token& first = peek();
        expect_keyword("func");
        Function f;
        f.name = identifier("function name");
        expect("(");
        if (!is_punct(")"))
        {
            f.params.push_back(identifier("parameter name or ')'"));
            while (is_punct(","))
            {
                ++m_pos;
                f.params.push_back(identifier("parameter name"));
            }
        }
        expect(")");
        f.body = block();
        f.span = span_from(first);
        return f;
    }

    Block block()
    {
        expect("{");
        Block b;
        while (!is_punct("}"))
        {
            if (peek().kind == Tok::End)
                unexpected("'}'");
            b.push_back(statement());
        }
        ++m_pos;
        return b;
    }

    std::vector<ExprPtr> call_args()
    {
        std::vector<ExprPtr> args;
        expect("(");
        if (!is_punct(")"))
        {
            args.push_back(expression());
            while (is_punct(","))
            {
                ++m_pos;
                args.push_back(expression());
            }
        }
        expect(")");
        return args;
    }

    StmtPtr statement()
    {
        const Token& first = peek();
        auto s = std::make_unique<Stmt>();
        if (is_keyword("for"))
        {
            ++m_pos;
            s->kind = Stmt::Kind::For;
            s->name = identifier("loop variable");
            expect_keyword("in");
            s->exprs.push_back(expression());
            expect("..");
            s->exprs.push_back(expression());
            s->body = block();
        }
        else if (is_keyword("while"))
        {
            ++m_pos;
            s->kind = Stmt::Kind::While;
            s->exprs.push_back(expression());
            s->body = block();
        }
        else if (is_keyword("if"))
        {
            ++m_pos;
            s->kind = Stmt::Kind::If;
            s->exprs.push_back(expression());
            s->body = block();
            if (is_keyword("else"))
            {
                ++m_pos;
                if (is_keyword("if"))
                    s->else_body.push_back(statement());
                else
                    s->else_body = block();
            }
        }
        else if (is_keyword("return"))
        {
            ++m_pos;
            s->kind = Stmt::Kind::Return;
            if (!is_punct(";"))
                s->exprs.push_back(expression());
            expect(";");
        }
        else if (is_keyword("print"))
        {
            ++m_pos;
            s->kind = Stmt::Kind::Print;
            s->name = "print";
            s->exprs = call_args();
            expect(";");
        }
        else if (is_keyword("println"))
        {
            ++m_pos;
            s->kind = Stmt::Kind::Println;
            s->name = "println";
            expect("(");
            expect(")");
            expect(";");
        }
        else if (peek().kind == Tok::Ident && !keywords.count(peek().text) && is_punct("=", 1))
        {
            s->kind = Stmt::Kind::Assign;
            s->name = next().text;
            ++m_pos;
            s->exprs.push_back(expression());
            expect(";");
        }
        else if (peek().kind == Tok::Ident && !keywords.count(peek().text) && is_punct("(", 1))
        {
            s->kind = Stmt::Kind::Call;
            s->name = next().text;
            s->exprs = call_args();
            expect(";");
        }
        else
            unexpected("statement");
        s->span = span_from(first);
        return s;
    }

    // Precedence, loosest first: || && comparison +- */% unary **
    ExprPtr expression() { return logical_or(); }

    ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, const Token& first)
    {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->binary_op = op;
        e->operands.push_back(std::move(lhs));
        e->operands.push_back(std::move(rhs));
        e->span = span_from(first);
        return e;
    }

    ExprPtr logical_or()
    {
        const Token& first = peek();
        auto lhs = logical_and();
        while (is_punct("||"))
        {
            ++m_pos;
            lhs = make_binary(BinaryOp::Or, std::move(lhs), logical_and(), first);
        }
        return lhs;
    }

    ExprPtr logical_and()
    {
        const Token& first = peek();
        auto lhs = comparison();
        while (is_punct("&&"))
        {
            ++m_pos;
            lhs = make_binary(BinaryOp::And, std::move(lhs), comparison(), first);
        }
        return lhs;
    }

    ExprPtr comparison()
    {
        const Token& first = peek();
        auto lhs = additive();
        static const std::pair<const char*, BinaryOp> ops[] = { { "<", BinaryOp::Less }, { "<=", BinaryOp::LessEq },
            { ">", BinaryOp::Greater }, { ">=", BinaryOp::GreaterEq }, { "==", BinaryOp::Equal },
            { "!=", BinaryOp::NotEqual } };
        for (const auto& [p, op] : ops)
        {
            if (is_punct(p))
            {
                ++m_pos;
                return make_binary(op, std::move(lhs), additive(), first);
            }
        }
        return lhs;
    }

    ExprPtr additive()
    {
        const Token& first = peek();
        auto lhs = multiplicative();
        while (is_punct("+") || is_punct("-"))
        {
            const BinaryOp op = next().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = make_binary(op, std::move(lhs), multiplicative(), first);
        }
        return lhs;
    }

    ExprPtr multiplicative()
    {
        const Token& first = peek();
        auto lhs = unary();
        while (is_punct("*") || is_punct("/") || is_punct("%"))
        {
            const std::string& t = next().text;
            const BinaryOp op = t == "*" ? BinaryOp::Mul : t == "/" ? BinaryOp::Div : BinaryOp::Mod;
            lhs = make_binary(op, std::move(lhs), unary(), first);
        }
        return lhs;
    }

    ExprPtr unary()
    {
        const Token& first = peek();
        if (is_punct("-") || is_punct("!"))
        {
            const UnaryOp op = next().text == "-" ? UnaryOp::Neg : UnaryOp::Not;
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->unary_op = op;
            e->operands.push_back(unary());
            e->span = span_from(first);
            return e;
        }
        return power();
    }

    // Right associative; binds tighter than unary minus on its left.
    ExprPtr power()
    {
        const Token& first = peek();
        auto base = primary();
        if (is_punct("**"))
        {
            ++m_pos;
            return make_binary(BinaryOp::Pow, std::move(base), unary(), first);
        }
        return base;
    }

    ExprPtr primary()
    {
        const Token& first = peek();
        auto e = std::make_unique<Expr>();
        if (first.kind == Tok::Number)
        {
            ++m_pos;
            e->kind = Expr::Kind::Number;
            e->number = first.number;
            e->integral = first.integral;
        }
        else if (first.kind == Tok::String)
        {
            ++m_pos;
            e->kind = Expr::Kind::String;
            e->text = first.text;
        }
        else if (is_punct("("))
        {
            ++m_pos;
            auto inner = expression();
            expect(")");
            inner->span = span_from(first);
            return inner;
        }
        else if (first.kind == Tok::Ident && !keywords.count(first.text))
        {
            ++m_pos;
            e->text = first.text;
            if (is_punct("("))
            {
                e->kind = Expr::Kind::Call;
                e->operands = call_args();
            }
            else
                e->kind = Expr::Kind::Variable;
        }
        else
            unexpected("expression");
        e->span = span_from(first);
        return e;
    }

    std::vector<Token> m_toks;
    std::size_t m_pos = 0;
};

} // namespace

Program parse_program(std::string source)
{
    Program p;
    p.source = std::move(source);
    Parser parser(Lexer(p.source).run());
    p.functions = parser.program();
    return p;
}

} // namespace errlens::minilang
