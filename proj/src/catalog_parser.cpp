#include "errlens/eps/catalog.hpp"

#include <set>

namespace errlens::eps {

namespace {

enum class Tok
{
    End,
    Ident,
    String,
    Punct,
};

struct Token
{
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&] {
        if (src[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
        ++i;
    };
    auto ident_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    };
    while (true)
    {
        while (i < src.size())
        {
            if (src[i] == ' ' || src[i] == '\t' || src[i] == '\r' || src[i] == '\n')
                advance();
            else if (src[i] == '#')
                while (i < src.size() && src[i] != '\n')
                    advance();
            else
                break;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (i >= src.size())
        {
            out.push_back(t);
            return out;
        }
        const char c = src[i];
        if (ident_char(c))
        {
            const std::size_t start = i;
            while (i < src.size() && ident_char(src[i]))
                advance();
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(start, i - start));
        }
        else if (c == '"')
        {
            advance();
            while (true)
            {
                if (i >= src.size() || src[i] == '\n')
                    throw InputError("syntax", "unterminated string literal", t.line, t.column);
                if (src[i] == '"')
                {
                    advance();
                    break;
                }
                if (src[i] == '\\')
                {
                    const int eline = line, ecol = col;
                    advance();
                    if (i >= src.size())
                        throw InputError("syntax", "unterminated string literal", t.line, t.column);
                    switch (src[i])
                    {
                        case 'n': t.text += '\n'; break;
                        case 't': t.text += '\t'; break;
                        case '"': t.text += '"'; break;
                        case '\\': t.text += '\\'; break;
                        default:
                            throw InputError("syntax", std::string("unknown escape '\\") + src[i] + "'", eline, ecol);
                    }
                    advance();
                    continue;
                }
                t.text += src[i];
                advance();
            }
            t.kind = Tok::String;
        }
        else if (std::string_view("{}():;,").find(c) != std::string_view::npos)
        {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            advance();
        }
        else
            throw InputError("syntax", std::string("unexpected character '") + c + "'", t.line, t.column);
        out.push_back(std::move(t));
    }
}

class Parser
{
public:
    explicit Parser(std::vector<Token> toks)
        : m_toks(std::move(toks))
    {}

    Catalog catalog()
    {
        Catalog c;
        keyword("catalog");
        c.name = string_lit();
        punct("{");
        bool seen_version = false;
        while (!is_punct("}"))
        {
            if (is_ident("version"))
            {
                if (seen_version)
                    fail_here("duplicate 'version' field");
                seen_version = true;
                ++m_pos;
                punct(":");
                c.version = string_lit();
                punct(";");
            }
            else if (is_ident("mode"))
                c.modes.push_back(mode());
            else if (is_ident("conditions"))
                conditions(c.atoms);
            else if (is_ident("eps"))
                c.scenarios.push_back(scenario());
            else
                expected({ "'version'", "'mode'", "'conditions'", "'eps'", "'}'" });
        }
        ++m_pos;
        if (peek().kind != Tok::End)
            expected({ "end of input" });
        return c;
    }

private:
    const Token& peek() const { return m_toks[m_pos]; }
    SourcePos here() const { return { peek().line, peek().column }; }

    bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool is_ident(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    [[noreturn]] void fail_here(const std::string& msg) const
    {
        throw InputError("syntax", msg, peek().line, peek().column);
    }

    [[noreturn]] void expected(std::initializer_list<const char*> what) const
    {
        std::string list;
        for (const char* w : what)
            list += (list.empty() ? "" : ", ") + std::string(w);
        const Token& t = peek();
        const std::string found = t.kind == Tok::End ? "end of input"
            : t.kind == Tok::String                 ? "string literal"
                                                    : "'" + t.text + "'";
        throw InputError("syntax",
            (what.size() == 1 ? "expected " : "expected one of: ") + list + "; found " + found, t.line, t.column);
    }

    void punct(const char* p)
    {
        if (!is_punct(p))
            expected({ (std::string("'") + p + "'").c_str() });
        ++m_pos;
    }

    void keyword(const char* kw)
    {
        if (!is_ident(kw))
            expected({ (std::string("'") + kw + "'").c_str() });
        ++m_pos;
    }

    std::string string_lit()
    {
        if (peek().kind != Tok::String)
            expected({ "string literal" });
        return m_toks[m_pos++].text;
    }

    std::string ident()
    {
        if (peek().kind != Tok::Ident)
            expected({ "identifier" });
        return m_toks[m_pos++].text;
    }

    ErrorMode mode()
    {
        ErrorMode m;
        m.pos = here();
        keyword("mode");
        m.id = ident();
        punct("{");
        std::set<std::string> seen;
        while (!is_punct("}"))
        {
            std::string* field = nullptr;
            if (is_ident("name"))
                field = &m.name;
            else if (is_ident("description"))
                field = &m.description;
            else if (is_ident("source"))
                field = &m.source;
            else
                expected({ "'name'", "'description'", "'source'", "'}'" });
            if (!seen.insert(peek().text).second)
                fail_here("duplicate field '" + peek().text + "' in mode '" + m.id + "'");
            ++m_pos;
            punct(":");
            *field = string_lit();
            punct(";");
        }
        ++m_pos;
        return m;
    }

    void conditions(std::vector<ConditionAtom>& out)
    {
        keyword("conditions");
        punct("{");
        while (!is_punct("}"))
        {
            ConditionAtom a;
            a.pos = here();
            a.name = ident();
            punct("(");
            if (!is_punct(")"))
            {
                a.params.push_back(param());
                while (is_punct(","))
                {
                    ++m_pos;
                    a.params.push_back(param());
                }
            }
            punct(")");
            punct(":");
            if (is_ident("AUTO"))
            {
                ++m_pos;
                a.kind = AtomKind::Auto;
                a.extractor = ident();
            }
            else if (is_ident("HUMAN"))
            {
                ++m_pos;
                a.kind = AtomKind::Human;
                a.question_template = string_lit();
            }
            else
                expected({ "'AUTO'", "'HUMAN'" });
            punct(";");
            out.push_back(std::move(a));
        }
        ++m_pos;
    }

    Param param()
    {
        Param p;
        p.name = ident();
        punct(":");
        if (is_ident("goal"))
            p.sort = Sort::Goal;
        else if (is_ident("data"))
            p.sort = Sort::Data;
        else if (is_ident("anchor"))
            p.sort = Sort::Anchor;
        else
            expected({ "'goal'", "'data'", "'anchor'" });
        ++m_pos;
        return p;
    }

    ErrorProneScenario scenario()
    {
        ErrorProneScenario s;
        s.pos = here();
        keyword("eps");
        s.id = string_lit();
        punct("{");
        std::set<std::string> seen;
        while (!is_punct("}"))
        {
            const std::string field = peek().kind == Tok::Ident ? peek().text : "";
            if (field != "mode" && field != "if" && field != "when" && field != "then" && field != "severity")
                expected({ "'mode'", "'if'", "'when'", "'then'", "'severity'", "'}'" });
            if (!seen.insert(field).second)
                fail_here("duplicate field '" + field + "' in eps '" + s.id + "'");
            ++m_pos;
            punct(":");
            if (field == "mode")
                s.mode_id = ident();
            else if (field == "if")
                s.if_clause = expression();
            else if (field == "when")
                s.when_clause = expression();
            else if (field == "then")
                s.then = then_clause();
            else
            {
                if (is_ident("low"))
                    s.severity = Level::Low;
                else if (is_ident("medium"))
                    s.severity = Level::Medium;
                else if (is_ident("high"))
                    s.severity = Level::High;
                else
                    expected({ "'low'", "'medium'", "'high'" });
                ++m_pos;
            }
            punct(";");
        }
        for (const char* required : { "mode", "if", "when", "then" })
            if (!seen.count(required))
                fail_here("eps '" + s.id + "' is missing its '" + required + "' field");
        ++m_pos;
        return s;
    }

    ThenClause then_clause()
    {
        ThenClause t;
        if (is_ident("omission"))
            t.tendency = Tendency::Omission;
        else if (is_ident("mismatch"))
            t.tendency = Tendency::Mismatch;
        else
            expected({ "'omission'", "'mismatch'" });
        ++m_pos;
        punct("(");
        t.target = ident();
        if (is_punct(","))
        {
            ++m_pos;
            t.message = string_lit();
        }
        punct(")");
        return t;
    }

    Clause expression()
    {
        const SourcePos pos = here();
        std::vector<Clause> parts;
        parts.push_back(conjunction());
        while (is_ident("or"))
        {
            ++m_pos;
            parts.push_back(conjunction());
        }
        if (parts.size() == 1)
            return std::move(parts.front());
        Clause c = Clause::any_of(std::move(parts));
        c.pos = pos;
        return c;
    }

    Clause conjunction()
    {
        const SourcePos pos = here();
        std::vector<Clause> parts;
        parts.push_back(unary());
        while (is_ident("and"))
        {
            ++m_pos;
            parts.push_back(unary());
        }
        if (parts.size() == 1)
            return std::move(parts.front());
        Clause c = Clause::all_of(std::move(parts));
        c.pos = pos;
        return c;
    }

    Clause unary()
    {
        const SourcePos pos = here();
        if (is_ident("not"))
        {
            ++m_pos;
            Clause c = Clause::negate(unary());
            c.pos = pos;
            return c;
        }
        if (is_punct("("))
        {
            ++m_pos;
            Clause c = expression();
            punct(")");
            return c;
        }
        if (peek().kind != Tok::Ident || is_ident("and") || is_ident("or"))
            expected({ "condition", "'not'", "'('" });
        Clause c;
        c.kind = Clause::Kind::Apply;
        c.pos = pos;
        c.atom = ident();
        punct("(");
        if (!is_punct(")"))
        {
            c.args.push_back(ident());
            while (is_punct(","))
            {
                ++m_pos;
                c.args.push_back(ident());
            }
        }
        punct(")");
        return c;
    }

    std::vector<Token> m_toks;
    std::size_t m_pos = 0;
};

} // namespace

Catalog parse_catalog(std::string_view text, const ExtractorRegistry& registry)
{
    Catalog c = Parser(lex(text)).catalog();
    auto diags = validate_catalog(c, registry);
    if (!diags.empty())
        throw InputError(std::move(diags));
    return c;
}

} // namespace errlens::eps
