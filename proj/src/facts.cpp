#include "errlens/minilang/facts.hpp"
#include "errlens/minilang/expression_form.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>

namespace errlens::minilang {

using nlohmann::json;

const char* to_string(Sort s)
{
    switch (s)
    {
        case Sort::Goal: return "goal";
        case Sort::Data: return "data";
        case Sort::Anchor: return "anchor";
        case Sort::Value: return "value";
    }
    return "?";
}

std::optional<Sort> sort_from_string(std::string_view s)
{
    for (auto sort : { Sort::Goal, Sort::Data, Sort::Anchor, Sort::Value })
        if (s == to_string(sort))
            return sort;
    return std::nullopt;
}

std::string Fact::render() const
{
    std::string out = atom + "(";
    for (std::size_t i = 0; i < args.size(); ++i)
    {
        if (i)
            out += ", ";
        out += args[i].value;
    }
    return out + ")";
}

const std::vector<FactSchema>& fact_vocabulary()
{
    using enum Sort;
    static const std::vector<FactSchema> vocab = {
        { "expr_form", { Value, Value, Anchor }, 3, "minilang_frontend" },
        { "assigns", { Anchor, Value }, 2, "minilang_frontend" },
        { "trailing_output", { Anchor, Value }, 2, "minilang_frontend" },
        { "missing_trailer", { Anchor, Goal }, 1, "minilang_frontend" },
        { "goal_completed", { Goal, Anchor }, 2, "minilang_frontend" },
        { "unpaired_call", { Anchor, Value, Value, Goal }, 3, "minilang_frontend" },
        { "task_decomposed", { Goal }, 1, "minilang_frontend" },
        { "main_subtask", { Goal, Goal }, 2, "minilang_frontend" },
        { "subgoal_is_last", { Goal, Goal }, 2, "minilang_frontend" },
        { "subgoal_necessary", { Goal, Value }, 2, "minilang_frontend" },
        { "anchor_unresolved", { Value, Value }, 2, "minilang_frontend" },
        { "has_sample_data", { Data, Value, Value }, 3, "minilang_frontend" },
        { "data_family", { Data, Value, Value, Value, Value }, 5, "model_fitter" },
        { "data_unfittable", { Data, Value }, 2, "model_fitter" },
    };
    return vocab;
}

const FactSchema* find_fact_schema(std::string_view atom)
{
    for (const auto& s : fact_vocabulary())
        if (s.atom == atom)
            return &s;
    return nullptr;
}

std::vector<const Fact*> FactSet::named(std::string_view atom) const
{
    std::vector<const Fact*> out;
    for (const auto& f : facts)
        if (f.atom == atom)
            out.push_back(&f);
    return out;
}

bool FactSet::contains(const Fact& f) const
{
    return std::find(facts.begin(), facts.end(), f) != facts.end();
}

void FactSet::append(const FactSet& other)
{
    facts.insert(facts.end(), other.facts.begin(), other.facts.end());
}

std::string anchor_id(const std::string& function, const SourceSpan& span)
{
    return function + "@" + std::to_string(span.line) + ":" + std::to_string(span.column);
}

namespace {

class Extractor
{
public:
    Extractor(const Program& p, const TaskSpec& t)
        : m_program(p)
        , m_task(t)
    {}

    FactSet run()
    {
        for (const auto& fn : m_program.functions)
            code_facts(fn);
        trailer_facts();
        pair_facts();
        goal_facts();
        data_facts();
        return std::move(m_out);
    }

private:
    void emit_code(std::string atom, std::vector<FactArg> args, const SourceSpan& span)
    {
        m_out.facts.push_back({ std::move(atom), std::move(args), { span }, std::nullopt, "minilang_frontend" });
    }

    void emit_task(std::string atom, std::vector<FactArg> args, const std::string& path,
        const char* provider = "minilang_frontend")
    {
        m_out.facts.push_back({ std::move(atom), std::move(args), {}, path, provider });
    }

    void expr_forms(const std::string& fn, const Expr& e, const std::string& anchor)
    {
        auto vars = free_variables(e);
        if (vars.empty())
            vars.push_back("_");
        for (const auto& v : vars)
        {
            const auto form = classify_expression(e, v);
            emit_code("expr_form", { { Sort::Value, v }, { Sort::Value, form.render() }, { Sort::Anchor, anchor } },
                e.span);
        }
        (void)fn;
    }

    static std::vector<std::string> trailing_tokens(const Block& b)
    {
        std::vector<std::string> toks;
        for (auto it = b.rbegin(); it != b.rend(); ++it)
        {
            if ((*it)->kind == Stmt::Kind::Print)
                toks.push_back("print");
            else if ((*it)->kind == Stmt::Kind::Println)
                toks.push_back("println");
            else
                break;
        }
        std::reverse(toks.begin(), toks.end());
        return toks;
    }

    static std::string join(const std::vector<std::string>& toks)
    {
        std::string out;
        for (const auto& t : toks)
            out += (out.empty() ? "" : " ") + t;
        return out;
    }

    void trailing_fact(const Block& b, const std::string& anchor, const SourceSpan& span)
    {
        const auto toks = trailing_tokens(b);
        if (!toks.empty())
            emit_code("trailing_output", { { Sort::Anchor, anchor }, { Sort::Value, join(toks) } }, span);
    }

    void block_facts(const std::string& fn, const Block& b)
    {
        for (const auto& s : b)
        {
            const std::string anchor = anchor_id(fn, s->span);
            switch (s->kind)
            {
                case Stmt::Kind::Assign:
                    emit_code("assigns", { { Sort::Anchor, anchor }, { Sort::Value, s->name } }, s->span);
                    expr_forms(fn, *s->exprs[0], anchor);
                    break;
                case Stmt::Kind::Print:
                    for (const auto& arg : s->exprs)
                        expr_forms(fn, *arg, anchor_id(fn, arg->span));
                    break;
                case Stmt::Kind::For:
                case Stmt::Kind::While:
                    block_facts(fn, s->body);
                    trailing_fact(s->body, anchor, s->span);
                    break;
                case Stmt::Kind::If:
                    block_facts(fn, s->body);
                    block_facts(fn, s->else_body);
                    break;
                default:
                    break;
            }
        }
    }

    void code_facts(const Function& fn)
    {
        block_facts(fn.name, fn.body);
        trailing_fact(fn.body, anchor_id(fn.name, fn.span), fn.span);
    }

    static bool ends_with(const std::vector<std::string>& actual, const std::vector<std::string>& expected)
    {
        return actual.size() >= expected.size()
            && std::equal(expected.rbegin(), expected.rend(), actual.rbegin());
    }

    void collect_loops(const Block& b, std::vector<const Stmt*>& out)
    {
        for (const auto& s : b)
        {
            if (s->kind == Stmt::Kind::For || s->kind == Stmt::Kind::While)
                out.push_back(s.get());
            collect_loops(s->body, out);
            collect_loops(s->else_body, out);
        }
    }

    void missing_trailer(const std::string& anchor, const SourceSpan& span, const ExpectedTrailer& t)
    {
        std::vector<FactArg> args { { Sort::Anchor, anchor } };
        if (t.goal)
            args.push_back({ Sort::Goal, *t.goal });
        emit_code("missing_trailer", std::move(args), span);
    }

    void trailer_facts()
    {
        if (!m_task.expected_trailer)
            return;
        const auto& t = *m_task.expected_trailer;
        const Function* fn = m_program.find(t.function);
        if (!fn)
        {
            emit_task("anchor_unresolved", { { Sort::Value, t.goal.value_or("expected_trailer") }, { Sort::Value, t.function } },
                "/expected_trailer/function");
            return;
        }
        if (t.scope == TrailerScope::Function)
        {
            if (!ends_with(trailing_tokens(fn->body), t.tokens))
                missing_trailer(anchor_id(fn->name, fn->span), fn->span, t);
            else if (t.goal)
                emit_code("goal_completed", { { Sort::Goal, *t.goal }, { Sort::Anchor, anchor_id(fn->name, fn->span) } },
                    fn->span);
            return;
        }
        std::vector<const Stmt*> loops;
        collect_loops(fn->body, loops);
        bool all_present = !loops.empty();
        for (const auto* loop : loops)
            if (!ends_with(trailing_tokens(loop->body), t.tokens))
            {
                missing_trailer(anchor_id(fn->name, loop->span), loop->span, t);
                all_present = false;
            }
        // Positive evidence only when every loop ends with the trailer.
        if (all_present && t.goal)
            emit_code("goal_completed", { { Sort::Goal, *t.goal }, { Sort::Anchor, anchor_id(fn->name, fn->span) } },
                fn->span);
    }

    struct CallSite
    {
        std::string name;
        SourceSpan span;
    };

    void collect_calls(const Expr& e, std::vector<CallSite>& out)
    {
        if (e.kind == Expr::Kind::Call)
            out.push_back({ e.text, e.span });
        for (const auto& o : e.operands)
            collect_calls(*o, out);
    }

    void collect_calls(const Block& b, std::vector<CallSite>& out)
    {
        for (const auto& s : b)
        {
            if (s->kind == Stmt::Kind::Call)
                out.push_back({ s->name, s->span });
            for (const auto& e : s->exprs)
                collect_calls(*e, out);
            collect_calls(s->body, out);
            collect_calls(s->else_body, out);
        }
    }

    void pair_facts()
    {
        if (m_task.pair_table.empty())
            return;
        for (const auto& fn : m_program.functions)
        {
            std::vector<CallSite> calls;
            collect_calls(fn.body, calls);
            std::stable_sort(calls.begin(), calls.end(),
                [](const CallSite& a, const CallSite& b) { return a.span.begin < b.span.begin; });
            for (std::size_t i = 0; i < calls.size(); ++i)
                for (const auto& pair : m_task.pair_table)
                {
                    if (calls[i].name != pair.acquire)
                        continue;
                    const bool released = std::any_of(calls.begin() + static_cast<std::ptrdiff_t>(i) + 1, calls.end(),
                        [&](const CallSite& c) { return c.name == pair.release; });
                    if (released)
                        continue;
                    std::vector<FactArg> args { { Sort::Anchor, anchor_id(fn.name, calls[i].span) },
                        { Sort::Value, pair.acquire }, { Sort::Value, pair.release } };
                    if (pair.goal)
                        args.push_back({ Sort::Goal, *pair.goal });
                    emit_code("unpaired_call", std::move(args), calls[i].span);
                }
        }
    }

    bool resolves(const std::string& anchor) const
    {
        if (m_program.find(anchor))
            return true;
        // L<a> or L<a>-L<b>
        auto parse_line = [](std::string_view s, int& out) {
            if (s.size() < 2 || s[0] != 'L')
                return false;
            auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), out);
            return ec == std::errc() && p == s.data() + s.size() && out >= 1;
        };
        int from = 0, to = 0;
        const auto dash = anchor.find('-');
        if (dash == std::string::npos)
        {
            if (!parse_line(anchor, from))
                return false;
            to = from;
        }
        else if (!parse_line(std::string_view(anchor).substr(0, dash), from)
            || !parse_line(std::string_view(anchor).substr(dash + 1), to))
            return false;
        const int lines = static_cast<int>(std::count(m_program.source.begin(), m_program.source.end(), '\n'))
            + (m_program.source.empty() || m_program.source.back() == '\n' ? 0 : 1);
        return from <= to && to <= lines;
    }

    void goal_facts()
    {
        for (const auto* g : m_task.goals())
        {
            if (g->code_anchor && !resolves(*g->code_anchor))
                emit_task("anchor_unresolved", { { Sort::Value, g->id }, { Sort::Value, *g->code_anchor } },
                    g->path + "/code_anchor");
            if (g->children.size() >= 2)
            {
                emit_task("task_decomposed", { { Sort::Goal, g->id } }, g->path);
                const auto& first = g->children.front();
                const auto& last = g->children.back();
                emit_task("main_subtask", { { Sort::Goal, first.id }, { Sort::Goal, g->id } }, first.path);
                emit_task("subgoal_is_last", { { Sort::Goal, last.id }, { Sort::Goal, g->id } }, last.path);
            }
            if (g->necessary_for_parent != Necessity::Unknown && m_task.parent_of(g->id))
                emit_task("subgoal_necessary",
                    { { Sort::Goal, g->id },
                        { Sort::Value, g->necessary_for_parent == Necessity::Necessary ? "true" : "false" } },
                    g->path + "/necessary_for_parent");
        }
    }

    void data_facts()
    {
        for (const auto& s : m_task.sample_data)
        {
            emit_task("has_sample_data", { { Sort::Data, s.id }, { Sort::Value, s.x_name }, { Sort::Value, s.y_name } },
                s.path);
            try
            {
                const auto sel = fit::select_family(s.points, m_task.config.fit);
                emit_task("data_family",
                    { { Sort::Data, s.id }, { Sort::Value, fit::to_string(sel.best.family) },
                        { Sort::Value, format_number(sel.best.a) }, { Sort::Value, format_number(sel.best.shape) },
                        { Sort::Value, format_number(sel.best.nrmse) } },
                    s.path + "/points", "model_fitter");
            }
            catch (const fit::FitError& e)
            {
                emit_task("data_unfittable",
                    { { Sort::Data, s.id }, { Sort::Value, std::string(fit::to_string(e.code())) + ": " + e.what() } },
                    s.path + "/points", "model_fitter");
            }
        }
    }

    const Program& m_program;
    const TaskSpec& m_task;
    FactSet m_out;
};

json span_json(const SourceSpan& s)
{
    return { { "begin", s.begin }, { "end", s.end }, { "line", s.line }, { "column", s.column },
        { "end_line", s.end_line }, { "end_column", s.end_column } };
}

} // namespace

FactSet extract_facts(const Program& program, const TaskSpec& task)
{
    return Extractor(program, task).run();
}

std::string write_fact_document(const FactSet& facts)
{
    json arr = json::array();
    for (const auto& f : facts.facts)
    {
        json args = json::array();
        for (const auto& a : f.args)
            args.push_back(a.value);
        json ev = json::array();
        for (const auto& s : f.evidence)
            ev.push_back(span_json(s));
        json j = { { "atom", f.atom }, { "args", args }, { "evidence", ev }, { "provenance", f.provenance } };
        if (f.task_path)
            j["task_path"] = *f.task_path;
        arr.push_back(std::move(j));
    }
    return json { { "facts", arr } }.dump(2) + "\n";
}

FactSet parse_fact_document(std::string_view json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw InputError("facts_syntax", std::string("malformed fact document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("facts") || !doc["facts"].is_array())
        throw InputError("facts", "fact document must be an object with a 'facts' array");

    std::vector<Diagnostic> diags;
    auto error = [&](std::size_t i, const std::string& msg) {
        diags.push_back({ Severity::Error, "facts", msg, 0, 0, "/facts/" + std::to_string(i) });
    };

    FactSet out;
    const auto& arr = doc["facts"];
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        const auto& j = arr[i];
        if (!j.is_object() || !j.contains("atom") || !j["atom"].is_string())
        {
            error(i, "fact needs a string 'atom'");
            continue;
        }
        Fact f;
        f.atom = j["atom"].get<std::string>();
        const FactSchema* schema = find_fact_schema(f.atom);
        if (!schema)
        {
            error(i, "unknown fact atom '" + f.atom + "'");
            continue;
        }
        const json args = j.value("args", json::array());
        if (!args.is_array() || args.size() < schema->required || args.size() > schema->sorts.size())
        {
            error(i, "fact '" + f.atom + "' has wrong number of arguments");
            continue;
        }
        bool ok = true;
        for (std::size_t k = 0; k < args.size(); ++k)
        {
            std::string value;
            if (args[k].is_string())
                value = args[k].get<std::string>();
            else if (args[k].is_object() && args[k].contains("value") && args[k]["value"].is_string())
            {
                value = args[k]["value"].get<std::string>();
                if (args[k].contains("sort") && args[k]["sort"] != to_string(schema->sorts[k]))
                {
                    error(i, "argument " + std::to_string(k) + " of '" + f.atom + "' must have sort "
                            + to_string(schema->sorts[k]));
                    ok = false;
                }
            }
            else
            {
                error(i, "argument " + std::to_string(k) + " must be a string");
                ok = false;
            }
            f.args.push_back({ schema->sorts[k], std::move(value) });
        }
        if (const auto ev = j.value("evidence", json::array()); ev.is_array())
            for (const auto& s : ev)
            {
                if (!s.is_object())
                {
                    ok = false;
                    error(i, "evidence entries must be span objects");
                    continue;
                }
                SourceSpan span;
                span.begin = s.value("begin", std::size_t { 0 });
                span.end = s.value("end", std::size_t { 0 });
                span.line = s.value("line", 0);
                span.column = s.value("column", 0);
                span.end_line = s.value("end_line", span.line);
                span.end_column = s.value("end_column", span.column);
                f.evidence.push_back(span);
            }
        if (j.contains("task_path") && j["task_path"].is_string())
            f.task_path = j["task_path"].get<std::string>();
        f.provenance = j.value("provenance", std::string("external"));
        if (f.evidence.empty() && !f.task_path)
        {
            error(i, "fact '" + f.atom + "' carries no evidence span or task path");
            ok = false;
        }
        if (ok)
            out.facts.push_back(std::move(f));
    }
    if (!diags.empty())
        throw InputError(std::move(diags));
    return out;
}

} // namespace errlens::minilang
