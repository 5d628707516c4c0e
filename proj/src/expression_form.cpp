#include "errlens/minilang/expression_form.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace errlens::minilang {

const char* to_string(FormFamily f)
{
    switch (f)
    {
        case FormFamily::Constant: return "constant";
        case FormFamily::Linear: return "linear";
        case FormFamily::Polynomial: return "polynomial";
        case FormFamily::Exponential: return "exponential";
        case FormFamily::Other: return "other";
    }
    return "?";
}

std::string format_number(double v)
{
    if (v == 0.0)
        v = 0.0; // drop the sign of -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

namespace {

std::string fmt(const std::optional<double>& v) { return v ? format_number(*v) : "?"; }

} // namespace

std::string ExpressionForm::render() const
{
    switch (family)
    {
        case FormFamily::Constant:
            return "constant{" + fmt(a) + "}";
        case FormFamily::Linear:
            return "linear{a=" + fmt(a) + ",b=" + fmt(b) + "}";
        case FormFamily::Polynomial:
            return "polynomial{degree=" + std::to_string(degree) + ",a=" + fmt(a) + "}";
        case FormFamily::Exponential:
            return "exponential{a=" + fmt(a) + ",d=" + fmt(d) + "}";
        case FormFamily::Other:
            return "other";
    }
    return "other";
}

namespace {

// A coefficient that is either a folded number or opaque (depends on other
// variables or calls).
struct Coef
{
    double v = 0.0;
    bool known = true;

    static Coef opaque() { return { 0.0, false }; }
    bool is_zero() const { return known && v == 0.0; }
};

Coef operator+(Coef l, Coef r) { return l.known && r.known ? Coef { l.v + r.v } : Coef::opaque(); }
Coef operator-(Coef c) { return c.known ? Coef { -c.v } : c; }

Coef operator*(Coef l, Coef r)
{
    if (l.is_zero() || r.is_zero())
        return { 0.0 };
    return l.known && r.known ? Coef { l.v * r.v } : Coef::opaque();
}

constexpr int max_degree = 64;

// Symbolic value of a subexpression in the classification variable.
struct Value
{
    enum class Kind
    {
        Poly,
        Exp, // scale * base^v
        Other,
    };

    Kind kind = Kind::Other;
    std::map<int, Coef> poly;
    Coef scale;
    Coef base;

    static Value other() { return {}; }
    static Value constant(Coef c)
    {
        Value v;
        v.kind = Kind::Poly;
        v.poly[0] = c;
        return v;
    }
    static Value exp(Coef scale, Coef base)
    {
        Value v;
        v.kind = Kind::Exp;
        v.scale = scale;
        v.base = base;
        return v.normalized();
    }

    Value normalized() const
    {
        Value out = *this;
        if (kind == Kind::Poly)
        {
            std::erase_if(out.poly, [](const auto& kv) { return kv.first > 0 && kv.second.is_zero(); });
            if (out.poly.empty())
                out.poly[0] = { 0.0 };
            if (out.degree() > max_degree)
                return other();
        }
        else if (kind == Kind::Exp)
        {
            if (scale.is_zero())
                return constant({ 0.0 });
            if (base.known && base.v == 1.0)
                return constant(scale);
        }
        return out;
    }

    int degree() const { return poly.empty() ? 0 : poly.rbegin()->first; }
    bool is_const() const { return kind == Kind::Poly && degree() == 0; }
    Coef const_value() const
    {
        auto it = poly.find(0);
        return it == poly.end() ? Coef { 0.0 } : it->second;
    }
};

Value scaled(const Value& x, Coef c)
{
    Value out = x;
    if (x.kind == Value::Kind::Poly)
        for (auto& [deg, coef] : out.poly)
            coef = coef * c;
    else if (x.kind == Value::Kind::Exp)
        out.scale = x.scale * c;
    return out.normalized();
}

Value add(const Value& l, const Value& r, bool subtract)
{
    if (l.kind == Value::Kind::Poly && r.kind == Value::Kind::Poly)
    {
        Value out = l;
        for (const auto& [deg, coef] : r.poly)
        {
            const Coef c = subtract ? -coef : coef;
            auto it = out.poly.find(deg);
            if (it == out.poly.end())
                out.poly[deg] = c;
            else
                it->second = it->second + c;
        }
        return out.normalized();
    }
    const bool l_zero = l.is_const() && l.const_value().is_zero();
    const bool r_zero = r.is_const() && r.const_value().is_zero();
    if (l.kind == Value::Kind::Exp && r_zero)
        return l;
    if (r.kind == Value::Kind::Exp && l_zero)
        return subtract ? scaled(r, { -1.0 }) : r;
    if (l.kind == Value::Kind::Exp && r.kind == Value::Kind::Exp && l.base.known && r.base.known
        && l.base.v == r.base.v)
        return Value::exp(l.scale + (subtract ? -r.scale : r.scale), l.base);
    return Value::other();
}

Value multiply(const Value& l, const Value& r)
{
    if (l.kind == Value::Kind::Other || r.kind == Value::Kind::Other)
        return Value::other();
    if (l.is_const())
        return scaled(r, l.const_value());
    if (r.is_const())
        return scaled(l, r.const_value());
    if (l.kind == Value::Kind::Poly && r.kind == Value::Kind::Poly)
    {
        if (l.degree() + r.degree() > max_degree)
            return Value::other();
        Value out;
        out.kind = Value::Kind::Poly;
        for (const auto& [dl, cl] : l.poly)
            for (const auto& [dr, cr] : r.poly)
            {
                auto it = out.poly.find(dl + dr);
                if (it == out.poly.end())
                    out.poly[dl + dr] = cl * cr;
                else
                    it->second = it->second + cl * cr;
            }
        return out.normalized();
    }
    if (l.kind == Value::Kind::Exp && r.kind == Value::Kind::Exp)
        return Value::exp(l.scale * r.scale, l.base * r.base);
    return Value::other();
}

Value divide(const Value& l, const Value& r)
{
    if (l.kind == Value::Kind::Other || r.kind == Value::Kind::Other)
        return Value::other();
    if (r.is_const())
    {
        const Coef c = r.const_value();
        if (c.is_zero())
            return Value::other();
        return scaled(l, c.known ? Coef { 1.0 / c.v } : Coef::opaque());
    }
    if (l.kind == Value::Kind::Exp && r.kind == Value::Kind::Exp)
    {
        if (r.scale.is_zero() || r.base.is_zero())
            return Value::other();
        const Coef inv_scale = r.scale.known ? Coef { 1.0 / r.scale.v } : Coef::opaque();
        const Coef inv_base = r.base.known ? Coef { 1.0 / r.base.v } : Coef::opaque();
        return Value::exp(l.scale * inv_scale, l.base * inv_base);
    }
    return Value::other();
}

Value power(const Value& base, const Value& exponent)
{
    if (base.kind == Value::Kind::Other || exponent.kind == Value::Kind::Other)
        return Value::other();
    if (exponent.is_const())
    {
        const Coef e = exponent.const_value();
        if (base.is_const())
        {
            const Coef b = base.const_value();
            if (b.known && e.known)
                return Value::constant({ std::pow(b.v, e.v) });
            return Value::constant(Coef::opaque());
        }
        // A variable base needs a known small integer exponent.
        if (!e.known || e.v < 0 || e.v != std::floor(e.v) || e.v > max_degree)
            return Value::other();
        Value out = Value::constant({ 1.0 });
        for (int i = 0; i < static_cast<int>(e.v); ++i)
        {
            out = multiply(out, base);
            if (out.kind == Value::Kind::Other)
                return out;
        }
        return out;
    }
    // Variable in the exponent: c ** (k*v + m) == c**m * (c**k)**v.
    if (base.is_const() && exponent.kind == Value::Kind::Poly && exponent.degree() == 1)
    {
        const Coef c = base.const_value();
        if (c.known && c.v <= 0.0)
            return Value::other();
        const Coef k = exponent.poly.at(1);
        const Coef m = exponent.const_value();
        const auto pw = [](Coef b, Coef x) { return b.known && x.known ? Coef { std::pow(b.v, x.v) } : Coef::opaque(); };
        return Value::exp(pw(c, m), pw(c, k));
    }
    return Value::other();
}

bool mentions(const Expr& e, const std::string& var)
{
    if (e.kind == Expr::Kind::Variable)
        return e.text == var;
    return std::any_of(e.operands.begin(), e.operands.end(), [&](const ExprPtr& o) { return mentions(*o, var); });
}

Value fold_scalar(const Value& l, const Value& r, double (*op)(double, double))
{
    if (!l.is_const() || !r.is_const())
        return Value::other();
    const Coef a = l.const_value(), b = r.const_value();
    if (a.known && b.known)
        return Value::constant({ op(a.v, b.v) });
    return Value::constant(Coef::opaque());
}

Value eval(const Expr& e, const std::string& var)
{
    switch (e.kind)
    {
        case Expr::Kind::Number:
            return Value::constant({ e.number });
        case Expr::Kind::String:
            return Value::other();
        case Expr::Kind::Variable:
        {
            if (e.text != var)
                return Value::constant(Coef::opaque());
            Value v;
            v.kind = Value::Kind::Poly;
            v.poly[1] = { 1.0 };
            return v;
        }
        case Expr::Kind::Call:
            return mentions(e, var) ? Value::other() : Value::constant(Coef::opaque());
        case Expr::Kind::Unary:
        {
            const Value x = eval(*e.operands[0], var);
            if (e.unary_op == UnaryOp::Neg)
                return scaled(x, { -1.0 });
            if (!x.is_const())
                return Value::other();
            const Coef c = x.const_value();
            return Value::constant(c.known ? Coef { c.v == 0.0 ? 1.0 : 0.0 } : Coef::opaque());
        }
        case Expr::Kind::Binary:
            break;
    }

    const Value l = eval(*e.operands[0], var);
    const Value r = eval(*e.operands[1], var);
    switch (e.binary_op)
    {
        case BinaryOp::Add: return add(l, r, false);
        case BinaryOp::Sub: return add(l, r, true);
        case BinaryOp::Mul: return multiply(l, r);
        case BinaryOp::Div: return divide(l, r);
        case BinaryOp::Pow: return power(l, r);
        case BinaryOp::Mod:
            if (r.is_const() && r.const_value().is_zero())
                return Value::other();
            return fold_scalar(l, r, [](double a, double b) { return std::fmod(a, b); });
        case BinaryOp::Less: return fold_scalar(l, r, [](double a, double b) { return double(a < b); });
        case BinaryOp::LessEq: return fold_scalar(l, r, [](double a, double b) { return double(a <= b); });
        case BinaryOp::Greater: return fold_scalar(l, r, [](double a, double b) { return double(a > b); });
        case BinaryOp::GreaterEq: return fold_scalar(l, r, [](double a, double b) { return double(a >= b); });
        case BinaryOp::Equal: return fold_scalar(l, r, [](double a, double b) { return double(a == b); });
        case BinaryOp::NotEqual: return fold_scalar(l, r, [](double a, double b) { return double(a != b); });
        case BinaryOp::And: return fold_scalar(l, r, [](double a, double b) { return double(a != 0 && b != 0); });
        case BinaryOp::Or: return fold_scalar(l, r, [](double a, double b) { return double(a != 0 || b != 0); });
    }
    return Value::other();
}

std::optional<double> opt(Coef c)
{
    return c.known ? std::optional<double>(c.v) : std::nullopt;
}

void collect_free(const Expr& e, std::vector<std::string>& out)
{
    if (e.kind == Expr::Kind::Variable && std::find(out.begin(), out.end(), e.text) == out.end())
        out.push_back(e.text);
    for (const auto& o : e.operands)
        collect_free(*o, out);
}

} // namespace

std::vector<std::string> free_variables(const Expr& e)
{
    std::vector<std::string> out;
    collect_free(e, out);
    return out;
}

ExpressionForm classify_expression(const Expr& e, const std::string& variable)
{
    ExpressionForm form;
    form.variable = variable;
    const Value v = eval(e, variable).normalized();
    switch (v.kind)
    {
        case Value::Kind::Other:
            form.family = FormFamily::Other;
            break;
        case Value::Kind::Exp:
            form.family = FormFamily::Exponential;
            form.a = opt(v.scale);
            form.d = opt(v.base);
            break;
        case Value::Kind::Poly:
        {
            const int deg = v.degree();
            if (deg == 0)
            {
                form.family = FormFamily::Constant;
                form.a = opt(v.const_value());
            }
            else if (deg == 1)
            {
                form.family = FormFamily::Linear;
                form.a = opt(v.poly.at(1));
                form.b = opt(v.const_value());
            }
            else
            {
                form.family = FormFamily::Polynomial;
                form.degree = deg;
                form.a = opt(v.poly.at(deg));
            }
            break;
        }
    }
    return form;
}

} // namespace errlens::minilang
