#pragma once

#include "errlens/minilang/ast.hpp"

#include <optional>
#include <string>

namespace errlens::minilang {

enum class FormFamily
{
    Constant,
    Linear,
    Polynomial,
    Exponential,
    Other,
};

const char* to_string(FormFamily f);

/// Functional form of an expression with respect to one variable, after
/// constant folding. Coefficients are absent when they depend on other
/// (opaque) variables or calls.
struct ExpressionForm
{
    std::string variable;
    FormFamily family = FormFamily::Other;
    /// constant: value. linear: slope. polynomial: leading coefficient.
    /// exponential: scale in a*d^v.
    std::optional<double> a;
    /// linear: intercept.
    std::optional<double> b;
    /// polynomial only, >= 2.
    int degree = 0;
    /// exponential only: base d. The variable always sits in the exponent
    /// (right) operand of `**`; a variable base folds to a polynomial.
    std::optional<double> d;

    /// Canonical text, e.g. `linear{a=8,b=0}` or `polynomial{degree=2,a=2}`.
    std::string render() const;

    bool operator==(const ExpressionForm&) const = default;
};

ExpressionForm classify_expression(const Expr& e, const std::string& variable);

/// Free variables in first-occurrence order.
std::vector<std::string> free_variables(const Expr& e);

std::string format_number(double v);

} // namespace errlens::minilang
