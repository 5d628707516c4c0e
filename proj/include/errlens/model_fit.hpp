#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace errlens::fit {

struct Point
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

/// LINEAR: y = a*x + b.  POWER: y = a*x^p.  EXP: y = a*d^x.
enum class Family
{
    Linear,
    Power,
    Exp,
};

inline constexpr Family all_families[] = { Family::Linear, Family::Power, Family::Exp };

const char* to_string(Family f);
std::optional<Family> family_from_string(std::string_view s);

struct ModelFit
{
    Family family = Family::Linear;
    double a = 0.0;
    /// Intercept b for LINEAR, exponent p for POWER, base d for EXP.
    double shape = 0.0;
    /// RMS residual in original y space divided by mean(|y|).
    double nrmse = 0.0;

    double evaluate(double x) const;
    bool operator==(const ModelFit&) const = default;
};

enum class FitErrorCode
{
    TooFewPoints,
    Degenerate,
    ConstraintViolation,
};

const char* to_string(FitErrorCode c);

class FitError : public std::runtime_error
{
public:
    FitError(FitErrorCode code, std::string message, std::optional<std::size_t> point = std::nullopt);

    FitErrorCode code() const noexcept { return m_code; }
    /// Index of the offending point for constraint violations.
    std::optional<std::size_t> point() const noexcept { return m_point; }

private:
    FitErrorCode m_code;
    std::optional<std::size_t> m_point;
};

struct FitConfig
{
    std::size_t min_points = 3;
    double tie_epsilon = 0.01;
};

/// Least squares fit of one family. POWER and EXP are fitted on log-transformed
/// data; nrmse is always scored against the untransformed y.
ModelFit fit_family(std::span<const Point> points, Family family, const FitConfig& config = {});

struct FamilyOutcome
{
    Family family = Family::Linear;
    std::optional<ModelFit> fit;
    std::string exclusion; // set iff !fit

    bool operator==(const FamilyOutcome&) const = default;
};

struct FamilySelection
{
    ModelFit best;
    std::vector<FamilyOutcome> all_fits; // one per family, in all_families order
    bool decisive = true;

    bool operator==(const FamilySelection&) const = default;
};

/// Fits every admissible family and picks the lowest nrmse. LINEAR wins any
/// near-tie: when its nrmse is within tie_epsilon of the minimum it is
/// selected and the result is marked non-decisive. Throws if LINEAR itself
/// cannot be fitted.
FamilySelection select_family(std::span<const Point> points, const FitConfig& config = {});

} // namespace errlens::fit
