#include "errlens/model_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace errlens::fit {

const char* to_string(Family f)
{
    switch (f)
    {
        case Family::Linear:
            return "LINEAR";
        case Family::Power:
            return "POWER";
        case Family::Exp:
            return "EXP";
    }
    return "?";
}

std::optional<Family> family_from_string(std::string_view s)
{
    for (auto f : all_families)
        if (s == to_string(f))
            return f;
    return std::nullopt;
}

const char* to_string(FitErrorCode c)
{
    switch (c)
    {
        case FitErrorCode::TooFewPoints:
            return "too_few_points";
        case FitErrorCode::Degenerate:
            return "degenerate";
        case FitErrorCode::ConstraintViolation:
            return "constraint_violation";
    }
    return "?";
}

FitError::FitError(FitErrorCode code, std::string message, std::optional<std::size_t> point)
    : std::runtime_error(std::move(message))
    , m_code(code)
    , m_point(point)
{}

double ModelFit::evaluate(double x) const
{
    switch (family)
    {
        case Family::Linear:
            return a * x + shape;
        case Family::Power:
            return a * std::pow(x, shape);
        case Family::Exp:
            return a * std::pow(shape, x);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct Line
{
    double slope;
    double intercept;
};

// Ordinary least squares with centred sums.
Line ols(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw FitError(FitErrorCode::Degenerate, "all transformed x values are equal");
    const double slope = sxy / sxx;
    return { slope, my - slope * mx };
}

std::string format_point(const Point& p, std::size_t i)
{
    std::ostringstream os;
    os << "point " << i << " (x = " << p.x << ", y = " << p.y << ")";
    return os.str();
}

double nrmse_of(const ModelFit& m, std::span<const Point> points)
{
    double sq = 0, abs_y = 0;
    for (const auto& p : points)
    {
        const double r = p.y - m.evaluate(p.x);
        sq += r * r;
        abs_y += std::abs(p.y);
    }
    const double n = static_cast<double>(points.size());
    const double rms = std::sqrt(sq / n);
    const double scale = abs_y / n;
    if (scale == 0.0)
        return rms == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return rms / scale;
}

void check_shape(std::span<const Point> points, const FitConfig& config)
{
    const std::size_t need = std::max<std::size_t>(config.min_points, 3);
    if (points.size() < need)
        throw FitError(FitErrorCode::TooFewPoints,
            "need at least " + std::to_string(need) + " points, got " + std::to_string(points.size()));
    std::set<double> xs;
    for (const auto& p : points)
    {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw FitError(FitErrorCode::ConstraintViolation, "non-finite coordinate");
        xs.insert(p.x);
    }
    if (xs.size() < 3)
        throw FitError(FitErrorCode::Degenerate,
            xs.size() == 1 ? "all x values are equal" : "fewer than 3 distinct x values");
}

} // namespace

ModelFit fit_family(std::span<const Point> points, Family family, const FitConfig& config)
{
    check_shape(points, config);

    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const auto& p = points[i];
        if (family == Family::Power && p.x <= 0.0)
            throw FitError(FitErrorCode::ConstraintViolation, "POWER requires x > 0; " + format_point(p, i), i);
        if ((family == Family::Power || family == Family::Exp) && p.y <= 0.0)
            throw FitError(FitErrorCode::ConstraintViolation,
                std::string(to_string(family)) + " requires y > 0; " + format_point(p, i), i);
        switch (family)
        {
            case Family::Linear:
                xs.push_back(p.x);
                ys.push_back(p.y);
                break;
            case Family::Power:
                xs.push_back(std::log(p.x));
                ys.push_back(std::log(p.y));
                break;
            case Family::Exp:
                xs.push_back(p.x);
                ys.push_back(std::log(p.y));
                break;
        }
    }

    const Line line = ols(xs, ys);
    ModelFit m;
    m.family = family;
    switch (family)
    {
        case Family::Linear:
            m.a = line.slope;
            m.shape = line.intercept;
            break;
        case Family::Power:
            m.a = std::exp(line.intercept);
            m.shape = line.slope;
            break;
        case Family::Exp:
            m.a = std::exp(line.intercept);
            m.shape = std::exp(line.slope);
            break;
    }
    m.nrmse = nrmse_of(m, points);
    return m;
}

FamilySelection select_family(std::span<const Point> points, const FitConfig& config)
{
    FamilySelection sel;
    std::optional<ModelFit> linear;
    for (auto f : all_families)
    {
        FamilyOutcome out { f, std::nullopt, {} };
        try
        {
            out.fit = fit_family(points, f, config);
        }
        catch (const FitError& e)
        {
            if (f == Family::Linear)
                throw;
            out.exclusion = std::string(to_string(e.code())) + ": " + e.what();
        }
        if (f == Family::Linear)
            linear = out.fit;
        sel.all_fits.push_back(std::move(out));
    }

    const ModelFit* best = nullptr;
    for (const auto& o : sel.all_fits)
        if (o.fit && (!best || o.fit->nrmse < best->nrmse))
            best = &*o.fit;

    if (linear->nrmse - best->nrmse <= config.tie_epsilon)
        best = &*linear;
    sel.best = *best;

    double runner_up = std::numeric_limits<double>::infinity();
    for (const auto& o : sel.all_fits)
        if (o.fit && o.family != sel.best.family)
            runner_up = std::min(runner_up, o.fit->nrmse);
    sel.decisive = runner_up - sel.best.nrmse > config.tie_epsilon;
    return sel;
}

} // namespace errlens::fit
