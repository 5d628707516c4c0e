#pragma once

#include "errlens/model_fit.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

using errlens::fit::Family;
using errlens::fit::Point;

struct Generated
{
    Family family = Family::Linear;
    double a = 0.0;
    double shape = 0.0;
    std::vector<Point> points;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double evaluate(Family f, double a, double shape, double x)
{
    switch (f)
    {
    case Family::Linear: return a * x + shape;
    case Family::Power: return a * std::pow(x, shape);
    case Family::Exp: return a * std::pow(shape, x);
    }
    return 0.0;
}

/// Exact data from one family. Exponents and bases keep at least 0.5 away
/// from 1, where POWER and EXP degenerate into (or towards) LINEAR and the
/// simpler-family preference takes over by design.
inline Generated generate_exact(std::mt19937_64& rng)
{
    Generated g;
    g.family = static_cast<Family>(std::uniform_int_distribution<int>(0, 2)(rng));
    const bool flip = std::bernoulli_distribution(0.5)(rng);
    switch (g.family)
    {
    case Family::Linear:
        g.a = uniform(rng, 0.5, 10.0) * (flip ? -1 : 1);
        g.shape = uniform(rng, -10.0, 10.0);
        break;
    case Family::Power:
        g.a = uniform(rng, 0.5, 10.0);
        g.shape = flip ? uniform(rng, -2.0, -0.5) : uniform(rng, 1.5, 3.5);
        break;
    case Family::Exp:
        g.a = uniform(rng, 0.5, 10.0);
        g.shape = flip ? uniform(rng, 0.3, 0.6) : uniform(rng, 1.5, 3.0);
        break;
    }
    const int n = std::uniform_int_distribution<int>(4, 10)(rng);
    const double x0 = uniform(rng, 0.5, 2.0);
    const double step = uniform(rng, 0.5, 1.5);
    for (int i = 0; i < n; ++i)
    {
        const double x = x0 + step * i;
        g.points.push_back({ x, evaluate(g.family, g.a, g.shape, x) });
    }
    return g;
}

/// POWER or EXP data on x = 1..8 with multiplicative Gaussian noise.
inline Generated generate_noisy(std::mt19937_64& rng, Family family, double noise = 0.01)
{
    Generated g;
    g.family = family;
    g.a = uniform(rng, 0.5, 10.0);
    g.shape = family == Family::Power ? uniform(rng, 1.5, 3.0) : uniform(rng, 1.5, 2.5);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int x = 1; x <= 8; ++x)
        g.points.push_back({ double(x), evaluate(family, g.a, g.shape, x) * (1.0 + noise * z(rng)) });
    return g;
}

/// |got - want| <= tol * max(|want|, floor). The floor only matters for
/// parameters that may be near zero (the LINEAR intercept).
inline bool within_relative(double got, double want, double tol, double floor = 0.0)
{
    return std::fabs(got - want) <= tol * std::max(std::fabs(want), floor);
}

/// Parameters of `fit` match the generator's within `tol` relative error.
inline bool params_match(const errlens::fit::ModelFit& fit, const Generated& g, double tol)
{
    if (!within_relative(fit.a, g.a, tol))
        return false;
    const double floor = g.family == Family::Linear ? std::fabs(g.a) : 0.0;
    return within_relative(fit.shape, g.shape, tol, floor);
}

} // namespace testing_support
