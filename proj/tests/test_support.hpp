#pragma once

#include "rgarch/model.hpp"
#include "rgarch/random.hpp"
#include "rgarch/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

namespace rgarch::test {

inline const ParamVector kTheta0 = ParamVector::garch(6.5e-6, {0.177}, {0.716});

/// Simulated GARCH path from stream(seed, 0) of the given law.
inline std::vector<double> path(const ParamVector& theta, std::size_t n, std::uint64_t seed,
                                InnovationDistribution dist = {}) {
    SimSpec s{theta, n, 500, dist, seed};
    return simulate(s);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

#define CHECK_REL(a, b, tol) CHECK(::rgarch::test::rel_err((a), (b)) < (tol))

}  // namespace rgarch::test
