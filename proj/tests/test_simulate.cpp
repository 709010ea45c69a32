#include "rgarch/error.hpp"
#include "rgarch/random.hpp"
#include "rgarch/simulate.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace rgarch;
using rgarch::test::kTheta0;

TEST_SUITE("simulate") {

TEST_CASE("innovations are standardized for every law") {
    const std::size_t n = 400000;
    for (const auto& d : {InnovationDistribution::normal(), InnovationDistribution::double_exponential(),
                          InnovationDistribution::logistic(), InnovationDistribution::student_t(8.0),
                          InnovationDistribution::skew_normal(5.0)}) {
        Engine rng = make_stream(77, 0);
        const auto e = sample_innovations(d, n, rng);
        double m = 0.0, s2 = 0.0, m4 = 0.0;
        for (double v : e) m += v;
        m /= static_cast<double>(n);
        for (double v : e) {
            s2 += (v - m) * (v - m);
            m4 += std::pow(v - m, 4);
        }
        s2 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        // Standard errors: sqrt(1/n) for the mean, sqrt((m4 - 1)/n) for the variance.
        CAPTURE(d.name());
        CHECK(std::abs(m) < 5.0 / std::sqrt(static_cast<double>(n)));
        CHECK(std::abs(s2 - 1.0) < 5.0 * std::sqrt((m4 - 1.0) / static_cast<double>(n)));
    }
}

TEST_CASE("distribution names and validation") {
    CHECK(parse_distribution("t", 4.0, 0.0).kind == DistKind::StudentT);
    CHECK(parse_distribution("de", 0.0, 0.0).kind == DistKind::DoubleExponential);
    CHECK(parse_distribution("skewnormal", 0.0, 3.0).shape == 3.0);
    CHECK_THROWS_AS(parse_distribution("cauchy", 1.0, 0.0), Error);
    try {
        InnovationDistribution::student_t(2.0).validate();
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidDf);
    }
}

TEST_CASE("paths are bit-reproducible under a fixed seed") {
    SimSpec s{kTheta0, 500, 100, InnovationDistribution::student_t(5.0), 42};
    const auto a = simulate(s);
    const auto b = simulate(s);
    CHECK(a == b);
    s.seed = 43;
    CHECK(simulate(s) != a);
    Engine r1 = make_stream(42, 7);
    Engine r2 = make_stream(42, 7);
    s.seed = 0;
    CHECK(simulate(s, r1) == simulate(s, r2));
    CHECK(a.size() == 500);
}

TEST_CASE("simulated squared returns match the stationary variance") {
    SimSpec s{kTheta0, 200000, 1000, InnovationDistribution::normal(), 5};
    const auto x = simulate(s);
    double m2 = 0.0;
    for (double v : x) m2 += v * v;
    m2 /= static_cast<double>(x.size());
    const double target = 6.5e-6 / (1.0 - 0.177 - 0.716);
    CHECK(m2 == doctest::Approx(target).epsilon(0.05));
}

TEST_CASE("GJR paths are asymmetric in the leverage direction") {
    const auto th = ParamVector::gjr(3.45e-4, {0.0658}, {0.0843}, {0.8182});
    SimSpec s{th, 100000, 1000, InnovationDistribution::normal(), 8};
    const auto x = simulate(s);
    double after_neg = 0.0, after_pos = 0.0;
    std::size_t nn = 0, np = 0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (x[t - 1] < 0) {
            after_neg += x[t] * x[t];
            ++nn;
        } else {
            after_pos += x[t] * x[t];
            ++np;
        }
    }
    CHECK(after_neg / static_cast<double>(nn) > after_pos / static_cast<double>(np));
}

TEST_CASE("non-stationary parameters are rejected unless allowed") {
    SimSpec s{ParamVector::garch(1e-6, {0.3}, {0.75}), 100, 10, {}, 1};
    CHECK_THROWS_AS(simulate(s), Error);
    s.allow_nonstationary = true;
    CHECK(simulate(s).size() == 100);
}

TEST_CASE("seed derivation gives distinct streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(1, i));
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    std::set<std::uint64_t> mixed;
    for (std::uint64_t i = 0; i < 10000; ++i) mixed.insert(mix64(i));
    CHECK(mixed.size() == 10000);
    Engine a = make_stream(1, 0), b = make_stream(1, 1);
    CHECK(a() != b());
}

}  // TEST_SUITE
