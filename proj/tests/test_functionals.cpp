#include "rgarch/error.hpp"
#include "rgarch/functionals.hpp"
#include "rgarch/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rgarch;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_SUITE("functionals") {

TEST_CASE("standardized laws have mean zero and unit variance") {
    for (const auto& d : {InnovationDistribution::normal(), InnovationDistribution::double_exponential(),
                          InnovationDistribution::logistic(), InnovationDistribution::student_t(5.0),
                          InnovationDistribution::skew_normal(5.0)}) {
        const StandardizedLaw law(d);
        CAPTURE(d.name());
        // Midpoint sums on a wide grid; tails beyond +-60 are negligible for these laws.
        double m1 = 0.0, m2 = 0.0;
        const double h = 1e-3;
        for (double x = -60.0; x < 60.0; x += h) {
            const double mid = x + 0.5 * h;
            m1 += mid * law.pdf(mid) * h;
            m2 += mid * mid * law.pdf(mid) * h;
        }
        CHECK(std::abs(m1) < 1e-4);
        CHECK(m2 == doctest::Approx(1.0).epsilon(2e-3));
        for (double p : {0.01, 0.3, 0.5, 0.9}) CHECK(law.cdf(law.quantile(p)) == doctest::Approx(p).epsilon(1e-10));
        CHECK(law.cdf(law.median()) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(law.cdf(0.7) + law.ccdf(0.7) == doctest::Approx(1.0));
    }
    CHECK(StandardizedLaw(InnovationDistribution::double_exponential()).fourth_moment() == doctest::Approx(6.0));
    try {
        StandardizedLaw(InnovationDistribution::student_t(3.0)).fourth_moment();
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfiniteFourthMoment);
    }
}

TEST_CASE("sign score under normal innovations") {
    const auto f = score_functionals(InnovationDistribution::normal(), ScoreKind::Sign);
    CHECK(f.c == doctest::Approx(2.0 / kPi).epsilon(1e-9));
    CHECK(f.sigma2 == doctest::Approx(kPi / 2.0 - 1.0).epsilon(1e-9));
    CHECK(std::abs(f.rho) < 1e-12);
    CHECK(std::abs(f.gamma) < 1e-12);
    CHECK(std::abs(f.lambda) < 1e-8);
    CHECK(are_sign_vs_qmle(InnovationDistribution::normal()) == doctest::Approx(1.0 / (kPi - 2.0)).epsilon(1e-8));
}

TEST_CASE("sign score under double-exponential and logistic innovations") {
    CHECK(are_sign_vs_qmle(InnovationDistribution::double_exponential()) == doctest::Approx(1.25).epsilon(1e-8));
    const auto de = score_functionals(InnovationDistribution::double_exponential(), ScoreKind::Sign);
    CHECK(de.c == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(de.sigma2 == doctest::Approx(1.0).epsilon(1e-9));
    // Standardized logistic has scale s = sqrt(3)/pi and E|eps| = 2 s log 2.
    const double s = std::sqrt(3.0) / kPi;
    const double c = std::pow(2.0 * s * std::log(2.0), 2);
    const auto lg = score_functionals(InnovationDistribution::logistic(), ScoreKind::Sign);
    CHECK(lg.c == doctest::Approx(c).epsilon(1e-9));
    CHECK(are_sign_vs_qmle(InnovationDistribution::logistic()) == doctest::Approx((4.2 - 1.0) / (4.0 * (1.0 / c - 1.0))).epsilon(1e-8));
}

TEST_CASE("Wilcoxon score under normal innovations") {
    const auto f = score_functionals(InnovationDistribution::normal(), ScoreKind::Wilcoxon);
    CHECK(f.c == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-8));
    CHECK(f.rho == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(f.gamma == doctest::Approx(2.0 / std::sqrt(3.0) - 1.0).epsilon(1e-6));
    CHECK(std::isfinite(f.lambda));
}

TEST_CASE("van der Waerden score under normal innovations") {
    const auto f = score_functionals(InnovationDistribution::normal(), ScoreKind::VdW);
    CHECK(f.c == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(f.sigma2 == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(f.rho == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::isnan(f.gamma));
    CHECK(std::isnan(f.lambda));
}

TEST_CASE("sign-score scale under t(5) agrees with a Monte Carlo estimate") {
    const auto d = InnovationDistribution::student_t(5.0);
    const auto f = score_functionals(d, ScoreKind::Sign);
    Engine rng = make_stream(3, 0);
    const std::size_t n = 1000000;
    const auto e = sample_innovations(d, n, rng);
    double m = 0.0;
    const double med = StandardizedLaw(d).median();
    for (double v : e) m += (v > med ? 1.0 : -1.0) * v;
    m /= static_cast<double>(n);
    // |eps| has unit second moment, so the mean's standard error is below 1/sqrt(n).
    CHECK(std::abs(std::sqrt(f.c) - m) < 5.0 / std::sqrt(static_cast<double>(n)));
}

}  // TEST_SUITE
