#include "rgarch/analysis.hpp"
#include "rgarch/error.hpp"
#include "rgarch/scores.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rgarch;

TEST_SUITE("analysis") {

TEST_CASE("Monte Carlo summaries are consistent and thread-independent") {
    McDesign d;
    d.n = 500;
    d.R = 12;
    d.seed = 5;
    const McReport a = mc_study(d);
    d.threads = 3;
    const McReport b = mc_study(d);
    CHECK(a.low_r);
    CHECK(a.replications_used + a.qmle_failures <= 12);
    REQUIRE(a.rows.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t r = 0; r < 12; ++r) {
            REQUIRE(a.estimates[k][r].has_value() == b.estimates[k][r].has_value());
            if (a.estimates[k][r]) CHECK(*a.estimates[k][r] == *b.estimates[k][r]);
        }
    }
    const auto& q = a.rows[0];
    CHECK(q.method == Method::Qmle);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(q.are[j] == doctest::Approx(1.0));
        // Recompute bias and MSE of the vdW row from the stored estimates.
        double bias = 0.0, mse = 0.0;
        std::size_t used = 0;
        for (std::size_t r = 0; r < 12; ++r) {
            if (!a.used[r]) continue;
            const double e = (*a.estimates[3][r])[j] - d.theta0[j];
            bias += e;
            mse += e * e;
            ++used;
        }
        CHECK(a.rows[3].bias[j] == doctest::Approx(bias / used));
        CHECK(a.rows[3].mse[j] == doctest::Approx(mse / used));
        CHECK(a.rows[3].are[j] == doctest::Approx(q.mse[j] / a.rows[3].mse[j]));
        CHECK(a.rows[3].are_se[j] >= 0.0);
    }
    const auto rel = relative_efficiency(a, Method::VdW, Method::Sign);
    for (std::size_t j = 0; j < 3; ++j) CHECK(rel[j] == doctest::Approx(a.rows[1].mse[j] / a.rows[3].mse[j]));
    CHECK_THROWS_AS(relative_efficiency(a, Method::Lad, Method::Sign), Error);
    d.R = 1;
    CHECK_THROWS_AS(mc_study(d), Error);
}

TEST_CASE("coverage experiment bookkeeping") {
    CoverageDesign d;
    d.n = 400;
    d.R = 6;
    d.B = 25;
    d.seed = 3;
    const CoverageReport rep = coverage_experiment(d);
    CHECK(rep.low_b);
    CHECK(rep.low_r);
    CHECK(rep.replications_used + rep.failed == 6);
    REQUIRE(rep.coverage.size() == 2);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(rep.coverage[0][j] >= 0.0);
        CHECK(rep.coverage[0][j] <= 100.0);
        // Nested intervals from the same replicates: 95% covers whenever 90% does.
        CHECK(rep.coverage[0][j] >= rep.coverage[1][j]);
        CHECK(rep.mean_length[0][j] >= rep.mean_length[1][j]);
    }
    d.threads = 2;
    const CoverageReport again = coverage_experiment(d);
    CHECK(again.coverage == rep.coverage);
    CHECK(again.mean_length == rep.mean_length);
    d.levels = {1.2};
    CHECK_THROWS_AS(coverage_experiment(d), Error);
}

TEST_CASE("QQ data against Student t quantiles") {
    std::vector<double> eps;
    for (int i = 0; i < 50; ++i) eps.push_back(std::sin(i * 1.7));
    const auto qq = qq_data(eps, 5.0);
    REQUIRE(qq.size() == 50);
    for (std::size_t i = 1; i < qq.size(); ++i) {
        CHECK(qq[i].second >= qq[i - 1].second);
        CHECK(qq[i].first > qq[i - 1].first);
    }
    for (std::size_t i = 0; i < qq.size(); ++i) CHECK(qq[i].first == doctest::Approx(-qq[49 - i].first));
    // Nearly infinite df: unit-variance t quantiles approach the normal ones.
    const auto big = qq_data(eps, 1e7);
    for (std::size_t i = 0; i < big.size(); ++i) {
        CHECK(big[i].first == doctest::Approx(normal_quantile((i + 0.5) / 50.0)).epsilon(1e-5));
    }
    const auto raw = qq_data(eps, 5.0, false);
    CHECK(qq[0].first == doctest::Approx(raw[0].first * std::sqrt(3.0 / 5.0)));
    try {
        qq_data(eps, 0.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidDf);
    }
    CHECK_THROWS_AS(qq_data(std::vector<double>(5, 0.0), 5.0), Error);
}

}  // TEST_SUITE
