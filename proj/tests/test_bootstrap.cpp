#include "rgarch/bootstrap.hpp"
#include "rgarch/error.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace rgarch;
using rgarch::test::kTheta0;

TEST_SUITE("bootstrap") {

TEST_CASE("weights are nonnegative and sum to n") {
    for (auto scheme : {WeightScheme::M, WeightScheme::E, WeightScheme::U}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Engine rng = make_stream(seed, 0);
            const auto w = draw_weights(scheme, 777, rng);
            REQUIRE(w.size() == 777);
            CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(777.0).epsilon(1e-12));
            for (double v : w) CHECK(v >= 0.0);
            if (scheme == WeightScheme::M) {
                for (double v : w) CHECK(v == std::floor(v));
            }
        }
    }
    Engine rng = make_stream(1, 0);
    CHECK_THROWS_AS(draw_weights(WeightScheme::U, 1, rng), Error);
}

TEST_CASE("weight variances match each scheme") {
    const std::size_t n = 2000;
    for (auto scheme : {WeightScheme::M, WeightScheme::E, WeightScheme::U}) {
        double mean_var = 0.0;
        const int reps = 200;
        for (int r = 0; r < reps; ++r) {
            Engine rng = make_stream(5, static_cast<std::uint64_t>(r));
            mean_var += weight_variance(draw_weights(scheme, n, rng)) / reps;
        }
        CAPTURE(to_string(scheme));
        CHECK(mean_var == doctest::Approx(weight_variance(scheme, n)).epsilon(0.02));
    }
    CHECK(weight_variance(WeightScheme::U, 10) == doctest::Approx(1.0 / 12.0));
    CHECK(weight_variance(WeightScheme::M, 10) == doctest::Approx(0.9));
    CHECK(parse_scheme("u") == WeightScheme::U);
    CHECK(parse_sigma_mode("empirical") == SigmaMode::Empirical);
    CHECK_THROWS_AS(parse_scheme("x"), Error);
}

TEST_CASE("unit weights reproduce the point estimate") {
    const auto x = test::path(kTheta0, 1000, 17);
    const std::vector<double> ones(1000, 1.0);
    for (ScoreKind score : {ScoreKind::Sign, ScoreKind::Wilcoxon, ScoreKind::VdW}) {
        FitConfig cfg;
        cfg.score = score;
        const FitResult f = fit_r_estimator(x, cfg, kTheta0.spec());
        const ParamVector rep = bootstrap_replicate(f.theta_phi, x, score, ones, 3, f.c_hat);
        CAPTURE(to_string(score));
        for (std::size_t k = 0; k < 3; ++k) CHECK_REL(rep[k], f.theta[k], 1e-4);
    }
}

TEST_CASE("weighted central sequence equals the plain one at unit weights") {
    const auto x = test::path(kTheta0, 200, 2);
    const std::vector<double> ones(200, 1.0);
    CHECK(weighted_central_sequence(kTheta0, x, ScoreKind::Sign, ones)
              .isApprox(rank_central_sequence(kTheta0, x, ScoreKind::Sign), 1e-14));
    CHECK_THROWS_AS(weighted_central_sequence(kTheta0, x, ScoreKind::Sign, std::vector<double>(5, 1.0)), Error);
}

TEST_CASE("empirical quantile uses linear interpolation between order statistics") {
    const std::vector<double> s{4.0, 1.0, 3.0, 2.0};
    CHECK(empirical_quantile(s, 0.5) == doctest::Approx(2.5));
    CHECK(empirical_quantile(s, 0.25) == doctest::Approx(1.75));
    CHECK(empirical_quantile(s, 0.0) == 1.0);
    CHECK(empirical_quantile(s, 1.0) == 4.0);
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), Error);
}

TEST_CASE("percentile intervals shift the scaled replicate quantiles to the estimate") {
    BootstrapRun run(ParamVector::garch(1.0, {0.2}, {0.5}));
    run.sigma_n = 0.5;
    run.replicates.resize(101, 3);
    for (int r = 0; r <= 100; ++r) {
        const double d = (r - 50) / 100.0;  // deviations -0.5 .. 0.5
        run.replicates(r, 0) = 1.0 + d;
        run.replicates(r, 1) = 0.2 + 0.1 * d;
        run.replicates(r, 2) = 0.5 - d;
    }
    const IntervalSet iv = confidence_intervals(run, {0.9});
    CHECK_FALSE(iv.low_replicates);
    CHECK(iv.intervals[0][0].lower == doctest::Approx(1.0 - 0.45 / 0.5));
    CHECK(iv.intervals[0][0].upper == doctest::Approx(1.0 + 0.45 / 0.5));
    CHECK(iv.intervals[0][1].upper == doctest::Approx(0.2 + 0.045 / 0.5));
    CHECK(iv.intervals[0][2].lower == doctest::Approx(0.5 - 0.45 / 0.5));
    CHECK_THROWS_AS(confidence_intervals(run, {1.5}), Error);
    run.replicates.conservativeResize(10, 3);
    try {
        confidence_intervals(run, {0.9});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientReplicates);
    }
}

TEST_CASE("bootstrap runs are reproducible and independent of the thread count") {
    const auto x = test::path(kTheta0, 500, 23);
    FitConfig cfg;
    cfg.score = ScoreKind::Sign;
    const FitResult f = fit_r_estimator(x, cfg, kTheta0.spec());
    BootstrapOptions one;
    one.threads = 1;
    BootstrapOptions two = one;
    two.threads = 2;
    const auto a = bootstrap_distribution(f, x, ScoreKind::Sign, WeightScheme::E, 30, 99, one);
    const auto b = bootstrap_distribution(f, x, ScoreKind::Sign, WeightScheme::E, 30, 99, two);
    const auto c = bootstrap_distribution(f, x, ScoreKind::Sign, WeightScheme::E, 30, 100, one);
    CHECK(a.replicates == b.replicates);
    CHECK(a.index == b.index);
    CHECK_FALSE(a.replicates == c.replicates);
    CHECK(a.sigma_n == doctest::Approx(1.0));
    CHECK(a.B == 30);
    BootstrapOptions emp = one;
    emp.sigma_mode = SigmaMode::Empirical;
    const auto d = bootstrap_distribution(f, x, ScoreKind::Sign, WeightScheme::U, 30, 99, emp);
    CHECK(d.sigma_n == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(0.05));
}

}  // TEST_SUITE
