#pragma once

#include "rgarch/bootstrap.hpp"
#include "rgarch/estimators.hpp"
#include "rgarch/model.hpp"
#include "rgarch/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rgarch {

/// Monte Carlo comparison of estimators on simulated paths.
struct McDesign {
    ParamVector theta0 = ParamVector::garch(6.5e-6, {0.177}, {0.716});
    InnovationDistribution dist;
    std::size_t n = 1000;
    std::size_t burnin = 500;
    std::size_t R = 100;
    std::vector<Method> estimators{Method::Qmle, Method::Sign, Method::Wilcoxon, Method::VdW};
    std::uint64_t seed = 1;
    FitConfig fit;
    int threads = 1;
};

struct EstimatorSummary {
    Method method = Method::Qmle;
    std::vector<double> bias;    ///< mean(theta_hat - theta0) per parameter
    std::vector<double> mse;     ///< mean((theta_hat - theta0)^2)
    std::vector<double> are;     ///< MSE_QMLE / MSE (NaN when QMLE is not in the design)
    std::vector<double> are_se;  ///< delta-method standard error of are
    std::size_t failures = 0;        ///< fits that threw
    std::size_t not_converged = 0;   ///< M-estimators: optimizer not converged; rank: not stable
};

struct McReport {
    McDesign design;
    std::vector<EstimatorSummary> rows;  ///< in design.estimators order
    std::size_t replications_used = 0;   ///< common set used for every summary
    std::size_t qmle_failures = 0;       ///< replications where QMLE threw or did not converge
    bool low_r = false;                  ///< fewer than 50 replications requested
    /// estimates[k][r]: fit of estimator k on replication r, empty when it threw.
    std::vector<std::vector<std::optional<ParamVector>>> estimates;
    std::vector<bool> used;              ///< replication r belongs to the common set
};

/**
 * Simulates R paths (path r drawn from stream(seed, r)), fits every estimator and
 * summarizes bias, MSE and ARE on the replications where QMLE converged (when QMLE is
 * in the design) and every other estimator returned a result.
 * Throws AllReplicationsFailed when that set is empty.
 */
McReport mc_study(const McDesign& design);

/// Per-parameter MSE_b / MSE_a on the report's common set: efficiency of a relative to b.
std::vector<double> relative_efficiency(const McReport& report, Method a, Method b);

/// Bootstrap coverage experiment: fit, bootstrap and interval per replication.
struct CoverageDesign {
    ParamVector theta0 = ParamVector::garch(6.5e-6, {0.177}, {0.716});
    InnovationDistribution dist;
    std::size_t n = 1000;
    std::size_t burnin = 500;
    std::size_t R = 200;
    std::size_t B = 500;
    WeightScheme scheme = WeightScheme::U;
    ScoreKind score = ScoreKind::Sign;
    std::vector<double> levels{0.95, 0.90};
    std::uint64_t seed = 1;
    FitConfig fit;
    BootstrapOptions boot;
    int threads = 1;  ///< replication-level workers; bootstraps inside run serially
};

struct CoverageReport {
    CoverageDesign design;
    /// coverage[level][param] in percent, over the replications used
    std::vector<std::vector<double>> coverage;
    /// binomial standard error of each coverage cell, in percentage points
    std::vector<std::vector<double>> coverage_se;
    /// mean interval length[level][param]
    std::vector<std::vector<double>> mean_length;
    std::size_t replications_used = 0;
    std::size_t failed = 0;  ///< replications whose fit or bootstrap threw
    bool low_b = false;      ///< B < 100
    bool low_r = false;      ///< R < 50
};

/**
 * Path r comes from stream(seed, r, 0) and its bootstrap from master seed
 * derive_seed(seed, r, 1), so results do not depend on the thread count.
 */
CoverageReport coverage_experiment(const CoverageDesign& design);

/**
 * Sorted residuals paired with Student t(df) quantiles at (i - 0.5)/n. With
 * `standardize` and df > 2 the t law is scaled to unit variance.
 * Returns (theoretical, empirical) pairs; needs df > 0 and at least 10 residuals.
 */
std::vector<std::pair<double, double>> qq_data(std::span<const double> eps, double df,
                                                bool standardize = true);

}  // namespace rgarch
