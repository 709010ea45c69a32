#pragma once

#include "rgarch/estimators.hpp"
#include "rgarch/model.hpp"
#include "rgarch/random.hpp"
#include "rgarch/scores.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace rgarch {

/// Exchangeable weight schemes: multinomial counts, normalized exponentials, normalized U(0.5,1.5).
enum class WeightScheme { M, E, U };

WeightScheme parse_scheme(std::string_view name);
std::string_view to_string(WeightScheme s) noexcept;

/// Draws w_1..w_n >= 0. E and U are normalized to sum n; M counts sum to n exactly.
std::vector<double> draw_weights(WeightScheme scheme, std::size_t n, Engine& rng);

/// Var(w_n1): 1 - 1/n for M, 1 for E, 1/12 for U (the last two are large-n limits).
double weight_variance(WeightScheme scheme, std::size_t n);
/// Sample variance (divisor n) of a weight vector.
double weight_variance(std::span<const double> w);

enum class SigmaMode { Theoretical, Empirical };

SigmaMode parse_sigma_mode(std::string_view name);
std::string_view to_string(SigmaMode m) noexcept;

struct BootstrapOptions {
    int k_star = 10;
    double rho = 1.0;
    bool weighted_info = false;
    SigmaMode sigma_mode = SigmaMode::Theoretical;
    int threads = 1;
};

/// Weighted central sequence; reduces to rank_central_sequence when w = 1.
Eigen::VectorXd weighted_central_sequence(const ParamVector& theta, std::span<const double> x,
                                          ScoreKind score, std::span<const double> w);

/**
 * One bootstrap replicate: k_star weighted one-step updates starting from the
 * original theta_phi estimate, then omega/alpha/gamma divided by the original c_hat.
 */
ParamVector bootstrap_replicate(const ParamVector& theta_phi_hat, std::span<const double> x,
                                ScoreKind score, std::span<const double> w, int k_star,
                                double c_hat, const BootstrapOptions& opts = {});

struct BootstrapRun {
    explicit BootstrapRun(ParamVector theta) : theta_hat(std::move(theta)) {}

    ParamVector theta_hat;
    WeightScheme scheme = WeightScheme::U;
    double sigma_n = 1.0;          ///< standard deviation of the weights
    std::size_t B = 0;             ///< replicates requested
    std::size_t failed = 0;        ///< replicates dropped after a numerical failure
    std::uint64_t master_seed = 0;
    Eigen::MatrixXd replicates;    ///< surviving replicates, one row each
    std::vector<std::size_t> index;  ///< stream index of each surviving row
};

/**
 * B replicates with weights drawn from stream(master_seed, b). Rows are ordered
 * by b regardless of thread count. Throws TooManyFailedReplicates above 10% failures.
 */
BootstrapRun bootstrap_distribution(const FitResult& fit, std::span<const double> x,
                                    ScoreKind score, WeightScheme scheme, std::size_t B,
                                    std::uint64_t master_seed, const BootstrapOptions& opts = {});

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

struct IntervalSet {
    std::vector<double> levels;
    /// [level][parameter]
    std::vector<std::vector<Interval>> intervals;
    bool low_replicates = false;  ///< fewer than 100 surviving replicates
};

/// Empirical (type 7) quantile of an unsorted sample.
double empirical_quantile(std::vector<double> sample, double prob);

/// Equal-tailed percentile intervals theta_hat + q_{(1-l)/2, (1+l)/2} of (theta* - theta_hat)/sigma_n.
IntervalSet confidence_intervals(const BootstrapRun& run, const std::vector<double>& levels);

}  // namespace rgarch
