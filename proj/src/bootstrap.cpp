#include "rgarch/bootstrap.hpp"

#include "rgarch/error.hpp"
#include "rgarch/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace rgarch {

WeightScheme parse_scheme(std::string_view name) {
    if (name == "m" || name == "M") return WeightScheme::M;
    if (name == "e" || name == "E") return WeightScheme::E;
    if (name == "u" || name == "U") return WeightScheme::U;
    throw Error(ErrorCode::InvalidArgument, "unknown weight scheme '" + std::string(name) + "'");
}

std::string_view to_string(WeightScheme s) noexcept {
    switch (s) {
    case WeightScheme::M: return "M";
    case WeightScheme::E: return "E";
    case WeightScheme::U: return "U";
    }
    return "?";
}

SigmaMode parse_sigma_mode(std::string_view name) {
    if (name == "theoretical") return SigmaMode::Theoretical;
    if (name == "empirical") return SigmaMode::Empirical;
    throw Error(ErrorCode::InvalidArgument, "unknown sigma mode '" + std::string(name) + "'");
}

std::string_view to_string(SigmaMode m) noexcept {
    return m == SigmaMode::Theoretical ? "theoretical" : "empirical";
}

std::vector<double> draw_weights(WeightScheme scheme, std::size_t n, Engine& rng) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "weights need n >= 2");
    std::vector<double> w(n, 0.0);
    if (scheme == WeightScheme::M) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t k = 0; k < n; ++k) w[pick(rng)] += 1.0;
        return w;
    }
    double total = 0.0;
    if (scheme == WeightScheme::E) {
        std::exponential_distribution<double> e(1.0);
        for (auto& v : w) total += (v = e(rng));
    } else {
        std::uniform_real_distribution<double> u(0.5, 1.5);
        for (auto& v : w) total += (v = u(rng));
    }
    const double scale = static_cast<double>(n) / total;
    for (auto& v : w) v *= scale;
    return w;
}

double weight_variance(WeightScheme scheme, std::size_t n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "weights need n >= 2");
    switch (scheme) {
    case WeightScheme::M: return 1.0 - 1.0 / static_cast<double>(n);
    case WeightScheme::E: return 1.0;
    case WeightScheme::U: return 1.0 / 12.0;
    }
    return 1.0;
}

double weight_variance(std::span<const double> w) {
    if (w.empty()) return 0.0;
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(w.size());
}

Eigen::VectorXd weighted_central_sequence(const ParamVector& theta, std::span<const double> x,
                                          ScoreKind score, std::span<const double> w) {
    if (w.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "weights and series lengths differ");
    return rank_central_sequence(theta, x, score, w);
}

ParamVector bootstrap_replicate(const ParamVector& theta_phi_hat, std::span<const double> x,
                                ScoreKind score, std::span<const double> w, int k_star,
                                double c_hat, const BootstrapOptions& opts) {
    if (k_star < 1) throw Error(ErrorCode::InvalidArgument, "k_star must be >= 1");
    if (!(c_hat > 0.0)) throw Error(ErrorCode::InvalidArgument, "c_hat must be > 0");
    StepOptions step;
    step.rho = opts.rho;
    step.weighted_info = opts.weighted_info;
    ParamVector theta = theta_phi_hat;
    for (int k = 0; k < k_star; ++k) theta = rank_newton_step(theta, x, score, w, step).theta;
    return rescale(theta, c_hat);
}

BootstrapRun bootstrap_distribution(const FitResult& fit, std::span<const double> x,
                                    ScoreKind score, WeightScheme scheme, std::size_t B,
                                    std::uint64_t master_seed, const BootstrapOptions& opts) {
    if (B < 1) throw Error(ErrorCode::InvalidArgument, "B must be >= 1");
    const std::size_t n = x.size();
    const std::size_t m = fit.theta.size();

    std::vector<std::optional<Eigen::VectorXd>> rows(B);
    std::vector<double> wvar(B, 0.0);
    parallel_for(B, opts.threads, [&](std::size_t b) {
        Engine rng = make_stream(master_seed, b);
        const auto w = draw_weights(scheme, n, rng);
        wvar[b] = weight_variance(w);
        try {
            const ParamVector rep =
                bootstrap_replicate(fit.theta_phi, x, score, w, opts.k_star, fit.c_hat, opts);
            rows[b] = rep.to_eigen();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularInformation && e.code() != ErrorCode::NonFiniteStep) {
                throw;
            }
        }
    });

    BootstrapRun run{fit.theta};
    run.scheme = scheme;
    run.B = B;
    run.master_seed = master_seed;
    std::size_t ok = 0;
    for (const auto& r : rows) ok += r.has_value();
    run.failed = B - ok;
    if (static_cast<double>(run.failed) > 0.1 * static_cast<double>(B)) {
        throw Error(ErrorCode::TooManyFailedReplicates,
                    std::to_string(run.failed) + " of " + std::to_string(B) + " replicates failed");
    }
    run.replicates.resize(static_cast<Eigen::Index>(ok), static_cast<Eigen::Index>(m));
    std::size_t row = 0;
    for (std::size_t b = 0; b < B; ++b) {
        if (!rows[b]) continue;
        run.replicates.row(static_cast<Eigen::Index>(row++)) = rows[b]->transpose();
        run.index.push_back(b);
    }
    if (opts.sigma_mode == SigmaMode::Theoretical) {
        run.sigma_n = std::sqrt(weight_variance(scheme, n));
    } else {
        double mean = 0.0;
        for (double v : wvar) mean += v;
        run.sigma_n = std::sqrt(mean / static_cast<double>(B));
    }
    return run;
}

double empirical_quantile(std::vector<double> sample, double prob) {
    if (sample.empty()) throw Error(ErrorCode::InsufficientReplicates, "empty sample");
    std::sort(sample.begin(), sample.end());
    const double h = (static_cast<double>(sample.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

IntervalSet confidence_intervals(const BootstrapRun& run, const std::vector<double>& levels) {
    const auto rows = static_cast<std::size_t>(run.replicates.rows());
    if (rows < 20) {
        throw Error(ErrorCode::InsufficientReplicates,
                    "need at least 20 replicates, have " + std::to_string(rows));
    }
    IntervalSet out;
    out.levels = levels;
    out.low_replicates = rows < 100;
    const std::size_t m = run.theta_hat.size();
    std::vector<std::vector<double>> dev(m, std::vector<double>(rows));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r = 0; r < rows; ++r) {
            dev[j][r] = (run.replicates(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) -
                         run.theta_hat[j]) / run.sigma_n;
        }
    }
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0,1)");
        }
        std::vector<Interval> row;
        for (std::size_t j = 0; j < m; ++j) {
            const double lo = empirical_quantile(dev[j], 0.5 * (1.0 - level));
            const double hi = empirical_quantile(dev[j], 0.5 * (1.0 + level));
            row.push_back({run.theta_hat[j] + lo, run.theta_hat[j] + hi});
        }
        out.intervals.push_back(std::move(row));
    }
    return out;
}

}  // namespace rgarch
