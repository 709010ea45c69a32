#include "rgarch/analysis.hpp"

#include "rgarch/error.hpp"
#include "rgarch/parallel.hpp"
#include "rgarch/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rgarch {

namespace {

constexpr std::size_t kLowR = 50;
constexpr std::size_t kLowB = 100;

struct FitOutcome {
    std::optional<ParamVector> theta;
    bool converged = false;
};

FitOutcome run_fit(Method m, std::span<const double> x, const ModelSpec& spec, const FitConfig& cfg) {
    try {
        const FitResult r = fit(m, x, spec, cfg);
        return {r.theta, is_rank_method(m) ? r.stable : r.converged};
    } catch (const Error&) {
        return {};
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e;
    return s / static_cast<double>(v.size());
}

// Delta-method standard error of mean(a) / mean(b) from paired samples.
double ratio_se(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t r = a.size();
    if (r < 2) return std::numeric_limits<double>::quiet_NaN();
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double vaa = 0.0, vbb = 0.0, vab = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        vaa += (a[i] - ma) * (a[i] - ma);
        vbb += (b[i] - mb) * (b[i] - mb);
        vab += (a[i] - ma) * (b[i] - mb);
    }
    const double d = static_cast<double>(r - 1);
    vaa /= d;
    vbb /= d;
    vab /= d;
    const double var = (vaa / (mb * mb) + ma * ma * vbb / std::pow(mb, 4) - 2.0 * ma * vab / std::pow(mb, 3)) /
                       static_cast<double>(r);
    return std::sqrt(std::max(0.0, var));
}

}  // namespace

McReport mc_study(const McDesign& design) {
    if (design.R < 2) throw Error(ErrorCode::InvalidArgument, "mc_study needs R >= 2");
    if (design.estimators.empty()) throw Error(ErrorCode::InvalidArgument, "no estimators given");
    design.theta0.spec().validate();
    design.dist.validate();

    const std::size_t K = design.estimators.size();
    const std::size_t R = design.R;
    const ModelSpec& spec = design.theta0.spec();
    const auto qmle_pos = std::find(design.estimators.begin(), design.estimators.end(), Method::Qmle);
    const bool has_qmle = qmle_pos != design.estimators.end();
    const std::size_t qi = static_cast<std::size_t>(qmle_pos - design.estimators.begin());

    std::vector<std::vector<FitOutcome>> out(K, std::vector<FitOutcome>(R));
    parallel_for(R, design.threads, [&](std::size_t r) {
        SimSpec sim{design.theta0, design.n, design.burnin, design.dist, design.seed};
        Engine rng = make_stream(design.seed, r);
        const std::vector<double> x = simulate(sim, rng);
        FitConfig cfg = design.fit;
        if (has_qmle) {
            out[qi][r] = run_fit(Method::Qmle, x, spec, cfg);
            // The rank fits would start from this same QMLE; reuse it instead of refitting.
            if (cfg.init == InitKind::Qmle && out[qi][r].converged) {
                cfg.init = InitKind::User;
                cfg.user_init = out[qi][r].theta;
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            if (has_qmle && k == qi) continue;
            out[k][r] = run_fit(design.estimators[k], x, spec, cfg);
        }
    });

    McReport rep;
    rep.design = design;
    rep.low_r = R < kLowR;
    rep.used.assign(R, false);
    rep.estimates.assign(K, std::vector<std::optional<ParamVector>>(R));
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < R; ++r) {
        bool ok = true;
        for (std::size_t k = 0; k < K; ++k) {
            rep.estimates[k][r] = out[k][r].theta;
            ok = ok && out[k][r].theta.has_value();
        }
        if (has_qmle && !out[qi][r].converged) {
            ++rep.qmle_failures;
            ok = false;
        }
        rep.used[r] = ok;
        if (ok) rows.push_back(r);
    }
    rep.replications_used = rows.size();
    if (rows.empty()) throw Error(ErrorCode::AllReplicationsFailed, "no replication usable for every estimator");

    const std::size_t m = design.theta0.size();
    // sq[k][j][i]: squared error of estimator k, parameter j, i-th used replication.
    std::vector<std::vector<std::vector<double>>> sq(K, std::vector<std::vector<double>>(m));
    for (std::size_t k = 0; k < K; ++k) {
        EstimatorSummary s;
        s.method = design.estimators[k];
        s.bias.assign(m, 0.0);
        s.mse.assign(m, 0.0);
        for (std::size_t r = 0; r < R; ++r) {
            if (!out[k][r].theta) ++s.failures;
            else if (!out[k][r].converged) ++s.not_converged;
        }
        for (std::size_t r : rows) {
            const ParamVector& th = *out[k][r].theta;
            for (std::size_t j = 0; j < m; ++j) {
                const double d = th[j] - design.theta0[j];
                s.bias[j] += d;
                sq[k][j].push_back(d * d);
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            s.bias[j] /= static_cast<double>(rows.size());
            s.mse[j] = mean_of(sq[k][j]);
        }
        rep.rows.push_back(std::move(s));
    }
    for (std::size_t k = 0; k < K; ++k) {
        auto& s = rep.rows[k];
        s.are.assign(m, std::numeric_limits<double>::quiet_NaN());
        s.are_se.assign(m, std::numeric_limits<double>::quiet_NaN());
        if (!has_qmle) continue;
        for (std::size_t j = 0; j < m; ++j) {
            s.are[j] = rep.rows[qi].mse[j] / s.mse[j];
            s.are_se[j] = k == qi ? 0.0 : ratio_se(sq[qi][j], sq[k][j]);
        }
    }
    return rep;
}

std::vector<double> relative_efficiency(const McReport& report, Method a, Method b) {
    auto find = [&](Method m) -> const EstimatorSummary& {
        for (const auto& s : report.rows) {
            if (s.method == m) return s;
        }
        throw Error(ErrorCode::InvalidArgument, std::string(to_string(m)) + " is not in the report");
    };
    const auto& sa = find(a);
    const auto& sb = find(b);
    std::vector<double> out(sa.mse.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = sb.mse[j] / sa.mse[j];
    return out;
}

CoverageReport coverage_experiment(const CoverageDesign& design) {
    if (design.R < 1 || design.B < 1) throw Error(ErrorCode::InvalidArgument, "R and B must be >= 1");
    if (design.levels.empty()) throw Error(ErrorCode::InvalidArgument, "no confidence levels given");
    for (double l : design.levels) {
        if (!(l > 0.0 && l < 1.0)) throw Error(ErrorCode::InvalidArgument, "levels must lie in (0,1)");
    }
    design.dist.validate();
    const ModelSpec& spec = design.theta0.spec();
    const std::size_t m = design.theta0.size();
    const std::size_t L = design.levels.size();

    struct Cell {
        bool ok = false;
        std::vector<std::vector<Interval>> intervals;
    };
    std::vector<Cell> cells(design.R);
    FitConfig cfg = design.fit;
    cfg.score = design.score;
    BootstrapOptions boot = design.boot;
    boot.threads = 1;

    parallel_for(design.R, design.threads, [&](std::size_t r) {
        SimSpec sim{design.theta0, design.n, design.burnin, design.dist, design.seed};
        Engine rng = make_stream(design.seed, r);
        const std::vector<double> x = simulate(sim, rng);
        try {
            const FitResult f = fit_r_estimator(x, cfg, spec);
            const BootstrapRun run = bootstrap_distribution(f, x, design.score, design.scheme, design.B,
                                                            derive_seed(design.seed, r, 1), boot);
            cells[r].intervals = confidence_intervals(run, design.levels).intervals;
            cells[r].ok = true;
        } catch (const Error&) {
            cells[r].ok = false;
        }
    });

    CoverageReport rep;
    rep.design = design;
    rep.low_b = design.B < kLowB;
    rep.low_r = design.R < kLowR;
    std::vector<std::vector<std::size_t>> hits(L, std::vector<std::size_t>(m, 0));
    rep.mean_length.assign(L, std::vector<double>(m, 0.0));
    for (const auto& c : cells) {
        if (!c.ok) {
            ++rep.failed;
            continue;
        }
        ++rep.replications_used;
        for (std::size_t l = 0; l < L; ++l) {
            for (std::size_t j = 0; j < m; ++j) {
                const Interval& iv = c.intervals[l][j];
                hits[l][j] += iv.contains(design.theta0[j]);
                rep.mean_length[l][j] += iv.upper - iv.lower;
            }
        }
    }
    if (rep.replications_used == 0) {
        throw Error(ErrorCode::AllReplicationsFailed, "every coverage replication failed");
    }
    const double used = static_cast<double>(rep.replications_used);
    rep.coverage.assign(L, std::vector<double>(m, 0.0));
    rep.coverage_se.assign(L, std::vector<double>(m, 0.0));
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = static_cast<double>(hits[l][j]) / used;
            rep.coverage[l][j] = 100.0 * p;
            rep.coverage_se[l][j] = 100.0 * std::sqrt(p * (1.0 - p) / used);
            rep.mean_length[l][j] /= used;
        }
    }
    return rep;
}

std::vector<std::pair<double, double>> qq_data(std::span<const double> eps, double df, bool standardize) {
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidDf, "QQ degrees of freedom must be > 0");
    if (eps.size() < 10) throw Error(ErrorCode::InvalidArgument, "QQ data needs at least 10 residuals");
    std::vector<double> sorted(eps.begin(), eps.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite residual");
    }
    std::sort(sorted.begin(), sorted.end());
    const boost::math::students_t law(df);
    const double scale = standardize && df > 2.0 ? std::sqrt((df - 2.0) / df) : 1.0;
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> out;
    out.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        out.emplace_back(scale * boost::math::quantile(law, p), sorted[i]);
    }
    return out;
}

}  // namespace rgarch
