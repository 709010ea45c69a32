#include "cli_support.hpp"

#include "rgarch/analysis.hpp"
#include "rgarch/bootstrap.hpp"
#include "rgarch/estimators.hpp"
#include "rgarch/functionals.hpp"
#include "rgarch/io.hpp"
#include "rgarch/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

using namespace rgarch;
using namespace rgarch::cli;

namespace {

const std::string kToolVersion = std::string("rank_garch ") + RANK_GARCH_VERSION;
const std::set<std::string> kNotEchoed{"output", "replicates", "histogram", "threads", "config", "design-file"};

struct CommonOpts {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "csv";
    std::string output = "-";
    std::string config;
};

struct ModelOpts {
    std::string model = "garch";
    int p = 1;
    int q = 1;

    ModelSpec spec() const {
        ModelSpec s;
        if (model == "garch") s.family = Family::Garch;
        else if (model == "gjr") s.family = Family::Gjr;
        else throw Error(ErrorCode::InvalidArgument, "unknown model '" + model + "'");
        s.p = p;
        s.q = q;
        s.validate();
        return s;
    }
};

struct FitOpts {
    std::string score = "vdw";
    std::string init = "qmle";
    int iters = 20;
    double tol = 1e-8;
    double rho = 1.0;
    bool adaptive_step = true;

    Method method() const { return parse_method(score); }

    FitConfig config() const {
        FitConfig c;
        if (init == "qmle") c.init = InitKind::Qmle;
        else if (init == "lad") c.init = InitKind::Lad;
        else throw Error(ErrorCode::InvalidArgument, "unknown init '" + init + "'");
        c.max_iter = iters;
        c.tol = tol;
        c.rho = rho;
        c.adaptive_step = adaptive_step;
        if (is_rank_method(method())) c.score = score_of(method());
        c.validate();
        return c;
    }
};

struct DistOpts {
    std::string dist = "normal";
    double df = 5.0;
    double shape = 5.0;

    InnovationDistribution get() const {
        InnovationDistribution d = parse_distribution(dist, df, shape);
        d.validate();
        return d;
    }
};

struct BootOpts {
    std::string scheme = "u";
    std::size_t B = 500;
    int kstar = BootstrapOptions{}.k_star;
    std::vector<double> levels{0.95, 0.90};
    std::string sigma_mode = "theoretical";
    bool weighted_info = false;

    BootstrapOptions options(int threads) const {
        BootstrapOptions o;
        o.k_star = kstar;
        o.weighted_info = weighted_info;
        o.sigma_mode = parse_sigma_mode(sigma_mode);
        o.threads = threads;
        return o;
    }
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--seed", c.seed, "Master random seed");
    sub->add_option("--threads", c.threads, "Worker threads (default: RANK_GARCH_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "Output format: csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("-o,--output", c.output, "Output file ('-' for stdout)");
    sub->add_option("--config", c.config, "Flat key = value file; flags override its values");
}

void add_model(CLI::App* sub, ModelOpts& m) {
    sub->add_option("--model", m.model, "Volatility model: garch or gjr")->check(CLI::IsMember({"garch", "gjr"}));
    sub->add_option("--p", m.p, "ARCH order");
    sub->add_option("--q", m.q, "GARCH order");
}

void add_fit(CLI::App* sub, FitOpts& f, bool with_score = true) {
    if (with_score) {
        sub->add_option("--score", f.score, "Estimator: sign, wilcoxon, vdw, qmle or lad")
            ->check(CLI::IsMember({"sign", "wilcoxon", "vdw", "qmle", "lad"}));
    }
    sub->add_option("--init", f.init, "Start of the rank iteration: qmle or lad")
        ->check(CLI::IsMember({"qmle", "lad"}));
    sub->add_option("--iters", f.iters, "Maximum rank iterations");
    sub->add_option("--tol", f.tol, "Relative step tolerance of the rank iteration");
    sub->add_option("--rho", f.rho, "Step constant; the Newton step is scaled by 2/(1+rho)");
    sub->add_flag("--adaptive-step,!--fixed-step", f.adaptive_step, "Adapt the rank step multiplier")
        ->default_str(f.adaptive_step ? "true" : "false");
}

void add_dist(CLI::App* sub, DistOpts& d) {
    sub->add_option("--dist", d.dist, "Innovation law: normal, de, logistic, t or skewnormal");
    sub->add_option("--df", d.df, "Student t degrees of freedom");
    sub->add_option("--shape", d.shape, "Skew-normal shape");
}

void add_boot(CLI::App* sub, BootOpts& b) {
    sub->add_option("--scheme", b.scheme, "Weight scheme: m, e or u")->check(CLI::IsMember({"m", "e", "u", "M", "E", "U"}));
    sub->add_option("--B", b.B, "Bootstrap replicates");
    sub->add_option("--kstar", b.kstar, "Weighted updates per replicate");
    sub->add_option("--levels", b.levels, "Confidence levels")->delimiter(',');
    sub->add_option("--sigma-mode", b.sigma_mode, "Weight scale: theoretical or empirical")
        ->check(CLI::IsMember({"theoretical", "empirical"}));
    sub->add_flag("--weighted-info", b.weighted_info, "Weight the information matrix in replicates")
        ->default_str("false");
}

RunHeader make_header(const CLI::App* sub, const CommonOpts& c, const std::string& input_bytes = {},
                      bool has_input = false) {
    RunHeader h;
    h.tool_version = kToolVersion;
    h.command = sub->get_name();
    h.config = resolved_config(*sub, kNotEchoed);
    h.seed = c.seed;
    if (has_input) h.input_checksum = fnv1a64_hex(input_bytes);
    return h;
}

struct Input {
    std::string bytes;
    std::vector<double> x;
};

Input load_input(const std::string& path) {
    Input in;
    in.bytes = read_file(path);
    try {
        in.x = parse_series(in.bytes);
    } catch (const Error& e) {
        const std::string what = e.what();
        throw Error(e.code(), path + ": " + what.substr(to_string(e.code()).size() + 2));
    }
    return in;
}

bool accepted(Method m, const FitResult& r) { return is_rank_method(m) ? r.stable : r.converged; }

FitResult run_fit(const FitOpts& f, const ModelOpts& m, const std::vector<double>& x) {
    const Method method = f.method();
    return fit(method, x, m.spec(), f.config());
}

void warn_not_accepted(Method m) {
    std::cerr << "warning: " << to_string(m)
              << (is_rank_method(m) ? " iteration did not settle" : " optimizer did not converge")
              << "; results written anyway\n";
}

int cmd_fit(const CLI::App* sub, const CommonOpts& c, const ModelOpts& m, const FitOpts& f,
            const std::string& input) {
    const Input in = load_input(input);
    const FitResult r = run_fit(f, m, in.x);
    const auto names = r.theta.names();
    Table t{{"section", "name", "value"}, {}};
    t.add({std::string("info"), std::string("method"), std::string(to_string(f.method()))});
    t.add({std::string("info"), std::string("model"), r.theta.spec().name()});
    t.add({std::string("info"), std::string("n"), static_cast<long long>(in.x.size())});
    t.add({std::string("info"), std::string("init"), r.init_used});
    t.add({std::string("info"), std::string("iterations"), static_cast<long long>(r.iterations_used)});
    t.add({std::string("info"), std::string("converged"), static_cast<long long>(r.converged)});
    t.add({std::string("info"), std::string("stable"), static_cast<long long>(r.stable)});
    if (!is_rank_method(f.method())) t.add({std::string("info"), std::string("objective"), r.objective});
    for (std::size_t k = 0; k < names.size(); ++k) t.add({std::string("theta_phi"), names[k], r.theta_phi[k]});
    t.add({std::string("scale"), std::string("c_hat"), r.c_hat});
    for (std::size_t k = 0; k < names.size(); ++k) t.add({std::string("theta"), names[k], r.theta[k]});
    for (std::size_t i = 0; i < r.step_norms.size(); ++i) {
        t.add({std::string("step_norm"), std::to_string(i + 1), r.step_norms[i]});
    }
    write_table(c.output, make_header(sub, c, in.bytes, true), t, parse_format(c.format));
    if (!accepted(f.method(), r)) {
        warn_not_accepted(f.method());
        return kNotConverged;
    }
    return kOk;
}

ParamVector make_params(const ModelOpts& m, const std::vector<double>& values) {
    return ParamVector(m.spec(), values);
}

int cmd_simulate(const CLI::App* sub, const CommonOpts& c, const ModelOpts& m, const DistOpts& d,
                 const std::vector<double>& params, std::size_t n, std::size_t burnin) {
    SimSpec s{make_params(m, params), n, burnin, d.get(), c.seed};
    const std::vector<double> x = simulate(s);
    Table t{{"t", "x"}, {}};
    for (std::size_t i = 0; i < x.size(); ++i) t.add({static_cast<long long>(i + 1), x[i]});
    write_table(c.output, make_header(sub, c), t, parse_format(c.format));
    return kOk;
}

Table histogram(const BootstrapRun& run, const std::vector<std::string>& names, int bins) {
    Table t{{"parameter", "bin", "lower", "upper", "count"}, {}};
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto col = run.replicates.col(static_cast<Eigen::Index>(j));
        if (col.size() == 0) continue;
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        const double width = hi > lo ? (hi - lo) / bins : 1.0;
        std::vector<long long> counts(static_cast<std::size_t>(bins), 0);
        for (Eigen::Index r = 0; r < col.size(); ++r) {
            const auto b = static_cast<int>(std::floor((col[r] - lo) / width));
            ++counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
        }
        for (int b = 0; b < bins; ++b) {
            t.add({names[j], static_cast<long long>(b), lo + b * width, lo + (b + 1) * width,
                   counts[static_cast<std::size_t>(b)]});
        }
    }
    return t;
}

int cmd_bootstrap(const CLI::App* sub, const CommonOpts& c, const ModelOpts& m, const FitOpts& f,
                  const BootOpts& b, const std::string& input, const std::string& replicates_path,
                  const std::string& histogram_path, int bins) {
    if (!is_rank_method(f.method())) {
        throw Error(ErrorCode::InvalidArgument, "bootstrap needs a rank score (sign, wilcoxon or vdw)");
    }
    if (bins < 1) throw Error(ErrorCode::InvalidArgument, "--bins must be >= 1");
    const Input in = load_input(input);
    const FitResult r = run_fit(f, m, in.x);
    const ScoreKind score = score_of(f.method());
    const BootstrapRun run = bootstrap_distribution(r, in.x, score, parse_scheme(b.scheme), b.B, c.seed,
                                                    b.options(c.threads));
    const auto names = r.theta.names();
    const auto rows = static_cast<long long>(run.replicates.rows());
    Table t{{"level", "parameter", "estimate", "lower", "upper", "replicates", "failed", "sigma_n"}, {}};
    std::optional<IntervalSet> iv;
    if (rows >= 20) iv = confidence_intervals(run, b.levels);
    else std::cerr << "warning: fewer than 20 replicates; interval bounds are not computed\n";
    if (iv && iv->low_replicates) std::cerr << "warning: fewer than 100 replicates\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t l = 0; l < b.levels.size(); ++l) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            const double lo = iv ? iv->intervals[l][j].lower : nan;
            const double hi = iv ? iv->intervals[l][j].upper : nan;
            t.add({b.levels[l], names[j], r.theta[j], lo, hi, rows, static_cast<long long>(run.failed), run.sigma_n});
        }
    }
    const RunHeader header = make_header(sub, c, in.bytes, true);
    const Format fmt = parse_format(c.format);
    write_table(c.output, header, t, fmt);
    if (!replicates_path.empty()) {
        std::vector<std::string> cols{"b"};
        cols.insert(cols.end(), names.begin(), names.end());
        Table rep{cols, {}};
        for (Eigen::Index i = 0; i < run.replicates.rows(); ++i) {
            std::vector<Cell> row{static_cast<long long>(run.index[static_cast<std::size_t>(i)])};
            for (Eigen::Index j = 0; j < run.replicates.cols(); ++j) row.emplace_back(run.replicates(i, j));
            rep.add(std::move(row));
        }
        write_table(replicates_path, header, rep, fmt);
    }
    if (!histogram_path.empty()) write_table(histogram_path, header, histogram(run, names, bins), fmt);
    if (!accepted(f.method(), r)) {
        warn_not_accepted(f.method());
        return kNotConverged;
    }
    return kOk;
}

int cmd_coverage(const CLI::App* sub, const CommonOpts& c, const ModelOpts& m, const DistOpts& d,
                 const FitOpts& f, const BootOpts& b, const std::vector<double>& params, std::size_t n,
                 std::size_t burnin, std::size_t R) {
    CoverageDesign design;
    design.theta0 = make_params(m, params);
    design.dist = d.get();
    design.n = n;
    design.burnin = burnin;
    design.R = R;
    design.B = b.B;
    design.scheme = parse_scheme(b.scheme);
    const Method method = f.method();
    if (!is_rank_method(method)) throw Error(ErrorCode::InvalidArgument, "coverage needs a rank score");
    design.score = score_of(method);
    design.levels = b.levels;
    design.seed = c.seed;
    design.fit = f.config();
    design.boot = b.options(1);
    design.threads = c.threads;
    const CoverageReport rep = coverage_experiment(design);
    if (rep.low_r) std::cerr << "warning: fewer than 50 replications\n";
    if (rep.low_b) std::cerr << "warning: fewer than 100 bootstrap replicates\n";
    const auto names = design.theta0.names();
    Table t{{"level", "parameter", "coverage", "coverage_se", "mean_length", "replications_used", "failed",
             "low_r", "low_b"},
            {}};
    for (std::size_t l = 0; l < design.levels.size(); ++l) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            t.add({design.levels[l], names[j], rep.coverage[l][j], rep.coverage_se[l][j], rep.mean_length[l][j],
                   static_cast<long long>(rep.replications_used), static_cast<long long>(rep.failed),
                   static_cast<long long>(rep.low_r), static_cast<long long>(rep.low_b)});
        }
    }
    write_table(c.output, make_header(sub, c), t, parse_format(c.format));
    return kOk;
}

int cmd_benchmark(const CLI::App* sub, const CommonOpts& c, const ModelOpts& m, const DistOpts& d,
                  const FitOpts& f, const std::vector<double>& params, std::size_t n, std::size_t burnin,
                  std::size_t R, const std::vector<std::string>& estimators) {
    McDesign design;
    design.theta0 = make_params(m, params);
    design.dist = d.get();
    design.n = n;
    design.burnin = burnin;
    design.R = R;
    design.estimators.clear();
    for (const auto& e : estimators) design.estimators.push_back(parse_method(e));
    design.seed = c.seed;
    design.fit = f.config();
    design.threads = c.threads;
    const McReport rep = mc_study(design);
    if (rep.low_r) std::cerr << "warning: fewer than 50 replications\n";
    const auto names = design.theta0.names();
    Table t{{"method", "parameter", "bias", "mse", "are", "are_se", "failures", "not_converged",
             "replications_used", "qmle_failures", "low_r"},
            {}};
    for (const auto& s : rep.rows) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            t.add({std::string(to_string(s.method)), names[j], s.bias[j], s.mse[j], s.are[j], s.are_se[j],
                   static_cast<long long>(s.failures), static_cast<long long>(s.not_converged),
                   static_cast<long long>(rep.replications_used), static_cast<long long>(rep.qmle_failures),
                   static_cast<long long>(rep.low_r)});
        }
    }
    write_table(c.output, make_header(sub, c), t, parse_format(c.format));
    return kOk;
}

int cmd_qq(const CLI::App* sub, const CommonOpts& c, const ModelOpts& m, const FitOpts& f,
           const std::string& input, const std::vector<double>& dfs, bool standardize) {
    const Input in = load_input(input);
    const FitResult r = run_fit(f, m, in.x);
    const std::vector<double> eps = residuals(r.theta, in.x);
    Table t{{"df", "theoretical", "empirical"}, {}};
    for (double df : dfs) {
        for (const auto& [theo, emp] : qq_data(eps, df, standardize)) t.add({df, theo, emp});
    }
    write_table(c.output, make_header(sub, c, in.bytes, true), t, parse_format(c.format));
    if (!accepted(f.method(), r)) {
        warn_not_accepted(f.method());
        return kNotConverged;
    }
    return kOk;
}

int cmd_functionals(const CLI::App* sub, const CommonOpts& c, const DistOpts& d,
                    const std::vector<std::string>& scores, double quad_tol) {
    const InnovationDistribution dist = d.get();
    QuadratureOptions q;
    q.tol = quad_tol;
    Table t{{"dist", "score", "c", "sigma2", "rho", "gamma", "lambda", "are_vs_qmle"}, {}};
    for (const auto& s : scores) {
        const ScoreKind kind = parse_score(s);
        const ScoreFunctionals fn = score_functionals(dist, kind, q);
        double are = std::numeric_limits<double>::quiet_NaN();
        if (kind == ScoreKind::Sign && !(dist.kind == DistKind::StudentT && dist.df <= 4.0)) {
            are = are_sign_vs_qmle(dist, q);
        }
        t.add({dist.name(), std::string(to_string(kind)), fn.c, fn.sigma2, fn.rho, fn.gamma, fn.lambda, are});
    }
    write_table(c.output, make_header(sub, c), t, parse_format(c.format));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-based (R-) estimation of GARCH and GJR models", "rank_garch"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    CommonOpts common;
    ModelOpts model;
    FitOpts fitopts;
    FitOpts cov_fit;
    cov_fit.score = "sign";
    DistOpts dist;
    BootOpts boot;
    std::string input;
    std::vector<double> params{6.5e-6, 0.177, 0.716};
    std::size_t n = 1000;
    std::size_t burnin = 500;
    std::size_t R = 100;
    std::size_t cov_R = 200;
    std::string replicates_path;
    std::string histogram_path;
    int bins = 20;
    std::vector<std::string> estimators{"qmle", "sign", "wilcoxon", "vdw"};
    std::vector<std::string> scores{"sign", "wilcoxon", "vdw"};
    std::vector<double> dfs{3.0, 4.0, 5.0, 6.0};
    bool standardize = true;
    double quad_tol = QuadratureOptions{}.tol;

    try {
        common.threads = default_threads();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("input", input, "Return series (CSV)")->required()->check(CLI::ExistingFile);
    };
    auto add_params = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--params", params, "Parameters: omega, alpha.., [gamma..,] beta..")
                      ->delimiter(',')
                      ->expected(1, 64);
        if (required) o->required();
    };
    auto add_sizes = [&](CLI::App* sub) {
        sub->add_option("--n", n, "Series length")->check(CLI::PositiveNumber);
        sub->add_option("--burnin", burnin, "Discarded initial draws");
    };

    auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a return series");
    add_input(fit_cmd);
    add_model(fit_cmd, model);
    add_fit(fit_cmd, fitopts);
    add_common(fit_cmd, common);

    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a return path");
    add_model(sim_cmd, model);
    add_params(sim_cmd, true);
    add_sizes(sim_cmd);
    add_dist(sim_cmd, dist);
    add_common(sim_cmd, common);

    auto* boot_cmd = app.add_subcommand("bootstrap", "Weighted bootstrap intervals for a rank fit");
    add_input(boot_cmd);
    add_model(boot_cmd, model);
    add_fit(boot_cmd, fitopts);
    add_boot(boot_cmd, boot);
    add_common(boot_cmd, common);
    boot_cmd->add_option("--replicates", replicates_path, "Also write every replicate to this file");
    boot_cmd->add_option("--histogram", histogram_path, "Also write replicate histogram bins to this file");
    boot_cmd->add_option("--bins", bins, "Histogram bins");

    auto* cov_cmd = app.add_subcommand("coverage", "Bootstrap coverage experiment on simulated paths");
    add_model(cov_cmd, model);
    add_params(cov_cmd, false);
    add_sizes(cov_cmd);
    add_dist(cov_cmd, dist);
    add_fit(cov_cmd, cov_fit);
    add_boot(cov_cmd, boot);
    add_common(cov_cmd, common);
    cov_cmd->add_option("--R", cov_R, "Monte Carlo replications")->check(CLI::PositiveNumber);
    cov_cmd->add_option("--design-file", common.config, "Design file (same format as --config)");

    auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo bias, MSE and efficiency study");
    add_model(bench_cmd, model);
    add_params(bench_cmd, false);
    add_sizes(bench_cmd);
    add_dist(bench_cmd, dist);
    add_fit(bench_cmd, fitopts, false);
    add_common(bench_cmd, common);
    bench_cmd->add_option("--R", R, "Monte Carlo replications")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--estimators", estimators, "Estimators to compare")->delimiter(',');
    bench_cmd->add_option("--design-file", common.config, "Design file (same format as --config)");

    auto* qq_cmd = app.add_subcommand("qq", "Residual QQ data against Student t laws");
    add_input(qq_cmd);
    add_model(qq_cmd, model);
    add_fit(qq_cmd, fitopts);
    add_common(qq_cmd, common);
    qq_cmd->add_option("--df", dfs, "Degrees of freedom list")->delimiter(',');
    qq_cmd->add_flag("--standardize,!--raw-t", standardize, "Scale the t law to unit variance")
        ->default_str("true");

    auto* fn_cmd = app.add_subcommand("functionals", "Score functionals and sign-score efficiency");
    add_dist(fn_cmd, dist);
    add_common(fn_cmd, common);
    fn_cmd->add_option("--scores", scores, "Scores to evaluate")->delimiter(',');
    fn_cmd->add_option("--quad-tol", quad_tol, "Quadrature error tolerance");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(args);
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);

        if (*fit_cmd) return cmd_fit(fit_cmd, common, model, fitopts, input);
        if (*sim_cmd) return cmd_simulate(sim_cmd, common, model, dist, params, n, burnin);
        if (*boot_cmd) {
            return cmd_bootstrap(boot_cmd, common, model, fitopts, boot, input, replicates_path, histogram_path, bins);
        }
        if (*cov_cmd) return cmd_coverage(cov_cmd, common, model, dist, cov_fit, boot, params, n, burnin, cov_R);
        if (*bench_cmd) return cmd_benchmark(bench_cmd, common, model, dist, fitopts, params, n, burnin, R, estimators);
        if (*qq_cmd) return cmd_qq(qq_cmd, common, model, fitopts, input, dfs, standardize);
        if (*fn_cmd) return cmd_functionals(fn_cmd, common, dist, scores, quad_tol);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kInputError;
}
