#include "rgarch/estimators.hpp"

#include "rgarch/error.hpp"
#include "rgarch/optimize.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace rgarch {

namespace {

constexpr double kScaleFloor = 1e-12;
constexpr double kBetaFloor = 1e-6;
constexpr double kBetaCeil = 1.0 - 1e-6;
constexpr double kMaxCondition = 1e12;
constexpr int kMaxHalvings = 10;
constexpr double kMinStepScale = 1e-12;
constexpr double kMaxStepScale = 4.0;
constexpr double kStableStep = 0.01;

void require_length(std::span<const double> x, const ModelSpec& spec) {
    validate_series(x);
    if (x.size() <= spec.dim()) {
        std::ostringstream os;
        os << "need more than " << spec.dim() << " observations for " << spec.name() << ", got "
           << x.size();
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

void require_weights(std::span<const double> x, std::span<const double> w) {
    if (!w.empty() && w.size() != x.size()) {
        throw Error(ErrorCode::DimensionMismatch, "weights and series lengths differ");
    }
}

struct RankSums {
    Eigen::VectorXd score;   // sum w_t (dv_t/v_t)(1 - phi_t eps_t)
    Eigen::MatrixXd info;    // sum [w_t] dv_t dv_t' / v_t^2
};

RankSums rank_sums(const ParamVector& theta, std::span<const double> x, ScoreKind score,
                   std::span<const double> w, bool weighted_info, bool with_info = true) {
    const auto vg = filter_variance_gradient(theta, x);
    const auto eps = residuals(x, vg.v);
    const auto phi = rank_scores(score, eps);
    const auto m = static_cast<Eigen::Index>(theta.size());
    RankSums out{Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m)};
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double wt = w.empty() ? 1.0 : w[t];
        const Eigen::VectorXd g = vg.dv.col(static_cast<Eigen::Index>(t)) / vg.v[t];
        out.score += (wt * (1.0 - phi[t] * eps[t])) * g;
        if (with_info) {
            out.info.selfadjointView<Eigen::Lower>().rankUpdate(g, weighted_info ? wt : 1.0);
        }
    }
    if (with_info) out.info = out.info.selfadjointView<Eigen::Lower>();
    return out;
}

// Factorizes info after unit-diagonal equilibration; the condition check is made
// on the equilibrated matrix so it does not depend on parameter units.
class InformationSolver {
public:
    explicit InformationSolver(const Eigen::MatrixXd& info);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        return d_.asDiagonal() * llt_.solve(d_.asDiagonal() * rhs);
    }

private:
    Eigen::VectorXd d_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

InformationSolver::InformationSolver(const Eigen::MatrixXd& info) {
    const Eigen::VectorXd diag = info.diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
        throw Error(ErrorCode::SingularInformation, "information matrix has a non-positive diagonal");
    }
    d_ = diag.array().rsqrt();
    const Eigen::MatrixXd scaled = d_.asDiagonal() * info * d_.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        std::ostringstream os;
        os << "condition number " << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity())
           << " exceeds " << kMaxCondition;
        throw Error(ErrorCode::SingularInformation, os.str());
    }
    llt_.compute(scaled);
    if (llt_.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularInformation, "Cholesky factorization failed");
    }
}

ParamVector clamp_to_region(ParamVector theta) {
    const std::size_t nb = static_cast<std::size_t>(theta.spec().q);
    const std::size_t first_beta = theta.size() - nb;
    for (std::size_t k = 0; k < first_beta; ++k) theta[k] = std::max(theta[k], kScaleFloor);
    double bsum = 0.0;
    for (std::size_t k = first_beta; k < theta.size(); ++k) {
        theta[k] = std::clamp(theta[k], kBetaFloor, kBetaCeil);
        bsum += theta[k];
    }
    if (bsum > kBetaCeil) {
        for (std::size_t k = first_beta; k < theta.size(); ++k) theta[k] *= kBetaCeil / bsum;
    }
    return theta;
}

double relative_change(const ParamVector& before, const ParamVector& after) {
    const Eigen::VectorXd a = before.to_eigen();
    const Eigen::VectorXd b = after.to_eigen();
    return (b - a).norm() / (a.norm() + 1e-12);
}

// Moves to theta - scale * newton, halving until admissible and clamping as a last resort.
StepResult apply_step(const ParamVector& theta, const Eigen::VectorXd& newton, double scale) {
    const Eigen::VectorXd current = theta.to_eigen();
    Eigen::VectorXd step = newton * scale;
    ParamVector next = ParamVector::from_eigen(theta.spec(), current - step);
    for (int h = 0; h < kMaxHalvings && !is_admissible(next); ++h) {
        step *= 0.5;
        next = ParamVector::from_eigen(theta.spec(), current - step);
    }
    if (!is_admissible(next)) next = clamp_to_region(next);
    const double norm = relative_change(theta, next);
    return {std::move(next), norm, {}, {}};
}

// Step multiplier for the rank iteration. Directions are compared relative to the
// current parameter so omega does not vanish next to alpha and beta. A reversal
// halves the multiplier and caps it at the value that overshot; steady
// contraction raises it by a secant estimate, at most halfway to that cap.
class StepScaler {
public:
    double update(const Eigen::VectorXd& newton, const ParamVector& theta) {
        if (previous_.size() > 0) {
            const Eigen::ArrayXd unit = theta.to_eigen().array().abs() + 1e-12;
            const Eigen::VectorXd a = (previous_.array() / unit).matrix();
            const Eigen::VectorXd b = (newton.array() / unit).matrix();
            const double na = a.norm();
            const double nb = b.norm();
            if (na > 0.0 && nb > 0.0) {
                const double cosine = a.dot(b) / (na * nb);
                const double ratio = nb / na;
                if (cosine < 0.0) {
                    cap_ = scale_;
                    scale_ = std::max(scale_ * 0.5, kMinStepScale);
                } else if (cosine > 0.9 && ratio > 0.1 && ratio < 0.9) {
                    const double secant = scale_ / (1.0 - ratio);
                    scale_ = std::max(scale_, std::min(secant, 0.5 * (scale_ + cap_)));
                }
            }
        }
        previous_ = newton;
        return scale_;
    }

private:
    Eigen::VectorXd previous_;
    double scale_ = 1.0;
    double cap_ = kMaxStepScale;
};

}  // namespace

Method parse_method(std::string_view name) {
    if (name == "qmle") return Method::Qmle;
    if (name == "lad") return Method::Lad;
    if (name == "sign") return Method::Sign;
    if (name == "wilcoxon") return Method::Wilcoxon;
    if (name == "vdw") return Method::VdW;
    throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::Qmle: return "qmle";
    case Method::Lad: return "lad";
    case Method::Sign: return "sign";
    case Method::Wilcoxon: return "wilcoxon";
    case Method::VdW: return "vdw";
    }
    return "?";
}

bool is_rank_method(Method m) noexcept {
    return m == Method::Sign || m == Method::Wilcoxon || m == Method::VdW;
}

ScoreKind score_of(Method m) {
    switch (m) {
    case Method::Sign: return ScoreKind::Sign;
    case Method::Wilcoxon: return ScoreKind::Wilcoxon;
    case Method::VdW: return ScoreKind::VdW;
    default: break;
    }
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(m)) + " is not a rank method");
}

void FitConfig::validate() const {
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
    if (!(rho > -1.0)) throw Error(ErrorCode::InvalidArgument, "rho must be > -1");
    if (init == InitKind::User && !user_init) {
        throw Error(ErrorCode::InitFailed, "user initialization requested without a start value");
    }
}

double mean_square(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s / static_cast<double>(x.size());
}

Eigen::VectorXd rank_central_sequence(const ParamVector& theta, std::span<const double> x,
                                      ScoreKind score, std::span<const double> weights) {
    require_weights(x, weights);
    const auto sums = rank_sums(theta, x, score, weights, false);
    return sums.score / std::sqrt(static_cast<double>(x.size()));
}

Eigen::MatrixXd jhat_matrix(const ParamVector& theta, std::span<const double> x,
                            std::span<const double> weights) {
    require_weights(x, weights);
    const auto vg = filter_variance_gradient(theta, x);
    const auto m = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t t = 0; t < x.size(); ++t) {
        const Eigen::VectorXd g = vg.dv.col(static_cast<Eigen::Index>(t)) / vg.v[t];
        J.selfadjointView<Eigen::Lower>().rankUpdate(g, weights.empty() ? 1.0 : weights[t]);
    }
    J = J.selfadjointView<Eigen::Lower>();
    return J / static_cast<double>(x.size());
}

bool is_admissible(const ParamVector& theta) {
    const std::size_t first_beta = theta.size() - static_cast<std::size_t>(theta.spec().q);
    for (std::size_t k = 0; k < first_beta; ++k) {
        if (!(theta[k] >= kScaleFloor) || !std::isfinite(theta[k])) return false;
    }
    double bsum = 0.0;
    for (std::size_t k = first_beta; k < theta.size(); ++k) {
        if (!(theta[k] >= kBetaFloor && theta[k] <= kBetaCeil)) return false;
        bsum += theta[k];
    }
    return bsum <= kBetaCeil;
}

StepResult rank_newton_step(const ParamVector& theta, std::span<const double> x, ScoreKind score,
                            std::span<const double> weights, const StepOptions& opts) {
    require_weights(x, weights);
    if (!(opts.step_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_scale must be > 0");
    const bool weighted_info = opts.weighted_info && !weights.empty();
    const auto sums = rank_sums(theta, x, score, weights, weighted_info);
    const Eigen::VectorXd newton =
        InformationSolver(sums.info).solve(sums.score) * (2.0 / (1.0 + opts.rho));
    if (!newton.allFinite()) throw Error(ErrorCode::NonFiniteStep, "non-finite Newton step");

    StepResult out = apply_step(theta, newton, opts.step_scale);
    out.newton = newton;
    out.jhat = sums.info / static_cast<double>(x.size());
    return out;
}

ParamVector one_step_update(const ParamVector& theta, std::span<const double> x, ScoreKind score,
                            double rho) {
    StepOptions opts;
    opts.rho = rho;
    return rank_newton_step(theta, x, score, {}, opts).theta;
}

double estimate_scale_c(const ParamVector& theta_phi, std::span<const double> x) {
    const double xbar2 = x.empty() ? 0.0 : mean_square(x);
    if (!(xbar2 > 0.0)) throw Error(ErrorCode::DegenerateSeries, "mean of squared returns is zero");
    const double bsum = theta_phi.beta_sum();
    if (!(bsum < 1.0)) throw Error(ErrorCode::ExplosiveBeta, "sum of beta must be < 1");
    double arch = theta_phi.alpha_sum();
    if (theta_phi.spec().family == Family::Gjr) {
        double neg = 0.0;
        for (double v : x) {
            if (v < 0.0) neg += v * v;
        }
        const double kappa = neg / (xbar2 * static_cast<double>(x.size()));
        arch += kappa * theta_phi.gamma_sum();
    }
    return (theta_phi.omega() / xbar2 + arch) / (1.0 - bsum);
}

ParamVector rescale(const ParamVector& theta_phi, double c) {
    ParamVector out = theta_phi;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (out.is_scale_slot(k)) out[k] /= c;
    }
    return out;
}

double ba_intercept(std::span<const double> a_hat, std::span<const double> beta_hat, double xbar2) {
    if (!(xbar2 > 0.0) || !std::isfinite(xbar2)) {
        throw Error(ErrorCode::DegenerateSeries, "mean of squared returns must be positive");
    }
    const double asum = std::accumulate(a_hat.begin(), a_hat.end(), 0.0);
    const double bsum = std::accumulate(beta_hat.begin(), beta_hat.end(), 0.0);
    if (!(bsum < 1.0)) throw Error(ErrorCode::ExplosiveBeta, "sum of beta must be < 1");
    return (1.0 - bsum) * xbar2 / (1.0 + asum * xbar2);
}

double qmle_objective(const ParamVector& theta, std::span<const double> x) {
    const auto v = filter_variance(theta, x);
    double s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) s += std::log(v[t]) + x[t] * x[t] / v[t];
    return s / static_cast<double>(x.size());
}

double lad_objective(const ParamVector& theta, std::span<const double> x) {
    const auto v = filter_variance(theta, x);
    double s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) s += std::fabs(x[t]) / std::sqrt(v[t]) + 0.5 * std::log(v[t]);
    return s / static_cast<double>(x.size());
}

ParamVector moment_start(std::span<const double> x, const ModelSpec& spec) {
    const double xbar2 = mean_square(x);
    std::vector<double> v;
    v.push_back(0.0);
    const bool gjr = spec.family == Family::Gjr;
    // GJR splits the ARCH mass so that alpha + gamma/2 = 0.1.
    for (int i = 0; i < spec.p; ++i) v.push_back((gjr ? 0.05 : 0.1) / spec.p);
    if (gjr) {
        for (int i = 0; i < spec.p; ++i) v.push_back(0.1 / spec.p);
    }
    for (int j = 0; j < spec.q; ++j) v.push_back(0.85 / spec.q);
    v[0] = xbar2 * (1.0 - 0.1 - 0.85);
    return ParamVector(spec, std::move(v));
}

namespace {

enum class MLoss { Gaussian, Laplace };

double m_objective(MLoss loss, const ParamVector& theta, std::span<const double> x) {
    return loss == MLoss::Gaussian ? qmle_objective(theta, x) : lad_objective(theta, x);
}

std::vector<ParamVector> grid_starts(const ModelSpec& spec, double level) {
    std::vector<ParamVector> out;
    const bool gjr = spec.family == Family::Gjr;
    for (double a : {0.05, 0.1, 0.2}) {
        for (double b : {0.5, 0.75, 0.9}) {
            if (a + b >= 0.99) continue;
            std::vector<double> v{level * (1.0 - a - b)};
            for (int i = 0; i < spec.p; ++i) v.push_back((gjr ? 0.5 * a : a) / spec.p);
            if (gjr) {
                for (int i = 0; i < spec.p; ++i) v.push_back(a / spec.p);
            }
            for (int j = 0; j < spec.q; ++j) v.push_back(b / spec.q);
            out.emplace_back(spec, std::move(v));
        }
    }
    return out;
}

FitResult fit_m_estimator(MLoss loss, std::span<const double> x, const ModelSpec& spec,
                          const std::optional<ParamVector>& init) {
    require_length(x, spec);
    const double xbar2 = mean_square(x);
    if (!(xbar2 > 0.0)) throw Error(ErrorCode::DegenerateSeries, "all returns are zero");
    if (init && !(init->spec() == spec)) {
        throw Error(ErrorCode::DimensionMismatch, "initial value has a different model shape");
    }

    double level = xbar2;
    if (loss == MLoss::Laplace) {
        double mabs = 0.0;
        for (double v : x) mabs += std::fabs(v);
        mabs /= static_cast<double>(x.size());
        level = mabs * mabs;
    }

    std::vector<ParamVector> starts = grid_starts(spec, level);
    if (init) starts.insert(starts.begin(), *init);
    std::optional<ParamVector> best;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        if (!is_admissible(s)) continue;
        const double val = m_objective(loss, s, x);
        if (std::isfinite(val) && val < best_value) {
            best_value = val;
            best = s;
        }
    }
    if (!best) throw Error(ErrorCode::InitFailed, "no admissible starting value");

    const double n = static_cast<double>(x.size());
    Objective f = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) -> double {
        const Eigen::VectorXd th = u.array().exp();
        if (!th.allFinite()) return std::numeric_limits<double>::infinity();
        const ParamVector theta = ParamVector::from_eigen(spec, th);
        if (!(theta.beta_sum() < 1.0)) return std::numeric_limits<double>::infinity();
        if (!grad) return m_objective(loss, theta, x);
        const auto vg = filter_variance_gradient(theta, x);
        double value = 0.0;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double vt = vg.v[t];
            double resid;
            if (loss == MLoss::Gaussian) {
                const double r = x[t] * x[t] / vt;
                value += std::log(vt) + r;
                resid = 1.0 - r;
            } else {
                const double r = std::fabs(x[t]) / std::sqrt(vt);
                value += r + 0.5 * std::log(vt);
                resid = 0.5 * (1.0 - r);
            }
            g += (resid / vt) * vg.dv.col(static_cast<Eigen::Index>(t));
        }
        *grad = th.cwiseProduct(g) / n;
        return value / n;
    };

    // Seed the inverse Hessian with the outer-product information in log coordinates.
    const Eigen::VectorXd th0 = best->to_eigen();
    Eigen::MatrixXd info = th0.asDiagonal() * jhat_matrix(*best, x) * th0.asDiagonal();
    info *= (loss == MLoss::Gaussian ? 1.0 : 0.25);
    Eigen::MatrixXd h0;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() == Eigen::Success) {
        h0 = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
        if (!h0.allFinite()) h0.resize(0, 0);
    }

    BfgsOptions opts;
    BfgsResult res = minimize_bfgs(f, th0.array().log().matrix(), opts, h0);
    if (!res.converged && std::isfinite(res.value)) {
        // One restart from the best point with a fresh curvature estimate.
        const Eigen::VectorXd th1 = res.x.array().exp();
        const ParamVector p1 = ParamVector::from_eigen(spec, th1);
        Eigen::MatrixXd info1 = th1.asDiagonal() * jhat_matrix(p1, x) * th1.asDiagonal();
        info1 *= (loss == MLoss::Gaussian ? 1.0 : 0.25);
        Eigen::MatrixXd h1;
        Eigen::LLT<Eigen::MatrixXd> llt1(info1);
        if (llt1.info() == Eigen::Success) h1 = llt1.solve(Eigen::MatrixXd::Identity(info1.rows(), info1.cols()));
        BfgsResult again = minimize_bfgs(f, res.x, opts, h1);
        if (again.value <= res.value) {
            again.iterations += res.iterations;
            res = std::move(again);
        }
    }
    if (!std::isfinite(res.value)) throw Error(ErrorCode::OptimFailed, "objective is not finite");

    const ParamVector theta_hat = ParamVector::from_eigen(spec, res.x.array().exp().matrix());
    FitResult out{theta_hat, 1.0, theta_hat};
    out.iterations_used = res.iterations;
    out.converged = res.converged;
    out.objective = res.value;
    out.init_used = init ? "user+grid" : "grid";
    if (loss == MLoss::Laplace) {
        out.c_hat = estimate_scale_c(theta_hat, x);
        out.theta = rescale(theta_hat, out.c_hat);
    }
    return out;
}

}  // namespace

FitResult fit_qmle(std::span<const double> x, const ModelSpec& spec,
                   const std::optional<ParamVector>& init) {
    return fit_m_estimator(MLoss::Gaussian, x, spec, init);
}

FitResult fit_lad(std::span<const double> x, const ModelSpec& spec,
                  const std::optional<ParamVector>& init) {
    return fit_m_estimator(MLoss::Laplace, x, spec, init);
}

FitResult fit_r_estimator(std::span<const double> x, const FitConfig& cfg, const ModelSpec& spec) {
    cfg.validate();
    require_length(x, spec);

    std::optional<ParamVector> start;
    std::string init_used;
    if (cfg.init == InitKind::User) {
        if (!(cfg.user_init->spec() == spec)) {
            throw Error(ErrorCode::DimensionMismatch, "initial value has a different model shape");
        }
        validate_params(*cfg.user_init, false);
        start = cfg.user_init;
        init_used = "user";
    }
    auto try_init = [&](Method m) {
        if (start) return;
        try {
            FitResult r = m == Method::Qmle ? fit_qmle(x, spec) : fit_lad(x, spec);
            if (r.converged && is_admissible(r.theta)) {
                start = r.theta;
                init_used = std::string(to_string(m));
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::OptimFailed && e.code() != ErrorCode::InitFailed &&
                e.code() != ErrorCode::ExplosiveBeta) {
                throw;
            }
        }
    };
    if (cfg.init == InitKind::Qmle) {
        try_init(Method::Qmle);
        try_init(Method::Lad);
    } else if (cfg.init == InitKind::Lad) {
        try_init(Method::Lad);
        try_init(Method::Qmle);
    }
    if (!start) {
        start = moment_start(x, spec);
        init_used = "moment";
    }

    StepOptions opts;
    opts.rho = cfg.rho;
    ParamVector theta = *start;
    std::vector<double> norms;
    bool converged = false;
    int used = 0;
    StepScaler scaler;
    const double n = static_cast<double>(x.size());
    double last_se_step = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.max_iter; ++k) {
        StepResult s = rank_newton_step(theta, x, cfg.score, {}, opts);
        const Eigen::MatrixXd jhat = std::move(s.jhat);
        if (cfg.adaptive_step) {
            const double scale = scaler.update(s.newton, theta);
            if (scale != 1.0) s = apply_step(theta, s.newton, scale);
        }
        const Eigen::VectorXd d = s.theta.to_eigen() - theta.to_eigen();
        last_se_step = std::sqrt(std::max(0.0, n * d.dot(jhat * d)));
        theta = std::move(s.theta);
        norms.push_back(s.step_norm);
        used = k + 1;
        if (s.step_norm < cfg.tol) {
            converged = true;
            break;
        }
    }

    const double c = estimate_scale_c(theta, x);
    FitResult out{theta, c, rescale(theta, c)};
    out.iterations_used = used;
    out.converged = converged;
    out.stable = converged || last_se_step < kStableStep;
    out.step_norms = std::move(norms);
    out.init_used = std::move(init_used);
    return out;
}

FitResult fit(Method method, std::span<const double> x, const ModelSpec& spec, const FitConfig& cfg) {
    switch (method) {
    case Method::Qmle:
        return fit_qmle(x, spec, cfg.init == InitKind::User ? cfg.user_init : std::nullopt);
    case Method::Lad:
        return fit_lad(x, spec, cfg.init == InitKind::User ? cfg.user_init : std::nullopt);
    default: {
        FitConfig c = cfg;
        c.score = score_of(method);
        return fit_r_estimator(x, c, spec);
    }
    }
}

}  // namespace rgarch
