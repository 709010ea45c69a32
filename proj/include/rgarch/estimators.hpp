#pragma once

#include "rgarch/model.hpp"
#include "rgarch/scores.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rgarch {

/// Estimation method: the two M-estimator baselines or an R-estimator with a given score.
enum class Method { Qmle, Lad, Sign, Wilcoxon, VdW };

Method parse_method(std::string_view name);
std::string_view to_string(Method m) noexcept;
bool is_rank_method(Method m) noexcept;
ScoreKind score_of(Method m);

enum class InitKind { Qmle, Lad, User };

struct FitConfig {
    ScoreKind score = ScoreKind::VdW;
    InitKind init = InitKind::Qmle;
    std::optional<ParamVector> user_init;
    int max_iter = 20;
    double tol = 1e-8;
    /// rho(phi) used in the one-step scaling (1+rho)/2; the step is multiplied by 2/(1+rho).
    double rho = 1.0;
    /// Adapt the step multiplier between iterations: halve it when successive Newton
    /// directions reverse, enlarge it by a secant estimate when they shrink steadily.
    bool adaptive_step = true;

    void validate() const;
};

struct FitResult {
    FitResult(ParamVector theta_phi_, double c_hat_, ParamVector theta_)
        : theta_phi(std::move(theta_phi_)), c_hat(c_hat_), theta(std::move(theta_)) {}

    ParamVector theta_phi;  ///< raw estimate of the c-scaled parameter
    double c_hat = 1.0;
    ParamVector theta;      ///< theta_phi with omega/alpha/gamma divided by c_hat
    int iterations_used = 0;
    bool converged = false;
    /// Rank methods: converged, or the last step is below 1% of an asymptotic standard
    /// error (sqrt(n d' Ĵ d) < 0.01). Rank jumps can keep the strict test out of reach.
    bool stable = false;
    std::vector<double> step_norms;
    std::string init_used;
    double objective = 0.0;  ///< optimizer objective for QMLE/LAD; unused otherwise
};

/// Weighted rank-based central sequence n^{-1/2} sum w_t (dv_t/v_t)(1 - phi(R_t/(n+1)) x_t/sqrt(v_t)).
/// Empty weights mean w = 1.
Eigen::VectorXd rank_central_sequence(const ParamVector& theta, std::span<const double> x,
                                      ScoreKind score, std::span<const double> weights = {});

/// Ĵ_n = n^{-1} sum dv_t dv_t' / v_t^2 (optionally weighted).
Eigen::MatrixXd jhat_matrix(const ParamVector& theta, std::span<const double> x,
                            std::span<const double> weights = {});

struct StepOptions {
    double rho = 1.0;
    /// Bootstrap only: weight the information matrix as well as the score.
    bool weighted_info = false;
    /// Multiplier applied to the Newton step before the admissibility halving.
    double step_scale = 1.0;
};

struct StepResult {
    ParamVector theta;
    double step_norm = 0.0;
    Eigen::VectorXd newton;  ///< full step 2/(1+rho) Ĵ^{-1} R̂ before scaling or halving
    Eigen::MatrixXd jhat;    ///< Ĵ_n at the starting point
};

/// One Newton-type rank update with step safeguarding; weights empty means unweighted.
StepResult rank_newton_step(const ParamVector& theta, std::span<const double> x, ScoreKind score,
                            std::span<const double> weights = {}, const StepOptions& opts = {});

ParamVector one_step_update(const ParamVector& theta, std::span<const double> x, ScoreKind score,
                            double rho = 1.0);

/// Whether theta lies in the region used by the step safeguard.
bool is_admissible(const ParamVector& theta);

/// Fits the R-estimator with the iterated one-step procedure and rescales by ĉ.
FitResult fit_r_estimator(std::span<const double> x, const FitConfig& cfg, const ModelSpec& spec);

/// ĉ = (1 - sum beta)^{-1} (omega/mean(x^2) + sum alpha [+ kappa sum gamma]), where kappa is the
/// sample share of squared returns with x < 0 (GJR only).
double estimate_scale_c(const ParamVector& theta_phi, std::span<const double> x);

/// Divides omega, alpha and gamma by c.
ParamVector rescale(const ParamVector& theta_phi, double c);

/// Intercept backed out of an (alpha/omega, beta) estimate:
/// (1 + sum(a) mean(x^2))^{-1} (1 - sum beta) mean(x^2).
double ba_intercept(std::span<const double> a_hat, std::span<const double> beta_hat, double xbar2);

/// n^{-1} sum [log v̂_t + x_t^2 / v̂_t].
double qmle_objective(const ParamVector& theta, std::span<const double> x);
/// n^{-1} sum [|x_t| / sqrt(v̂_t) + log(v̂_t) / 2].
double lad_objective(const ParamVector& theta, std::span<const double> x);

FitResult fit_qmle(std::span<const double> x, const ModelSpec& spec,
                   const std::optional<ParamVector>& init = std::nullopt);
FitResult fit_lad(std::span<const double> x, const ModelSpec& spec,
                  const std::optional<ParamVector>& init = std::nullopt);

/// Moment-based fallback start: alpha = 0.1, beta = 0.85 (split evenly), variance-matched omega.
ParamVector moment_start(std::span<const double> x, const ModelSpec& spec);

/// Dispatches on method; for rank methods cfg.score is overridden by the method's score.
FitResult fit(Method method, std::span<const double> x, const ModelSpec& spec,
              const FitConfig& cfg = {});

double mean_square(std::span<const double> x);

}  // namespace rgarch
