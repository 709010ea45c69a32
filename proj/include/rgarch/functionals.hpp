#pragma once

#include "rgarch/scores.hpp"
#include "rgarch/simulate.hpp"

#include <memory>

namespace rgarch {

/**
 * @brief Density, distribution and quantile functions of a standardized innovation law.
 *
 * The law is the base family shifted and scaled to mean 0 and variance 1, exactly
 * as sample_innovation() draws it.
 */
class StandardizedLaw {
public:
    explicit StandardizedLaw(const InnovationDistribution& dist);

    double pdf(double x) const;
    double cdf(double x) const;
    /// 1 - cdf(x), computed without cancellation in the upper tail.
    double ccdf(double x) const;
    double quantile(double p) const;
    double median() const { return median_; }
    /// E eps^4; throws InfiniteFourthMoment for Student t with df <= 4.
    double fourth_moment() const;

    const InnovationDistribution& distribution() const noexcept { return dist_; }

    struct Base;  ///< the unstandardized Boost law

private:
    InnovationDistribution dist_;
    std::shared_ptr<const Base> base_;
    double mean_ = 0.0;   // of the base law
    double scale_ = 1.0;  // standard deviation of the base law
    double median_ = 0.0;
};

/// Score functionals of a score under an innovation law, on the eta = eps / sqrt(c) scale.
struct ScoreFunctionals {
    double c = 0.0;       ///< (E[phi(F(eps)) eps])^2
    double sigma2 = 0.0;  ///< E[(phi(F(eps)) eps)^2] / c - 1
    double rho = 0.0;     ///< int (G^{-1})^2 g(G^{-1}) dphi
    double gamma = 0.0;   ///< int int G^{-1}(u) G^{-1}(v) (min(u,v) - uv) dphi dphi; NaN for vdW
    double lambda = 0.0;  ///< int int G^{-1}(u) 1{v<=u} (1 - G^{-1}(v) phi(v)) dv dphi(u); NaN for vdW
};

struct QuadratureOptions {
    double tol = 1e-6;   ///< largest accepted error estimate, relative to max(1, L1 norm)
    int max_depth = 15;
};

/**
 * Evaluates the functionals by adaptive Gauss-Kronrod quadrature. The sign score's
 * dphi is a point mass 2 at u = 1/2, so its double integrals reduce to evaluations at
 * the median. gamma and lambda integrate G^{-1} against dphi and diverge for the
 * unbounded vdW score; they are reported as NaN there.
 * Throws QuadratureNotConverged when an error estimate exceeds the tolerance.
 */
ScoreFunctionals score_functionals(const InnovationDistribution& dist, ScoreKind score,
                                   const QuadratureOptions& quad = {});

/// (E eps^4 - 1) / (4 sigma2(sign)); throws InfiniteFourthMoment for t(df <= 4).
double are_sign_vs_qmle(const InnovationDistribution& dist, const QuadratureOptions& quad = {});

}  // namespace rgarch
