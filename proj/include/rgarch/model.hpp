#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rgarch {

enum class Family { Garch, Gjr };

/// Volatility model shape: family and (ARCH order p, GARCH order q).
struct ModelSpec {
    Family family = Family::Garch;
    int p = 1;
    int q = 1;

    /// Parameter dimension: 1+p+q for GARCH, 1+2p+q for GJR.
    std::size_t dim() const noexcept {
        return static_cast<std::size_t>(1 + p + q + (family == Family::Gjr ? p : 0));
    }
    void validate() const;
    std::string name() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/**
 * @brief Parameter point of a GARCH(p,q) or GJR(p,q) model.
 *
 * Storage order is (omega, alpha_1..alpha_p, [gamma_1..gamma_p,] beta_1..beta_q).
 * Construction only checks the dimension; positivity and stationarity are
 * checked by validate_params().
 */
class ParamVector {
public:
    ParamVector(ModelSpec spec, std::vector<double> values);

    static ParamVector garch(double omega, std::vector<double> alpha, std::vector<double> beta);
    static ParamVector gjr(double omega, std::vector<double> alpha, std::vector<double> gamma,
                           std::vector<double> beta);
    static ParamVector from_eigen(const ModelSpec& spec, const Eigen::VectorXd& v);

    const ModelSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    Eigen::VectorXd to_eigen() const;

    double omega() const noexcept { return values_[0]; }
    std::span<const double> alpha() const noexcept;
    std::span<const double> gamma() const noexcept;  // empty for GARCH
    std::span<const double> beta() const noexcept;

    std::size_t alpha_index(int i) const noexcept { return 1 + static_cast<std::size_t>(i); }
    std::size_t gamma_index(int i) const noexcept {
        return 1 + static_cast<std::size_t>(spec_.p + i);
    }
    std::size_t beta_index(int j) const noexcept { return size() - spec_.q + j; }

    /// True for the slots that scale with the innovation variance (omega, alpha, gamma).
    bool is_scale_slot(std::size_t k) const noexcept { return k < size() - spec_.q; }

    double alpha_sum() const noexcept;
    double gamma_sum() const noexcept;
    double beta_sum() const noexcept;
    /// Sum(alpha) + Sum(gamma)/2 + Sum(beta); the GJR term assumes symmetric innovations.
    double persistence() const noexcept;
    /// c0 = omega / (1 - Sum(beta)), the pre-sample variance level.
    double c0() const noexcept { return omega() / (1.0 - beta_sum()); }
    /// Names like "omega", "alpha1", "gamma1", "beta1" in storage order.
    std::vector<std::string> names() const;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    ModelSpec spec_;
    std::vector<double> values_;
};

std::vector<std::string> parameter_names(const ModelSpec& spec);

/// Checks positivity (and optionally second-order stationarity); returns theta unchanged.
const ParamVector& validate_params(const ParamVector& theta, bool require_stationary);

/// Checks that x is non-empty and finite.
void validate_series(std::span<const double> x);

/// ARCH(infinity) coefficients c_0..c_{j_max} of a GARCH(1,1):
/// c_0 = omega/(1-beta), c_j = alpha*beta^(j-1).
std::vector<double> expansion_coefficients(const ParamVector& theta, int j_max);

/**
 * Observable conditional variance v̂_1..v̂_n. Pre-sample variances are set to
 * c0(theta) and pre-sample squared returns to zero, which makes the recursion
 * equal to the truncated ARCH(infinity) expansion. GJR adds gamma_i on lags
 * with x_{t-i} < 0.
 */
std::vector<double> filter_variance(const ParamVector& theta, std::span<const double> x);

struct VarianceGradient {
    std::vector<double> v;
    /// m x n; column t is the gradient of v̂_t with respect to theta.
    Eigen::MatrixXd dv;
};

VarianceGradient filter_variance_gradient(const ParamVector& theta, std::span<const double> x);

/// Standardized residuals x_t / sqrt(v̂_t).
std::vector<double> residuals(const ParamVector& theta, std::span<const double> x);
std::vector<double> residuals(std::span<const double> x, std::span<const double> v);

}  // namespace rgarch
