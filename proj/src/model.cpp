#include "rgarch/model.hpp"

#include "rgarch/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rgarch {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::NonFiniteStep: return "NonFiniteStep";
    case ErrorCode::InitFailed: return "InitFailed";
    case ErrorCode::OptimFailed: return "OptimFailed";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::ExplosiveBeta: return "ExplosiveBeta";
    case ErrorCode::InsufficientReplicates: return "InsufficientReplicates";
    case ErrorCode::TooManyFailedReplicates: return "TooManyFailedReplicates";
    case ErrorCode::InvalidDf: return "InvalidDf";
    case ErrorCode::InfiniteFourthMoment: return "InfiniteFourthMoment";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::AllReplicationsFailed: return "AllReplicationsFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

void ModelSpec::validate() const {
    if (p < 1 || q < 1) {
        throw Error(ErrorCode::UnsupportedSpec, "orders p and q must be >= 1");
    }
}

std::string ModelSpec::name() const {
    std::ostringstream os;
    os << (family == Family::Gjr ? "GJR(" : "GARCH(") << p << "," << q << ")";
    return os.str();
}

ParamVector::ParamVector(ModelSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.dim()) {
        std::ostringstream os;
        os << spec_.name() << " needs " << spec_.dim() << " parameters, got " << values_.size();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

ParamVector ParamVector::garch(double omega, std::vector<double> alpha, std::vector<double> beta) {
    ModelSpec spec{Family::Garch, static_cast<int>(alpha.size()), static_cast<int>(beta.size())};
    std::vector<double> v{omega};
    v.insert(v.end(), alpha.begin(), alpha.end());
    v.insert(v.end(), beta.begin(), beta.end());
    return ParamVector(spec, std::move(v));
}

ParamVector ParamVector::gjr(double omega, std::vector<double> alpha, std::vector<double> gamma,
                             std::vector<double> beta) {
    if (alpha.size() != gamma.size()) {
        throw Error(ErrorCode::DimensionMismatch, "GJR needs as many gamma as alpha terms");
    }
    ModelSpec spec{Family::Gjr, static_cast<int>(alpha.size()), static_cast<int>(beta.size())};
    std::vector<double> v{omega};
    v.insert(v.end(), alpha.begin(), alpha.end());
    v.insert(v.end(), gamma.begin(), gamma.end());
    v.insert(v.end(), beta.begin(), beta.end());
    return ParamVector(spec, std::move(v));
}

ParamVector ParamVector::from_eigen(const ModelSpec& spec, const Eigen::VectorXd& v) {
    return ParamVector(spec, std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd ParamVector::to_eigen() const {
    return Eigen::Map<const Eigen::VectorXd>(values_.data(), static_cast<Eigen::Index>(size()));
}

std::span<const double> ParamVector::alpha() const noexcept {
    return std::span<const double>(values_).subspan(1, spec_.p);
}

std::span<const double> ParamVector::gamma() const noexcept {
    if (spec_.family != Family::Gjr) return {};
    return std::span<const double>(values_).subspan(1 + spec_.p, spec_.p);
}

std::span<const double> ParamVector::beta() const noexcept {
    return std::span<const double>(values_).subspan(size() - spec_.q, spec_.q);
}

double ParamVector::alpha_sum() const noexcept {
    auto a = alpha();
    return std::accumulate(a.begin(), a.end(), 0.0);
}

double ParamVector::gamma_sum() const noexcept {
    auto g = gamma();
    return std::accumulate(g.begin(), g.end(), 0.0);
}

double ParamVector::beta_sum() const noexcept {
    auto b = beta();
    return std::accumulate(b.begin(), b.end(), 0.0);
}

double ParamVector::persistence() const noexcept {
    return alpha_sum() + 0.5 * gamma_sum() + beta_sum();
}

std::vector<std::string> parameter_names(const ModelSpec& spec) {
    std::vector<std::string> out{"omega"};
    for (int i = 1; i <= spec.p; ++i) out.push_back("alpha" + std::to_string(i));
    if (spec.family == Family::Gjr) {
        for (int i = 1; i <= spec.p; ++i) out.push_back("gamma" + std::to_string(i));
    }
    for (int j = 1; j <= spec.q; ++j) out.push_back("beta" + std::to_string(j));
    return out;
}

std::vector<std::string> ParamVector::names() const { return parameter_names(spec_); }

const ParamVector& validate_params(const ParamVector& theta, bool require_stationary) {
    const auto names = theta.names();
    for (std::size_t k = 0; k < theta.size(); ++k) {
        if (!std::isfinite(theta[k])) {
            throw Error(ErrorCode::NonFiniteInput, names[k] + " is not finite");
        }
        if (theta[k] <= 0.0) {
            throw Error(ErrorCode::NonPositiveParameter,
                        names[k] + " = " + std::to_string(theta[k]) + " must be > 0");
        }
    }
    if (theta.beta_sum() >= 1.0) {
        throw Error(ErrorCode::NonStationary, "sum of beta must be < 1");
    }
    if (require_stationary && theta.persistence() >= 1.0) {
        std::ostringstream os;
        os << "persistence " << theta.persistence() << " >= 1";
        throw Error(ErrorCode::NonStationary, os.str());
    }
    return theta;
}

void validate_series(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorCode::NonFiniteInput, "empty series");
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!std::isfinite(x[t])) {
            throw Error(ErrorCode::NonFiniteInput, "observation " + std::to_string(t + 1) +
                                                       " is not finite");
        }
    }
}

std::vector<double> expansion_coefficients(const ParamVector& theta, int j_max) {
    const auto& spec = theta.spec();
    if (spec.family != Family::Garch || spec.p != 1 || spec.q != 1) {
        throw Error(ErrorCode::UnsupportedSpec, "expansion coefficients need GARCH(1,1)");
    }
    const double alpha = theta[1];
    const double beta = theta[2];
    if (!(beta < 1.0)) throw Error(ErrorCode::NonStationary, "beta must be < 1");
    std::vector<double> c(static_cast<std::size_t>(j_max) + 1);
    c[0] = theta.omega() / (1.0 - beta);
    double power = 1.0;
    for (int j = 1; j <= j_max; ++j) {
        c[j] = alpha * power;
        power *= beta;
    }
    return c;
}

namespace {

// Shared recursion; Grad selects whether the derivative columns are propagated.
template <bool Grad>
void run_filter(const ParamVector& theta, std::span<const double> x, std::vector<double>& v,
                Eigen::MatrixXd* dv) {
    const auto& spec = theta.spec();
    const bool gjr = spec.family == Family::Gjr;
    const int p = spec.p;
    const int q = spec.q;
    const std::size_t n = x.size();
    const auto m = static_cast<Eigen::Index>(theta.size());
    const double omega = theta.omega();
    const auto alpha = theta.alpha();
    const auto gamma = theta.gamma();
    const auto beta = theta.beta();
    const double one_minus_b = 1.0 - theta.beta_sum();
    const double c0 = omega / one_minus_b;

    v.assign(n, 0.0);
    Eigen::VectorXd dc0;
    if constexpr (Grad) {
        dv->setZero(m, static_cast<Eigen::Index>(n));
        dc0 = Eigen::VectorXd::Zero(m);
        dc0[0] = 1.0 / one_minus_b;
        for (int j = 0; j < q; ++j) {
            dc0[static_cast<Eigen::Index>(theta.beta_index(j))] = omega / (one_minus_b * one_minus_b);
        }
    }

    for (std::size_t t = 0; t < n; ++t) {
        double vt = omega;
        for (int i = 0; i < p; ++i) {
            if (t < static_cast<std::size_t>(i) + 1) break;
            const double xl = x[t - i - 1];
            const double x2 = xl * xl;
            double w = alpha[i];
            if (gjr && xl < 0.0) w += gamma[i];
            vt += w * x2;
        }
        for (int j = 0; j < q; ++j) {
            const double vl = (t >= static_cast<std::size_t>(j) + 1) ? v[t - j - 1] : c0;
            vt += beta[j] * vl;
        }
        v[t] = vt;

        if constexpr (Grad) {
            auto col = dv->col(static_cast<Eigen::Index>(t));
            col[0] = 1.0;
            for (int i = 0; i < p; ++i) {
                if (t < static_cast<std::size_t>(i) + 1) break;
                const double xl = x[t - i - 1];
                col[static_cast<Eigen::Index>(theta.alpha_index(i))] = xl * xl;
                if (gjr && xl < 0.0) {
                    col[static_cast<Eigen::Index>(theta.gamma_index(i))] = xl * xl;
                }
            }
            for (int j = 0; j < q; ++j) {
                const bool pre = t < static_cast<std::size_t>(j) + 1;
                const double vl = pre ? c0 : v[t - j - 1];
                col[static_cast<Eigen::Index>(theta.beta_index(j))] += vl;
                if (pre) {
                    col += beta[j] * dc0;
                } else {
                    col += beta[j] * dv->col(static_cast<Eigen::Index>(t - j - 1));
                }
            }
        }
    }
}

}  // namespace

std::vector<double> filter_variance(const ParamVector& theta, std::span<const double> x) {
    std::vector<double> v;
    run_filter<false>(theta, x, v, nullptr);
    return v;
}

VarianceGradient filter_variance_gradient(const ParamVector& theta, std::span<const double> x) {
    VarianceGradient out;
    run_filter<true>(theta, x, out.v, &out.dv);
    return out;
}

std::vector<double> residuals(std::span<const double> x, std::span<const double> v) {
    if (x.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "x and v lengths differ");
    std::vector<double> e(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!(v[t] > 0.0)) {
            throw Error(ErrorCode::NonPositiveVariance, "variance at t=" + std::to_string(t + 1));
        }
        e[t] = x[t] / std::sqrt(v[t]);
    }
    return e;
}

std::vector<double> residuals(const ParamVector& theta, std::span<const double> x) {
    const auto v = filter_variance(theta, x);
    return residuals(x, v);
}

}  // namespace rgarch
