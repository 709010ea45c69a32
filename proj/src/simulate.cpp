#include "rgarch/simulate.hpp"

#include "rgarch/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace rgarch {

void InnovationDistribution::validate() const {
    if (kind == DistKind::StudentT && !(df > 2.0)) {
        throw Error(ErrorCode::InvalidDf, "t innovations need df > 2 for unit variance");
    }
    if (kind == DistKind::SkewNormal && !std::isfinite(shape)) {
        throw Error(ErrorCode::InvalidArgument, "skew-normal shape must be finite");
    }
}

std::string InnovationDistribution::name() const {
    std::ostringstream os;
    switch (kind) {
    case DistKind::Normal: os << "normal"; break;
    case DistKind::DoubleExponential: os << "de"; break;
    case DistKind::Logistic: os << "logistic"; break;
    case DistKind::StudentT: os << "t(" << df << ")"; break;
    case DistKind::SkewNormal: os << "skewnormal(" << shape << ")"; break;
    }
    return os.str();
}

InnovationDistribution parse_distribution(std::string_view name, double df, double shape) {
    InnovationDistribution d;
    if (name == "normal") {
        d.kind = DistKind::Normal;
    } else if (name == "de" || name == "laplace") {
        d.kind = DistKind::DoubleExponential;
    } else if (name == "logistic") {
        d.kind = DistKind::Logistic;
    } else if (name == "t") {
        d.kind = DistKind::StudentT;
    } else if (name == "skewnormal") {
        d.kind = DistKind::SkewNormal;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown distribution '" + std::string(name) + "'");
    }
    d.df = df;
    d.shape = shape;
    d.validate();
    return d;
}

namespace {

class Sampler {
public:
    explicit Sampler(const InnovationDistribution& dist) : dist_(dist), student_(dist.kind == DistKind::StudentT ? dist.df : 5.0) {
        dist_.validate();
        if (dist_.kind == DistKind::StudentT) {
            t_scale_ = std::sqrt((dist_.df - 2.0) / dist_.df);
        }
        if (dist_.kind == DistKind::SkewNormal) {
            delta_ = dist_.shape / std::sqrt(1.0 + dist_.shape * dist_.shape);
            const double mu = delta_ * std::sqrt(2.0 / std::numbers::pi);
            sn_mean_ = mu;
            sn_sd_ = std::sqrt(1.0 - mu * mu);
        }
    }

    double operator()(Engine& rng) {
        switch (dist_.kind) {
        case DistKind::Normal:
            return normal_(rng);
        case DistKind::DoubleExponential: {
            // Laplace with scale 1/sqrt(2) has unit variance.
            const double e = exponential_(rng);
            return (uniform_(rng) < 0.5 ? -e : e) / std::numbers::sqrt2;
        }
        case DistKind::Logistic: {
            double u;
            do {
                u = uniform_(rng);
            } while (u <= 0.0);
            return std::log(u / (1.0 - u)) * std::numbers::sqrt3 / std::numbers::pi;
        }
        case DistKind::StudentT:
            return student_(rng) * t_scale_;
        case DistKind::SkewNormal: {
            const double z0 = normal_(rng);
            const double z1 = normal_(rng);
            const double sn = delta_ * std::fabs(z0) + std::sqrt(1.0 - delta_ * delta_) * z1;
            return (sn - sn_mean_) / sn_sd_;
        }
        }
        return 0.0;
    }

private:
    InnovationDistribution dist_;
    std::normal_distribution<double> normal_;
    std::exponential_distribution<double> exponential_;
    std::uniform_real_distribution<double> uniform_;
    std::student_t_distribution<double> student_;
    double t_scale_ = 1.0;
    double delta_ = 0.0;
    double sn_mean_ = 0.0;
    double sn_sd_ = 1.0;
};

}  // namespace

double sample_innovation(const InnovationDistribution& dist, Engine& rng) {
    Sampler s(dist);
    return s(rng);
}

std::vector<double> sample_innovations(const InnovationDistribution& dist, std::size_t count,
                                       Engine& rng) {
    Sampler s(dist);
    std::vector<double> out(count);
    for (auto& e : out) e = s(rng);
    return out;
}

std::vector<double> simulate(const SimSpec& spec) {
    Engine rng(spec.seed);
    return simulate(spec, rng);
}

std::vector<double> simulate(const SimSpec& spec, Engine& rng) {
    const ParamVector& theta = spec.theta0;
    validate_params(theta, !spec.allow_nonstationary);
    if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");

    const auto& ms = theta.spec();
    const bool gjr = ms.family == Family::Gjr;
    const int p = ms.p;
    const int q = ms.q;
    const auto alpha = theta.alpha();
    const auto gamma = theta.gamma();
    const auto beta = theta.beta();
    const double persistence = theta.persistence();
    // Explosive paths (when allowed) start from omega instead of an undefined level.
    const double level = persistence < 1.0 ? theta.omega() / (1.0 - persistence) : theta.omega();

    const std::size_t total = spec.burnin + spec.n;
    Sampler draw(spec.dist);
    std::vector<double> x(total);
    std::vector<double> s2(total);
    for (std::size_t t = 0; t < total; ++t) {
        double v = theta.omega();
        for (int i = 0; i < p; ++i) {
            if (t >= static_cast<std::size_t>(i) + 1) {
                const double xl = x[t - i - 1];
                double w = alpha[i];
                if (gjr && xl < 0.0) w += gamma[i];
                v += w * xl * xl;
            } else {
                double w = alpha[i];
                if (gjr) w += 0.5 * gamma[i];
                v += w * level;
            }
        }
        for (int j = 0; j < q; ++j) {
            v += beta[j] * (t >= static_cast<std::size_t>(j) + 1 ? s2[t - j - 1] : level);
        }
        s2[t] = v;
        x[t] = std::sqrt(v) * draw(rng);
    }
    return std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(spec.burnin), x.end());
}

}  // namespace rgarch
