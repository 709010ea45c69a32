#include "rgarch/functionals.hpp"

#include "rgarch/error.hpp"

#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/logistic.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/skew_normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <variant>

namespace rgarch {

namespace bm = boost::math;

namespace {

using BaseLaw = std::variant<bm::normal, bm::laplace, bm::logistic, bm::students_t, bm::skew_normal>;

BaseLaw make_base(const InnovationDistribution& d) {
    switch (d.kind) {
    case DistKind::Normal: return bm::normal(0.0, 1.0);
    case DistKind::DoubleExponential: return bm::laplace(0.0, 1.0 / std::numbers::sqrt2);
    case DistKind::Logistic: return bm::logistic(0.0, std::sqrt(3.0) / std::numbers::pi);
    case DistKind::StudentT: return bm::students_t(d.df);
    case DistKind::SkewNormal: return bm::skew_normal(0.0, 1.0, d.shape);
    }
    return bm::normal(0.0, 1.0);
}

const bm::normal kStdNormal(0.0, 1.0);

}  // namespace

struct StandardizedLaw::Base {
    BaseLaw law;
};

namespace {

template <class Fn>
double visit_base(const std::shared_ptr<const StandardizedLaw::Base>& base, Fn&& fn) {
    return std::visit(fn, base->law);
}

}  // namespace

StandardizedLaw::StandardizedLaw(const InnovationDistribution& dist) : dist_(dist) {
    dist_.validate();
    base_ = std::make_shared<const Base>(Base{make_base(dist_)});
    mean_ = visit_base(base_, [](const auto& b) { return bm::mean(b); });
    scale_ = visit_base(base_, [](const auto& b) { return bm::standard_deviation(b); });
    median_ = (visit_base(base_, [](const auto& b) { return bm::median(b); }) - mean_) / scale_;
}

double StandardizedLaw::pdf(double x) const {
    const double y = mean_ + scale_ * x;
    return scale_ * visit_base(base_, [y](const auto& b) { return bm::pdf(b, y); });
}

double StandardizedLaw::cdf(double x) const {
    const double y = mean_ + scale_ * x;
    return visit_base(base_, [y](const auto& b) { return bm::cdf(b, y); });
}

double StandardizedLaw::ccdf(double x) const {
    const double y = mean_ + scale_ * x;
    return visit_base(base_, [y](const auto& b) { return bm::cdf(bm::complement(b, y)); });
}

double StandardizedLaw::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::DomainError, "quantile needs p in (0,1)");
    const double q = visit_base(base_, [p](const auto& b) { return bm::quantile(b, p); });
    return (q - mean_) / scale_;
}

double StandardizedLaw::fourth_moment() const {
    if (dist_.kind == DistKind::StudentT && dist_.df <= 4.0) {
        throw Error(ErrorCode::InfiniteFourthMoment, "Student t needs df > 4 for a finite fourth moment");
    }
    return visit_base(base_, [](const auto& b) { return bm::kurtosis(b); });
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Integrator {
public:
    explicit Integrator(const QuadratureOptions& q) : q_(q) {}

    double operator()(const std::function<double(double)>& f, double a, double b) const {
        double err = 0.0;
        double l1 = 0.0;
        double value = 0.0;
        if (std::isinf(a) || std::isinf(b)) {
            // exp-sinh copes with the slowly decaying tails of heavy-tailed laws.
            bm::quadrature::exp_sinh<double> rule(static_cast<std::size_t>(q_.max_depth));
            std::size_t levels = 0;
            value = rule.integrate(f, a, b, 1e-9, &err, &l1, &levels);
        } else {
            value = bm::quadrature::gauss_kronrod<double, 31>::integrate(
                f, a, b, static_cast<unsigned>(q_.max_depth), 1e-11, &err, &l1);
        }
        if (!std::isfinite(value) || err > q_.tol * std::max(1.0, l1)) {
            std::ostringstream os;
            os << "quadrature error estimate " << err << " exceeds " << q_.tol;
            throw Error(ErrorCode::QuadratureNotConverged, os.str());
        }
        return value;
    }

    /// Integral over the real line, split at `at` where the integrand may jump.
    double line(const std::function<double(double)>& f, double at) const {
        return (*this)(f, -kInf, at) + (*this)(f, at, kInf);
    }

private:
    QuadratureOptions q_;
};

// phi(F(x)) and the continuous part of dphi(F(x)) / dx for one score and law.
class ScoreOnLine {
public:
    ScoreOnLine(const StandardizedLaw& law, ScoreKind score) : law_(law), score_(score) {}

    double phi(double x) const {
        const double m = law_.median();
        switch (score_) {
        case ScoreKind::Sign: return x > m ? 1.0 : (x < m ? -1.0 : 0.0);
        case ScoreKind::Wilcoxon: return x > m ? 0.5 - law_.ccdf(x) : law_.cdf(x) - 0.5;
        case ScoreKind::VdW: return normal_score(x);
        }
        return 0.0;
    }

    /// phi'(F(x)) f(x); zero for the sign score, whose mass sits at the median.
    double dphi(double x) const {
        switch (score_) {
        case ScoreKind::Sign: return 0.0;
        case ScoreKind::Wilcoxon: return law_.pdf(x);
        case ScoreKind::VdW: {
            const double z = normal_score(x);
            const double dens = bm::pdf(kStdNormal, z);
            const double f = law_.pdf(x);
            return dens > 0.0 ? f / dens : 0.0;
        }
        }
        return 0.0;
    }

private:
    double normal_score(double x) const {
        if (x > law_.median()) {
            const double p = law_.ccdf(x);
            return p > 0.0 ? -bm::quantile(kStdNormal, p) : 0.0;
        }
        const double p = law_.cdf(x);
        return p > 0.0 ? bm::quantile(kStdNormal, p) : 0.0;
    }

    const StandardizedLaw& law_;
    ScoreKind score_;
};

}  // namespace

ScoreFunctionals score_functionals(const InnovationDistribution& dist, ScoreKind score,
                                   const QuadratureOptions& quad) {
    const StandardizedLaw law(dist);
    const ScoreOnLine s(law, score);
    const Integrator integrate(quad);
    const double m = law.median();

    ScoreFunctionals out;
    const double e_phi_eps = integrate.line([&](double x) { return s.phi(x) * x * law.pdf(x); }, m);
    if (!(e_phi_eps > 0.0)) throw Error(ErrorCode::DomainError, "E[phi(F(eps)) eps] is not positive");
    out.c = e_phi_eps * e_phi_eps;
    const double root_c = e_phi_eps;
    const double second = integrate.line(
        [&](double x) {
            const double v = s.phi(x) * x;
            return v * v * law.pdf(x);
        },
        m);
    out.sigma2 = second / out.c - 1.0;

    // H(x) = int_{-inf}^x (1 - t phi(F(t)) / sqrt(c)) f(t) dt, which vanishes at +inf.
    auto h_integrand = [&](double t) { return (1.0 - t * s.phi(t) / root_c) * law.pdf(t); };
    auto H = [&](double x) {
        return x <= m ? integrate(h_integrand, -kInf, x) : -integrate(h_integrand, x, kInf);
    };

    if (score == ScoreKind::Sign) {
        // dphi is the point mass 2 at u = 1/2, i.e. at x = m on the eps scale.
        const double eta_m = m / root_c;
        out.rho = 2.0 * eta_m * m * law.pdf(m);
        out.gamma = eta_m * eta_m;
        out.lambda = 2.0 * eta_m * H(m);
        return out;
    }

    out.rho = integrate.line([&](double x) { return x * x * law.pdf(x) * s.dphi(x); }, m) / root_c;
    if (score == ScoreKind::VdW) {
        out.gamma = std::numeric_limits<double>::quiet_NaN();
        out.lambda = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    // gamma = Var(A(U)) with A(s) = int_{u >= s} G^{-1}(u) dphi(u).
    // Inner integrals always run over the tail beyond y so that no interval spans the bulk.
    auto a_integrand = [&](double x) { return x * s.dphi(x) / root_c; };
    const double a_total = integrate.line(a_integrand, m);
    auto A = [&](double y) {
        return y >= m ? integrate(a_integrand, y, kInf) : a_total - integrate(a_integrand, -kInf, y);
    };
    const double mean_a = integrate.line([&](double y) { return A(y) * law.pdf(y); }, m);
    const double mean_a2 = integrate.line(
        [&](double y) {
            const double a = A(y);
            return a * a * law.pdf(y);
        },
        m);
    out.gamma = mean_a2 - mean_a * mean_a;
    out.lambda = integrate.line([&](double x) { return x * H(x) * s.dphi(x); }, m) / root_c;
    return out;
}

double are_sign_vs_qmle(const InnovationDistribution& dist, const QuadratureOptions& quad) {
    const double kurt = StandardizedLaw(dist).fourth_moment();
    const ScoreFunctionals f = score_functionals(dist, ScoreKind::Sign, quad);
    return (kurt - 1.0) / (4.0 * f.sigma2);
}

}  // namespace rgarch
