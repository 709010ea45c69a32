#include "rgarch/scores.hpp"

#include "rgarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rgarch {

ScoreKind parse_score(std::string_view name) {
    if (name == "sign") return ScoreKind::Sign;
    if (name == "wilcoxon") return ScoreKind::Wilcoxon;
    if (name == "vdw") return ScoreKind::VdW;
    throw Error(ErrorCode::InvalidArgument, "unknown score '" + std::string(name) + "'");
}

std::string_view to_string(ScoreKind kind) noexcept {
    switch (kind) {
    case ScoreKind::Sign: return "sign";
    case ScoreKind::Wilcoxon: return "wilcoxon";
    case ScoreKind::VdW: return "vdw";
    }
    return "?";
}

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw Error(ErrorCode::DomainError, "normal quantile needs 0 < u < 1");
    }
    const double q = u - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
        const double den =
            ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0;
        return q * num / den;
    }
    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                 2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
               3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
             4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
        const double den =
            ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
               6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
             2.05319162663775882187e+0) * r + 1.0;
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
               2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
             5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
        const double den =
            ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
               1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
             5.99832206555887937690e-1) * r + 1.0;
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

double score_eval(ScoreKind kind, double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw Error(ErrorCode::DomainError, "score argument must lie in (0,1)");
    }
    switch (kind) {
    case ScoreKind::Sign:
        if (u < 0.5) return -1.0;
        if (u > 0.5) return 1.0;
        return 0.0;
    case ScoreKind::Wilcoxon:
        return u - 0.5;
    case ScoreKind::VdW:
        return normal_quantile(u);
    }
    return 0.0;
}

std::vector<std::size_t> compute_ranks(std::span<const double> eps) {
    const std::size_t n = eps.size();
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(eps[t])) {
            throw Error(ErrorCode::NonFiniteInput, "residual " + std::to_string(t + 1));
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k + 1;
    return rank;
}

std::vector<double> rank_scores(ScoreKind kind, std::span<const double> eps) {
    const auto ranks = compute_ranks(eps);
    const double denom = static_cast<double>(eps.size()) + 1.0;
    std::vector<double> out(eps.size());
    for (std::size_t t = 0; t < eps.size(); ++t) {
        out[t] = score_eval(kind, static_cast<double>(ranks[t]) / denom);
    }
    return out;
}

}  // namespace rgarch
