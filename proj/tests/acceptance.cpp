#include "rgarch/analysis.hpp"
#include "rgarch/estimators.hpp"
#include "rgarch/functionals.hpp"
#include "rgarch/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace rgarch;

namespace {

// Tolerances and designs, fixed in advance.
constexpr double kAreNormalTarget = 0.876;
constexpr double kAreNormalTol = 1e-3;
constexpr double kZeroTol = 1e-6;
constexpr double kSigma2Tol = 1e-4;
constexpr double kCTol = 1e-6;
constexpr double kEffLow = 0.85;
constexpr double kEffHigh = 1.15;
constexpr double kHeavyTailFloor = 2.0;
constexpr double kCoverageTol = 5.0;
constexpr double kTrendTol = 6.0;
constexpr double kChatTol = 0.05;
constexpr std::size_t kREfficiency = 200;
constexpr std::size_t kRLargeN = 100;
constexpr std::size_t kRGjr = 100;
constexpr std::size_t kRSkew = 200;
constexpr std::size_t kRCoverage = 200;
constexpr std::size_t kBCoverage = 500;
constexpr std::uint64_t kSeed = 1;

int failures = 0;

void report(bool pass, const std::string& id, const std::string& text) {
    std::cout << (pass ? "PASS " : "FAIL ") << id << " " << text << std::endl;
    if (!pass) ++failures;
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

std::string list(const std::vector<double>& v, int digits = 4) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], digits);
    return s + ")";
}

int workers() {
    if (const char* env = std::getenv("RANK_GARCH_THREADS")) return std::max(1, std::atoi(env));
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

const EstimatorSummary& row(const McReport& r, Method m) {
    for (const auto& s : r.rows) {
        if (s.method == m) return s;
    }
    throw std::runtime_error("estimator missing from report");
}

McReport study(const ParamVector& theta0, const InnovationDistribution& dist, std::size_t n, std::size_t R,
               std::vector<Method> estimators) {
    McDesign d;
    d.theta0 = theta0;
    d.dist = dist;
    d.n = n;
    d.R = R;
    d.estimators = std::move(estimators);
    d.seed = kSeed;
    d.threads = workers();
    return mc_study(d);
}

CoverageReport coverage(ScoreKind score, std::size_t n) {
    CoverageDesign d;
    d.score = score;
    d.n = n;
    d.R = kRCoverage;
    d.B = kBCoverage;
    d.scheme = WeightScheme::U;
    d.levels = {0.95, 0.90};
    d.seed = kSeed;
    d.threads = workers();
    return coverage_experiment(d);
}

bool all_in(const std::vector<double>& v, double lo, double hi) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x >= lo && x <= hi; });
}

template <class F>
void guarded(const std::string& id, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        f();
    } catch (const std::exception& e) {
        report(false, id, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "     " << id << " took " << fmt(secs, 3) << " s" << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string unit_tests = argc > 1 ? argv[1] : "";
    const auto normal = InnovationDistribution::normal();
    const auto t3 = InnovationDistribution::student_t(3.0);
    const ParamVector garch0 = ParamVector::garch(6.5e-6, {0.177}, {0.716});
    std::cout << "acceptance run: seed " << kSeed << ", " << workers() << " worker(s)" << std::endl;

    guarded("C1", [&] {
        const double are = are_sign_vs_qmle(normal);
        report(std::abs(are - kAreNormalTarget) <= kAreNormalTol, "C1",
               "sign vs QMLE ARE under normal = " + fmt(are, 6) + " (target 0.876 +- 0.001)");
    });

    guarded("C2", [&] {
        const auto f = score_functionals(normal, ScoreKind::Sign);
        const bool ok = std::abs(f.gamma) <= kZeroTol && std::abs(f.lambda) <= kZeroTol &&
                        std::abs(f.rho) <= kZeroTol &&
                        std::abs(f.sigma2 - (std::numbers::pi / 2.0 - 1.0)) <= kSigma2Tol &&
                        std::abs(f.c - 2.0 / std::numbers::pi) <= kCTol;
        report(ok, "C2",
               "sign functionals under normal: gamma " + fmt(f.gamma) + ", lambda " + fmt(f.lambda) + ", rho " +
                   fmt(f.rho) + ", sigma2 " + fmt(f.sigma2, 8) + " (pi/2-1), c " + fmt(f.c, 8) + " (2/pi)");
    });

    guarded("C3", [&] {
        const auto r = study(garch0, normal, 1000, kREfficiency, {Method::Qmle, Method::VdW});
        const auto& are = row(r, Method::VdW).are;
        report(all_in(are, kEffLow, kEffHigh), "C3",
               "vdW ARE, normal, n=1000, R=" + std::to_string(kREfficiency) + ": " + list(are) +
                   " (band [0.85, 1.15]; used " + std::to_string(r.replications_used) + ")");
    });

    std::vector<double> are_t3_1000;
    guarded("C4", [&] {
        const auto r = study(garch0, t3, 1000, kREfficiency, {Method::Qmle, Method::Sign});
        are_t3_1000 = row(r, Method::Sign).are;
        report(all_in(are_t3_1000, kHeavyTailFloor, std::numeric_limits<double>::infinity()), "C4",
               "sign ARE, t(3), n=1000, R=" + std::to_string(kREfficiency) + ": " + list(are_t3_1000) +
                   " (each > 2; used " + std::to_string(r.replications_used) + ", QMLE failures " +
                   std::to_string(r.qmle_failures) + ")");
    });

    guarded("C5", [&] {
        if (are_t3_1000.empty()) throw std::runtime_error("n=1000 study unavailable");
        const auto r = study(garch0, t3, 3000, kRLargeN, {Method::Qmle, Method::Sign});
        const auto& are = row(r, Method::Sign).are;
        bool ok = true;
        for (std::size_t j = 0; j < are.size(); ++j) ok = ok && are[j] > are_t3_1000[j];
        report(ok, "C5",
               "sign ARE, t(3), n=3000, R=" + std::to_string(kRLargeN) + ": " + list(are) + " vs n=1000: " +
                   list(are_t3_1000) + " (each must increase)");
    });

    // Coverage cells shared by C6 and C7.
    const std::vector<double> nominal{95.0, 90.0};
    std::vector<CoverageReport> cov_reports;
    std::vector<std::string> cov_labels;
    guarded("C6", [&] {
        const auto r = coverage(ScoreKind::Sign, 1000);
        cov_reports.push_back(r);
        cov_labels.push_back("sign n=1000");
        const std::vector<std::vector<double>> reference{{94.8, 94.7, 93.7}, {91.7, 90.2, 89.6}};
        bool ok = true;
        for (std::size_t l = 0; l < 2; ++l) {
            for (std::size_t j = 0; j < 3; ++j) ok = ok && std::abs(r.coverage[l][j] - reference[l][j]) <= kCoverageTol;
        }
        report(ok, "C6",
               "coverage sign/U, n=1000, R=" + std::to_string(kRCoverage) + ", B=" + std::to_string(kBCoverage) +
                   ": 95% " + list(r.coverage[0], 3) + " vs (94.8, 94.7, 93.7); 90% " + list(r.coverage[1], 3) +
                   " vs (91.7, 90.2, 89.6) (+-5)");
    });

    guarded("C7", [&] {
        for (ScoreKind s : {ScoreKind::Sign, ScoreKind::Wilcoxon, ScoreKind::VdW}) {
            for (std::size_t n : {std::size_t{500}, std::size_t{1000}}) {
                if (s == ScoreKind::Sign && n == 1000 && !cov_reports.empty()) continue;
                cov_reports.push_back(coverage(s, n));
                cov_labels.push_back(std::string(to_string(s)) + " n=" + std::to_string(n));
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < cov_reports.size(); ++i) {
            const auto& r = cov_reports[i];
            bool cell_ok = true;
            for (std::size_t l = 0; l < 2; ++l) {
                for (double c : r.coverage[l]) cell_ok = cell_ok && std::abs(c - nominal[l]) <= kTrendTol;
            }
            ok = ok && cell_ok;
            std::cout << "     C7 " << cov_labels[i] << ": 95% " << list(r.coverage[0], 3) << ", 90% "
                      << list(r.coverage[1], 3) << (cell_ok ? "" : "  <- outside +-6") << std::endl;
        }
        report(ok, "C7",
               "coverage within +-6 of nominal for sign, Wilcoxon, vdW at n=500 and n=1000 (scheme U, R=" +
                   std::to_string(kRCoverage) + ", B=" + std::to_string(kBCoverage) + ")");
    });

    guarded("C8", [&] {
        const auto gjr0 = ParamVector::gjr(3.45e-4, {0.0658}, {0.0843}, {0.8182});
        const auto r = study(gjr0, normal, 1000, kRGjr, {Method::Qmle, Method::VdW});
        const auto& are = row(r, Method::VdW).are;
        report(all_in(are, kEffLow, kEffHigh), "C8",
               "GJR vdW ARE, normal, n=1000, R=" + std::to_string(kRGjr) + ": " + list(are) + " (band [0.85, 1.15])");
    });

    guarded("C9", [&] {
        if (unit_tests.empty()) throw std::runtime_error("pass the unit test binary as the first argument");
        const std::string filter =
            "*truncated ARCH*,variance gradient matches*,scale equivariance*,unit weights reproduce*,"
            "rank scores are invariant*,weights are nonnegative*,paths are bit-reproducible*,"
            "bootstrap runs are reproducible*";
        const auto t0 = std::chrono::steady_clock::now();
        const std::string cmd = "\"" + unit_tests + "\" --minimal \"--test-case=" + filter + "\"";
        const int rc = std::system(cmd.c_str());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(rc == 0 && secs < 60.0, "C9",
               "property suite (filter oracle, gradient, scale equivariance, unit-weight identity, rank "
               "invariance, weight normalization, reproducibility): exit " +
                   std::to_string(rc) + " in " + fmt(secs, 3) + " s (< 60 s)");
    });

    guarded("C10", [&] {
        SimSpec s{garch0, 5000, 500, normal, kSeed};
        const auto x = simulate(s);
        FitConfig cfg;
        cfg.score = ScoreKind::Sign;
        const double c_sign = fit_r_estimator(x, cfg, garch0.spec()).c_hat;
        cfg.score = ScoreKind::VdW;
        const double c_vdw = fit_r_estimator(x, cfg, garch0.spec()).c_hat;
        const bool ok = std::abs(c_sign - 2.0 / std::numbers::pi) < kChatTol && std::abs(c_vdw - 1.0) < kChatTol;
        report(ok, "C10",
               "scale estimate, normal, n=5000: sign " + fmt(c_sign, 5) + " vs 2/pi, vdW " + fmt(c_vdw, 5) +
                   " vs 1 (+-0.05)");
    });

    guarded("C11", [&] {
        const auto r = study(garch0, InnovationDistribution::skew_normal(5.0), 1000, kRSkew,
                             {Method::Qmle, Method::VdW});
        const auto& q = row(r, Method::Qmle).mse;
        const auto& v = row(r, Method::VdW).mse;
        bool ok = true;
        for (std::size_t j = 0; j < q.size(); ++j) ok = ok && v[j] <= q[j];
        report(ok, "C11",
               "skew-normal(5) MSE, n=1000, R=" + std::to_string(kRSkew) + ": vdW " + list(v) + " <= QMLE " +
                   list(q) + " (ARE " + list(row(r, Method::VdW).are) + ")");
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
