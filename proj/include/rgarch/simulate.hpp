#pragma once

#include "rgarch/model.hpp"
#include "rgarch/random.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rgarch {

enum class DistKind { Normal, DoubleExponential, Logistic, StudentT, SkewNormal };

/// Innovation law, always standardized to mean 0 and variance 1.
struct InnovationDistribution {
    DistKind kind = DistKind::Normal;
    double df = 5.0;     // StudentT only; must exceed 2
    double shape = 5.0;  // SkewNormal only (Azzalini shape a)

    static InnovationDistribution normal() { return {}; }
    static InnovationDistribution double_exponential() { return {DistKind::DoubleExponential}; }
    static InnovationDistribution logistic() { return {DistKind::Logistic}; }
    static InnovationDistribution student_t(double df) { return {DistKind::StudentT, df}; }
    static InnovationDistribution skew_normal(double a) { return {DistKind::SkewNormal, 5.0, a}; }

    void validate() const;
    std::string name() const;
};

/// Parses "normal", "de", "logistic", "t", "skewnormal"; df/shape are taken from the arguments.
InnovationDistribution parse_distribution(std::string_view name, double df, double shape);

double sample_innovation(const InnovationDistribution& dist, Engine& rng);
std::vector<double> sample_innovations(const InnovationDistribution& dist, std::size_t count,
                                       Engine& rng);

struct SimSpec {
    ParamVector theta0;
    std::size_t n = 1000;
    std::size_t burnin = 500;
    InnovationDistribution dist;
    std::uint64_t seed = 0;
    bool allow_nonstationary = false;
};

/**
 * Simulates x_1..x_n from the GARCH or GJR recursion (family taken from theta0).
 * The variance starts at the unconditional level and the first `burnin` draws
 * are discarded.
 */
std::vector<double> simulate(const SimSpec& spec);

/// As simulate(), but draws from an existing engine instead of spec.seed.
std::vector<double> simulate(const SimSpec& spec, Engine& rng);

}  // namespace rgarch
