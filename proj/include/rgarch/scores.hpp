#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rgarch {

/// Rank scores phi on (0,1).
enum class ScoreKind { Sign, Wilcoxon, VdW };

ScoreKind parse_score(std::string_view name);
std::string_view to_string(ScoreKind kind) noexcept;

/// Standard normal quantile (Wichura AS241, relative error below 1e-15).
double normal_quantile(double u);

/// phi(u): sign(u-1/2) with phi(1/2)=0, u-1/2, or Phi^{-1}(u). Throws DomainError off (0,1).
double score_eval(ScoreKind kind, double u);

/// Ranks 1..n of eps; ties broken by original index.
std::vector<std::size_t> compute_ranks(std::span<const double> eps);

/// phi(r_t/(n+1)) for every t.
std::vector<double> rank_scores(ScoreKind kind, std::span<const double> eps);

}  // namespace rgarch
