#pragma once

#include "tracebo/problem.hpp"

#include <utility>
#include <vector>

namespace tracebo {

/// A design point scored under both dominance tiers. Ranks are 1-based and
/// population-relative; the combined ordering is lexicographic on (R1, R2).
struct ScoredCandidate {
    Vector x;    // normalized coordinates
    Vector f1;   // tier-1 objectives, minimized
    Vector f2;   // tier-2 objectives, minimized
    int rank1 = 0;
    int rank2 = 0;

    std::pair<int, int> combined_key() const { return {rank1, rank2}; }
};

/// true iff a <= b component-wise with at least one strict inequality.
bool pareto_dominates(const Vector& a, const Vector& b);

/// Fast non-dominated sorting; rank 1 is the non-dominated front.
std::vector<int> nondominated_sort(const std::vector<Vector>& points);

enum class Comparison { a_better, b_better, equivalent };

/// Lexicographic comparison of (R1, R2) keys.
Comparison combined_compare(const ScoredCandidate& a, const ScoredCandidate& b);

/// Fills rank1 (non-dominated sort of f1 over the population) and rank2
/// (non-dominated sort of f2 within each rank1 front), then dense-ranks the
/// lexicographic (R1, R2) keys. Returns the combined 1-based ranks.
std::vector<int> multi_dominance_rank(std::vector<ScoredCandidate>& pop);

}  // namespace tracebo
