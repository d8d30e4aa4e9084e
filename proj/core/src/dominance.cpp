#include "tracebo/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tracebo {

bool pareto_dominates(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("pareto_dominates: objective vectors differ in length");
    }
    bool strict = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

std::vector<int> nondominated_sort(const std::vector<Vector>& points) {
    const int n = static_cast<int>(points.size());
    if (n == 0) throw std::invalid_argument("nondominated_sort: empty population");
    for (const auto& p : points) {
        // +-inf is legal (log-scale acquisition limits); NaN is not.
        if (p.hasNaN()) throw std::invalid_argument("nondominated_sort: NaN objective entry");
    }

    // Deb's fast non-dominated sort: domination counts plus adjacency lists.
    std::vector<int> dominated_count(n, 0);
    std::vector<std::vector<int>> dominates(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (pareto_dominates(points[i], points[j])) {
                dominates[i].push_back(j);
                ++dominated_count[j];
            } else if (pareto_dominates(points[j], points[i])) {
                dominates[j].push_back(i);
                ++dominated_count[i];
            }
        }
    }

    std::vector<int> ranks(n, 0);
    std::vector<int> front;
    for (int i = 0; i < n; ++i) {
        if (dominated_count[i] == 0) front.push_back(i);
    }
    int rank = 1;
    while (!front.empty()) {
        std::vector<int> next;
        for (int i : front) {
            ranks[i] = rank;
            for (int j : dominates[i]) {
                if (--dominated_count[j] == 0) next.push_back(j);
            }
        }
        front = std::move(next);
        ++rank;
    }
    return ranks;
}

Comparison combined_compare(const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.combined_key() < b.combined_key()) return Comparison::a_better;
    if (b.combined_key() < a.combined_key()) return Comparison::b_better;
    return Comparison::equivalent;
}

std::vector<int> multi_dominance_rank(std::vector<ScoredCandidate>& pop) {
    const int n = static_cast<int>(pop.size());
    if (n == 0) throw std::invalid_argument("multi_dominance_rank: empty population");

    std::vector<Vector> f1(n);
    for (int i = 0; i < n; ++i) f1[i] = pop[i].f1;
    const std::vector<int> r1 = nondominated_sort(f1);
    for (int i = 0; i < n; ++i) pop[i].rank1 = r1[i];

    // R2 within each R1 front, so the best combined key reproduces the
    // nested minimization min(min(X, F1), F2) exactly.
    const int max_front = *std::max_element(r1.begin(), r1.end());
    for (int front = 1; front <= max_front; ++front) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i) {
            if (r1[i] == front) members.push_back(i);
        }
        std::vector<Vector> f2(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) f2[k] = pop[members[k]].f2;
        const std::vector<int> r2 = nondominated_sort(f2);
        for (std::size_t k = 0; k < members.size(); ++k) pop[members[k]].rank2 = r2[k];
    }

    // Dense ranking of the lexicographic keys.
    std::map<std::pair<int, int>, int> key_rank;
    for (const auto& c : pop) key_rank[c.combined_key()] = 0;
    int next = 1;
    for (auto& [key, rank] : key_rank) rank = next++;

    std::vector<int> combined(n);
    for (int i = 0; i < n; ++i) combined[i] = key_rank[pop[i].combined_key()];
    return combined;
}

}  // namespace tracebo
