#include "tracebo/problem.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tracebo {

SearchSpace::SearchSpace(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.size() < 1) {
        throw std::invalid_argument("SearchSpace: bounds must have identical length >= 1");
    }
    for (Eigen::Index j = 0; j < lower_.size(); ++j) {
        if (!(lower_[j] < upper_[j])) {
            throw std::invalid_argument("SearchSpace: lower bound must be < upper bound on every axis");
        }
    }
}

bool SearchSpace::contains(const Vector& raw) const {
    if (raw.size() != lower_.size()) return false;
    for (Eigen::Index j = 0; j < raw.size(); ++j) {
        if (raw[j] < lower_[j] || raw[j] > upper_[j]) return false;
    }
    return true;
}

Vector SearchSpace::normalize(const Vector& raw) const {
    if (raw.size() != lower_.size()) {
        throw std::invalid_argument("SearchSpace::normalize: dimension mismatch");
    }
    return (raw - lower_).cwiseQuotient(upper_ - lower_);
}

Vector SearchSpace::denormalize(const Vector& unit) const {
    if (unit.size() != lower_.size()) {
        throw std::invalid_argument("SearchSpace::denormalize: dimension mismatch");
    }
    return lower_ + unit.cwiseProduct(upper_ - lower_);
}

bool is_feasible(const Evaluation& e) {
    for (Eigen::Index i = 0; i < e.c.size(); ++i) {
        if (e.c[i] > 0.0) return false;
    }
    return true;  // vacuously true when C = 0
}

std::optional<Evaluation> best_feasible(const Dataset& d, Sense sense) {
    std::optional<Evaluation> best;
    double best_value = std::numeric_limits<double>::infinity();
    for (const Evaluation& e : d.records) {
        if (!is_feasible(e)) continue;
        const double v = internal_objective(e.f, sense);
        if (v < best_value) {
            best_value = v;
            best = e;
        }
    }
    return best;
}

std::vector<Vector> latin_hypercube(const SearchSpace& space, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("latin_hypercube: n must be >= 1");
    const int d = space.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // One random point per stratum per axis, strata independently permuted.
    std::vector<Vector> points(n, Vector(d));
    std::vector<int> strata(n);
    for (int j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        for (int i = 0; i < n; ++i) {
            double u = (static_cast<double>(strata[i]) + unif(rng)) / static_cast<double>(n);
            points[i][j] = std::min(u, std::nextafter(1.0, 0.0));
        }
    }
    for (auto& p : points) p = space.denormalize(p);
    return points;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + stream * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace tracebo
