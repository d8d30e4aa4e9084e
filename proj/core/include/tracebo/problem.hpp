#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tracebo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Sense { minimize, maximize };

/// Box-bounded search space. Algorithms work in normalized [0,1]^d
/// coordinates; raw bounds apply only at evaluator boundaries.
class SearchSpace {
public:
    SearchSpace() = default;  // empty placeholder, dimension 0
    SearchSpace(Vector lower, Vector upper);

    int dimension() const { return static_cast<int>(lower_.size()); }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    bool contains(const Vector& raw) const;

    /// Map raw coordinates to [0,1]^d.
    Vector normalize(const Vector& raw) const;
    /// Map [0,1]^d coordinates back to raw bounds.
    Vector denormalize(const Vector& unit) const;

private:
    Vector lower_;
    Vector upper_;
};

struct ProblemSpec {
    SearchSpace space;
    int num_constraints = 0;
    Sense objective_sense = Sense::minimize;
    std::string name;
};

enum class EvalTag { initial, selected };

/// One evaluated design. `x` is in raw coordinates, `f` in the problem's
/// native sense; feasible iff every entry of `c` is <= 0.
struct Evaluation {
    Vector x;
    double f = 0.0;
    Vector c;
    EvalTag tag = EvalTag::initial;
};

bool is_feasible(const Evaluation& e);

/// Append-only evaluation history; order equals evaluation order.
struct Dataset {
    std::vector<Evaluation> records;

    void append(Evaluation e) { records.push_back(std::move(e)); }
    std::size_t size() const { return records.size(); }
};

/// Objective value in internal minimization form.
inline double internal_objective(double f, Sense sense) {
    return sense == Sense::maximize ? -f : f;
}
inline double native_objective(double internal, Sense sense) {
    return sense == Sense::maximize ? -internal : internal;
}

/// Feasible record with minimal internal objective, if any.
std::optional<Evaluation> best_feasible(const Dataset& d, Sense sense);

/// Latin hypercube sample: n points inside bounds, exactly one per axis
/// stratum, deterministic under a fixed seed.
std::vector<Vector> latin_hypercube(const SearchSpace& space, int n, std::uint64_t seed);

/// Derive an independent substream seed (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tracebo
