#pragma once

#include "tracebo/acquisition.hpp"
#include "tracebo/dominance.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace tracebo {

struct InnerOptConfig {
    int population_size = 20;
    int max_iterations = 100;
    double inertia = 0.729;
    double cognitive_coef = 1.49445;
    double social_coef = 1.49445;
    double mutation_prob = -1.0;  // < 0 means 1/d
    std::uint64_t seed = 0;
};

/// Maps a normalized design point to its (f1, f2) objective vectors, both
/// minimized. Baselines use degenerate shapes (scalar f1, constant f2).
using CandidateScorer = std::function<std::pair<Vector, Vector>(const Vector&)>;

/// Multi-dominance particle swarm over [0,1]^dim. Returns the archive of
/// candidates that attained combined rank 1, deduplicated, capped at 100 by
/// recency, mutually non-dominated under the combined key at return.
std::vector<ScoredCandidate> optimize_candidates(const CandidateScorer& scorer, int dim,
                                                 const InnerOptConfig& cfg);

/// TRACE inner step: tier1/tier2 acquisition vectors under the bundle.
std::vector<ScoredCandidate> optimize_acquisitions(const SurrogateBundle& b, int dim,
                                                   const InnerOptConfig& cfg,
                                                   const AcquisitionConfig& acq);

/// Uniform pick from the archive, rejecting members within 1e-6 of an
/// already-evaluated point; falls back to a Gaussian perturbation (std 0.01)
/// of a random member when every member is rejected. Coordinates normalized.
Vector pick_candidate(const std::vector<ScoredCandidate>& archive,
                      const std::vector<Vector>& evaluated, std::mt19937_64& rng);

}  // namespace tracebo
