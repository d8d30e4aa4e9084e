#include "tracebo/inner_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tracebo {

namespace {

constexpr double kVelocityClamp = 0.2;
constexpr double kDedupTol = 1e-9;
constexpr std::size_t kArchiveCap = 100;

bool near_duplicate(const Vector& a, const Vector& b, double tol) {
    return (a - b).norm() < tol;
}

}  // namespace

std::vector<ScoredCandidate> optimize_candidates(const CandidateScorer& scorer, int dim,
                                                 const InnerOptConfig& cfg) {
    if (cfg.population_size < 2) throw std::invalid_argument("inner opt: population_size must be >= 2");
    if (cfg.max_iterations < 1) throw std::invalid_argument("inner opt: max_iterations must be >= 1");
    if (dim < 1) throw std::invalid_argument("inner opt: dimension must be >= 1");
    if (cfg.inertia < 0 || cfg.cognitive_coef < 0 || cfg.social_coef < 0) {
        throw std::invalid_argument("inner opt: coefficients must be >= 0");
    }

    const int pop = cfg.population_size;
    const double mut_prob = cfg.mutation_prob < 0 ? 1.0 / dim : cfg.mutation_prob;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<Vector> position(pop, Vector(dim));
    std::vector<Vector> velocity(pop, Vector::Zero(dim));
    for (auto& x : position) {
        for (int j = 0; j < dim; ++j) x[j] = unif(rng);
    }

    auto score = [&](const Vector& x) {
        auto [f1, f2] = scorer(x);
        ScoredCandidate c;
        c.x = x;
        c.f1 = std::move(f1);
        c.f2 = std::move(f2);
        return c;
    };

    std::vector<ScoredCandidate> pbest;
    std::vector<ScoredCandidate> archive;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        std::vector<ScoredCandidate> current(pop);
        for (int i = 0; i < pop; ++i) current[i] = score(position[i]);
        if (pbest.empty()) pbest = current;

        // Joint ranking: current swarm, personal bests, archive. Ranks are
        // population-relative, so bests and archive members are re-ranked
        // alongside the new positions each iteration.
        std::vector<ScoredCandidate> joint;
        joint.reserve(current.size() + pbest.size() + archive.size());
        for (const auto& c : archive) joint.push_back(c);
        for (const auto& c : current) joint.push_back(c);
        for (const auto& c : pbest) joint.push_back(c);
        const std::vector<int> combined = multi_dominance_rank(joint);

        // New archive: every joint member holding combined rank 1, oldest
        // first, deduplicated, capped by recency.
        std::vector<ScoredCandidate> next_archive;
        for (std::size_t k = 0; k < joint.size(); ++k) {
            if (combined[k] != 1) continue;
            bool dup = false;
            for (const auto& kept : next_archive) {
                if (near_duplicate(joint[k].x, kept.x, kDedupTol)) {
                    dup = true;
                    break;
                }
            }
            if (!dup) next_archive.push_back(joint[k]);
        }
        if (next_archive.size() > kArchiveCap) {
            next_archive.erase(next_archive.begin(),
                               next_archive.end() - static_cast<long>(kArchiveCap));
        }
        archive = std::move(next_archive);

        // Personal bests under the joint ranks. Joint layout is
        // [old archive | current | pbest].
        const std::size_t cur_off = joint.size() - 2 * static_cast<std::size_t>(pop);
        for (int i = 0; i < pop; ++i) {
            const auto& cur = joint[cur_off + static_cast<std::size_t>(i)];
            const auto& old = joint[cur_off + static_cast<std::size_t>(pop + i)];
            if (combined_compare(cur, old) == Comparison::a_better) pbest[i] = cur;
        }

        if (iter + 1 == cfg.max_iterations) break;

        // Velocity/position update with a leader drawn from the archive.
        std::uniform_int_distribution<std::size_t> pick_leader(0, archive.size() - 1);
        for (int i = 0; i < pop; ++i) {
            const Vector& leader = archive[pick_leader(rng)].x;
            for (int j = 0; j < dim; ++j) {
                const double r1 = unif(rng);
                const double r2 = unif(rng);
                double v = cfg.inertia * velocity[i][j]
                           + cfg.cognitive_coef * r1 * (pbest[i].x[j] - position[i][j])
                           + cfg.social_coef * r2 * (leader[j] - position[i][j]);
                v = std::clamp(v, -kVelocityClamp, kVelocityClamp);
                double x = position[i][j] + v;
                if (x < 0.0) {
                    x = 0.0;
                    v = 0.0;
                } else if (x > 1.0) {
                    x = 1.0;
                    v = 0.0;
                }
                velocity[i][j] = v;
                position[i][j] = x;
            }
            if (unif(rng) < mut_prob) {
                std::uniform_int_distribution<int> pick_coord(0, dim - 1);
                position[i][pick_coord(rng)] = unif(rng);
            }
        }
    }
    return archive;
}

std::vector<ScoredCandidate> optimize_acquisitions(const SurrogateBundle& b, int dim,
                                                   const InnerOptConfig& cfg,
                                                   const AcquisitionConfig& acq) {
    if (b.constraint_gps.empty()) {
        throw std::invalid_argument("optimize_acquisitions: C >= 1 required");
    }
    // Tier 2 is ranked through [LCB, -log PI, -log EI]: the log images are
    // strictly increasing in PI and EI, so the induced Pareto relation is the
    // [LCB, -PI, -EI] one, minus the underflow ties that would otherwise
    // merge the deep-tail region into one rank.
    CandidateScorer scorer = [&b, acq](const Vector& x) {
        const Prediction p = b.objective_gp->predict(x);
        Vector f2(3);
        f2 << lcb(p.mu, p.sigma, acq), -log_pi(p.mu, p.sigma, acq), -log_ei(p.mu, p.sigma, acq);
        return std::make_pair(tier1_vector(b, x, acq), f2);
    };
    return optimize_candidates(scorer, dim, cfg);
}

Vector pick_candidate(const std::vector<ScoredCandidate>& archive,
                      const std::vector<Vector>& evaluated, std::mt19937_64& rng) {
    if (archive.empty()) throw std::invalid_argument("pick_candidate: empty archive");
    constexpr double kRejectTol = 1e-6;

    auto too_close = [&](const Vector& x, double tol) {
        for (const auto& e : evaluated) {
            if ((x - e).norm() < tol) return true;
        }
        return false;
    };

    std::vector<std::size_t> acceptable;
    for (std::size_t i = 0; i < archive.size(); ++i) {
        if (!too_close(archive[i].x, kRejectTol)) acceptable.push_back(i);
    }
    if (!acceptable.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, acceptable.size() - 1);
        return archive[acceptable[pick(rng)]].x;
    }

    // Every member coincides with an evaluated point: perturb one.
    std::uniform_int_distribution<std::size_t> pick(0, archive.size() - 1);
    const Vector& base = archive[pick(rng)].x;
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vector y = base;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            y[j] = std::clamp(y[j] + noise(rng), 0.0, 1.0);
        }
        bool distinct = true;
        for (const auto& e : evaluated) {
            if ((y - e).norm() == 0.0) {
                distinct = false;
                break;
            }
        }
        if (distinct) return y;
    }
    throw std::runtime_error("pick_candidate: could not perturb away from evaluated points");
}

}  // namespace tracebo
