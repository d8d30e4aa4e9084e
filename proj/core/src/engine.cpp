#include "tracebo/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace tracebo {

namespace {

using Clock = std::chrono::steady_clock;

struct RunContext {
    const ProblemSpec& p;
    const EngineConfig& cfg;
    Evaluator& eval;
    RunRecord record;
    std::vector<Vector> unit_points;  // normalized copies of evaluated designs
    std::optional<double> incumbent;  // internal minimization sense
    std::mt19937_64 rng;

    RunContext(const ProblemSpec& p_, const EngineConfig& cfg_, Evaluator& eval_)
        : p(p_), cfg(cfg_), eval(eval_), rng(mix_seed(cfg_.seed, 0)) {
        record.problem = p.name;
        record.sense = p.objective_sense;
        record.algorithm = cfg.algorithm;
        record.seed = cfg.seed;
    }

    /// Evaluate a raw design, append to the record, refresh the incumbent.
    const Evaluation& evaluate(const Vector& raw, EvalTag tag) {
        auto [f, c] = eval.evaluate(raw);
        if (c.size() != p.num_constraints) {
            throw EvaluatorError("evaluator returned " + std::to_string(c.size()) +
                                 " constraint values, expected " + std::to_string(p.num_constraints));
        }
        Evaluation e{raw, f, std::move(c), tag};
        const bool feas = is_feasible(e);
        if (feas) {
            const double v = internal_objective(f, p.objective_sense);
            if (!incumbent || v < *incumbent) incumbent = v;
        }
        record.final_dataset.append(std::move(e));
        unit_points.push_back(p.space.normalize(raw));

        IterationRow row;
        row.index = static_cast<int>(record.final_dataset.size());
        row.x = raw;
        row.f = f;
        row.c = record.final_dataset.records.back().c;
        row.feasible = feas;
        if (incumbent) row.best_feasible = native_objective(*incumbent, p.objective_sense);
        record.iterations.push_back(std::move(row));
        return record.final_dataset.records.back();
    }

    void initialize() {
        for (const Vector& x : latin_hypercube(p.space, cfg.initial_samples, mix_seed(cfg.seed, 1))) {
            evaluate(x, EvalTag::initial);
        }
    }

    void finalize(Clock::time_point start) {
        int selected = 0;
        int violations = 0;
        for (const auto& row : record.iterations) {
            if (row.index <= cfg.initial_samples) continue;
            ++selected;
            if (!row.feasible) ++violations;
        }
        record.cv_defined = selected > 0;
        record.cv_percent = selected > 0 ? 100.0 * violations / selected : 0.0;
        if (incumbent) record.best = native_objective(*incumbent, p.objective_sense);
        record.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    }
};

SurrogateBundle fit_surrogates(const RunContext& ctx, int iteration) {
    const auto& records = ctx.record.final_dataset.records;
    const int n = static_cast<int>(records.size());
    const int d = ctx.p.space.dimension();
    const int c_count = ctx.p.num_constraints;

    Matrix X(n, d);
    for (int i = 0; i < n; ++i) X.row(i) = ctx.unit_points[i];

    Vector y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = internal_objective(records[i].f, ctx.p.objective_sense);
    }

    SurrogateBundle bundle;
    FitConfig fit_cfg = ctx.cfg.fit;
    fit_cfg.seed = mix_seed(ctx.cfg.seed, 100 + static_cast<std::uint64_t>(iteration) * (c_count + 1));
    bundle.objective_gp = std::make_shared<GpModel>(GpModel::fit(X, y, fit_cfg));

    for (int k = 0; k < c_count; ++k) {
        Vector ck(n);
        for (int i = 0; i < n; ++i) ck[i] = records[i].c[k];
        fit_cfg.seed = mix_seed(ctx.cfg.seed, 101 + static_cast<std::uint64_t>(iteration) * (c_count + 1) + k);
        bundle.constraint_gps.push_back(std::make_shared<GpModel>(GpModel::fit(X, ck, fit_cfg)));
    }
    return bundle;
}

CandidateScorer make_scorer(Algorithm algo, const SurrogateBundle& bundle,
                            const AcquisitionConfig& acq) {
    switch (algo) {
        case Algorithm::trace:
            return [&bundle, acq](const Vector& x) {
                return std::make_pair(tier1_vector(bundle, x, acq), tier2_vector(bundle, x, acq));
            };
        // Products are maximized in log scale: same argmax and same Pareto
        // relation, but no underflow ties deep in the improbable regions.
        case Algorithm::eipf:
            return [&bundle, acq](const Vector& x) {
                const Prediction p = bundle.objective_gp->predict(x);
                Vector f1(1);
                f1 << -(log_ei(p.mu, p.sigma, acq) + log_prob_feasible(bundle, x));
                return std::make_pair(f1, Vector::Zero(1).eval());
            };
        case Algorithm::pipf:
            return [&bundle, acq](const Vector& x) {
                const Prediction p = bundle.objective_gp->predict(x);
                Vector f1(1);
                f1 << -(log_pi(p.mu, p.sigma, acq) + log_prob_feasible(bundle, x));
                return std::make_pair(f1, Vector::Zero(1).eval());
            };
        case Algorithm::mace:
            return [&bundle, acq](const Vector& x) {
                const Prediction p = bundle.objective_gp->predict(x);
                const double lpf = log_prob_feasible(bundle, x);
                Vector f1(3);
                f1 << lcb(p.mu, p.sigma, acq), -(log_ei(p.mu, p.sigma, acq) + lpf),
                    -(log_pi(p.mu, p.sigma, acq) + lpf);
                return std::make_pair(f1, Vector::Zero(1).eval());
            };
        case Algorithm::pso:
            break;
    }
    throw std::invalid_argument("make_scorer: pso has no surrogate scorer");
}

RunRecord run_bo(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval) {
    RunContext ctx(p, cfg, eval);
    const auto start = Clock::now();
    try {
        ctx.initialize();
        const int bo_iterations = cfg.total_budget - cfg.initial_samples;
        for (int j = 1; j <= bo_iterations; ++j) {
            const SurrogateBundle bundle = fit_surrogates(ctx, j);

            AcquisitionConfig acq = cfg.acq;
            // Incumbent: best objective value among all observations,
            // feasible or not.
            double tau = std::numeric_limits<double>::infinity();
            for (const auto& e : ctx.record.final_dataset.records) {
                tau = std::min(tau, internal_objective(e.f, p.objective_sense));
            }
            acq.tau = tau;

            InnerOptConfig inner = cfg.inner;
            inner.seed = mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(j));
            const auto archive =
                cfg.algorithm == Algorithm::trace
                    ? optimize_acquisitions(bundle, p.space.dimension(), inner, acq)
                    : optimize_candidates(make_scorer(cfg.algorithm, bundle, acq),
                                          p.space.dimension(), inner);

            const Vector unit = pick_candidate(archive, ctx.unit_points, ctx.rng);
            ctx.evaluate(p.space.denormalize(unit), EvalTag::selected);
        }
    } catch (const std::exception& e) {
        ctx.record.aborted = true;
        ctx.record.abort_reason = e.what();
    }
    ctx.finalize(start);
    return ctx.record;
}

RunRecord run_pso(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval) {
    RunContext ctx(p, cfg, eval);
    const auto start = Clock::now();
    const int d = p.space.dimension();
    const int pop = cfg.inner.population_size;

    auto penalty = [&](const Evaluation& e) {
        double v = internal_objective(e.f, p.objective_sense);
        for (Eigen::Index i = 0; i < e.c.size(); ++i) v += 1e6 * std::max(e.c[i], 0.0);
        return v;
    };

    try {
        ctx.initialize();

        std::mt19937_64 rng(mix_seed(cfg.seed, 2));
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        // Swarm state in normalized coordinates; the best initial sample
        // seeds the global best.
        std::vector<Vector> position(pop, Vector(d));
        std::vector<Vector> velocity(pop, Vector::Zero(d));
        std::vector<Vector> pbest_x(pop);
        std::vector<double> pbest_v(pop, std::numeric_limits<double>::infinity());
        Vector gbest_x;
        double gbest_v = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ctx.record.final_dataset.records.size(); ++i) {
            const double v = penalty(ctx.record.final_dataset.records[i]);
            if (v < gbest_v) {
                gbest_v = v;
                gbest_x = ctx.unit_points[i];
            }
        }
        for (auto& x : position) {
            for (int j = 0; j < d; ++j) x[j] = unif(rng);
        }

        int remaining = cfg.total_budget - cfg.initial_samples;
        while (remaining > 0) {
            for (int i = 0; i < pop && remaining > 0; ++i, --remaining) {
                const auto& e = ctx.evaluate(p.space.denormalize(position[i]), EvalTag::selected);
                const double v = penalty(e);
                if (v < pbest_v[i]) {
                    pbest_v[i] = v;
                    pbest_x[i] = position[i];
                }
                if (v < gbest_v) {
                    gbest_v = v;
                    gbest_x = position[i];
                }
            }
            if (remaining <= 0) break;
            for (int i = 0; i < pop; ++i) {
                for (int j = 0; j < d; ++j) {
                    const double r1 = unif(rng);
                    const double r2 = unif(rng);
                    double v = cfg.inner.inertia * velocity[i][j]
                               + cfg.inner.cognitive_coef * r1 * (pbest_x[i][j] - position[i][j])
                               + cfg.inner.social_coef * r2 * (gbest_x[j] - position[i][j]);
                    v = std::clamp(v, -0.2, 0.2);
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
            }
        }
    } catch (const std::exception& e) {
        ctx.record.aborted = true;
        ctx.record.abort_reason = e.what();
    }
    ctx.finalize(start);
    return ctx.record;
}

void validate_config(const ProblemSpec& p, const EngineConfig& cfg) {
    // initial_samples == total_budget degenerates to the empty loop.
    if (cfg.initial_samples < 1 || cfg.initial_samples > cfg.total_budget) {
        throw std::invalid_argument("engine: require 1 <= initial_samples <= total_budget");
    }
    if (cfg.algorithm != Algorithm::pso && p.num_constraints < 1) {
        throw std::invalid_argument("engine: " + to_string(cfg.algorithm) +
                                    " requires at least one constraint");
    }
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::trace: return "trace";
        case Algorithm::mace: return "mace";
        case Algorithm::eipf: return "eipf";
        case Algorithm::pipf: return "pipf";
        case Algorithm::pso: return "pso";
    }
    return "unknown";
}

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
    if (s == "trace") return Algorithm::trace;
    if (s == "mace") return Algorithm::mace;
    if (s == "eipf") return Algorithm::eipf;
    if (s == "pipf") return Algorithm::pipf;
    if (s == "pso") return Algorithm::pso;
    return std::nullopt;
}

RunRecord run_trace(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval) {
    if (cfg.algorithm != Algorithm::trace) {
        throw std::invalid_argument("run_trace: config selects a different algorithm");
    }
    validate_config(p, cfg);
    return run_bo(p, cfg, eval);
}

RunRecord run_baseline(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval) {
    if (cfg.algorithm == Algorithm::trace) {
        throw std::invalid_argument("run_baseline: use run_trace for trace");
    }
    validate_config(p, cfg);
    if (cfg.algorithm == Algorithm::pso) return run_pso(p, cfg, eval);
    return run_bo(p, cfg, eval);
}

RunRecord run_algorithm(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval) {
    return cfg.algorithm == Algorithm::trace ? run_trace(p, cfg, eval)
                                             : run_baseline(p, cfg, eval);
}

Summary summarize_runs(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("summarize_runs: need at least one record");
    for (const auto& r : records) {
        if (r.problem != records.front().problem || r.sense != records.front().sense) {
            throw std::invalid_argument("summarize_runs: records mix problems or senses");
        }
    }
    const Sense sense = records.front().sense;

    Summary s;
    s.run_count = static_cast<int>(records.size());
    std::vector<double> bests;
    double cv_sum = 0.0;
    for (const auto& r : records) {
        cv_sum += r.cv_percent;
        if (r.best) bests.push_back(*r.best);
    }
    s.cv_percent = cv_sum / static_cast<double>(records.size());
    s.feasible_run_count = static_cast<int>(bests.size());
    if (bests.empty()) return s;

    const auto [lo, hi] = std::minmax_element(bests.begin(), bests.end());
    s.best = sense == Sense::maximize ? *hi : *lo;
    s.worst = sense == Sense::maximize ? *lo : *hi;
    const double mean = std::accumulate(bests.begin(), bests.end(), 0.0) / bests.size();
    s.mean = mean;
    if (bests.size() > 1) {
        double ss = 0.0;
        for (double b : bests) ss += (b - mean) * (b - mean);
        s.stddev = std::sqrt(ss / static_cast<double>(bests.size() - 1));
    } else {
        s.stddev = 0.0;
    }
    return s;
}

}  // namespace tracebo
