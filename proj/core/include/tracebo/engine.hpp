#pragma once

#include "tracebo/acquisition.hpp"
#include "tracebo/gp.hpp"
#include "tracebo/inner_opt.hpp"
#include "tracebo/problem.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracebo {

/// Black-box evaluation backend: raw coordinates in, native-sense objective
/// and C constraint values out.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual std::pair<double, Vector> evaluate(const Vector& raw_x) = 0;
};

struct EvaluatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Algorithm { trace, mace, eipf, pipf, pso };

std::string to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(const std::string& s);

struct EngineConfig {
    int initial_samples = 10;  // S_in
    int total_budget = 50;     // S_tot
    Algorithm algorithm = Algorithm::trace;
    std::uint64_t seed = 0;
    InnerOptConfig inner;
    AcquisitionConfig acq;
    FitConfig fit;
};

struct IterationRow {
    int index = 0;  // 1-based evaluation index
    Vector x;       // raw coordinates
    double f = 0.0; // native sense
    Vector c;
    bool feasible = false;
    std::optional<double> best_feasible;  // incumbent, native sense
};

struct RunRecord {
    std::string problem;
    Sense sense = Sense::minimize;
    Algorithm algorithm = Algorithm::trace;
    std::uint64_t seed = 0;
    std::vector<IterationRow> iterations;
    std::optional<double> best;  // best feasible objective, native sense
    double cv_percent = 0.0;     // over post-initialization evaluations
    bool cv_defined = false;     // false when no selected evaluations exist
    double wall_time_s = 0.0;
    bool aborted = false;
    std::string abort_reason;
    Dataset final_dataset;
};

/// TRACE outer loop: LHS init, then fit C+1 surrogates, optimize the tiered
/// acquisition ensemble, pick, evaluate, append. Requires C >= 1.
RunRecord run_trace(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval);

/// Baselines: mace (single-level [LCB, -EI*PF, -PI*PF] ensemble), eipf / pipf
/// (scalar EI*PF / PI*PF), pso (penalty particle swarm on the true evaluator).
RunRecord run_baseline(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval);

/// Dispatch on cfg.algorithm.
RunRecord run_algorithm(const ProblemSpec& p, const EngineConfig& cfg, Evaluator& eval);

struct Summary {
    std::optional<double> best;
    std::optional<double> worst;
    std::optional<double> mean;
    std::optional<double> stddev;  // sample (n-1)
    double cv_percent = 0.0;       // mean over runs
    int feasible_run_count = 0;
    int run_count = 0;
};

/// Statistics over per-run best feasible values in native sense; runs with no
/// feasible solution are excluded from best/worst/mean/std and counted apart.
Summary summarize_runs(const std::vector<RunRecord>& records);

}  // namespace tracebo
