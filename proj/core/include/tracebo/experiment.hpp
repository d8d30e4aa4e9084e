#pragma once

#include "tracebo/benchmarks.hpp"
#include "tracebo/engine.hpp"
#include "tracebo/external_evaluator.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tracebo {

struct ExperimentConfig {
    std::string problem;  // benchmark name or path to an evaluator config file
    std::vector<Algorithm> algorithms = {Algorithm::trace};
    int budget = 50;     // S_tot
    int init = 10;       // S_in
    int num_runs = 10;
    std::uint64_t base_seed = 0;  // run k uses base_seed + k
    std::string output_dir = "results";
    InnerOptConfig inner;
    AcquisitionConfig acq;
    FitConfig fit;
    int workers = 0;  // 0 = available parallelism
};

struct ExperimentResult {
    std::map<Algorithm, std::vector<RunRecord>> runs;
    std::map<Algorithm, Summary> summaries;
    int aborted_runs = 0;
};

/// Resolve the problem reference: registered benchmark name, or a descriptor
/// file path. Throws std::invalid_argument for anything else.
struct ResolvedProblem {
    ProblemSpec spec;
    std::shared_ptr<const BenchmarkProblem> builtin;  // null for external
    std::shared_ptr<const EvaluatorDescriptor> descriptor;  // null for builtin

    std::unique_ptr<Evaluator> make_evaluator() const;
};
ResolvedProblem resolve_problem(const std::string& problem);

/// Execute num_runs x |algorithms| runs on a bounded worker pool and collect
/// records plus per-algorithm summaries.
ExperimentResult run_experiment_collect(const ExperimentConfig& cfg);

/// Full harness: runs, per-run CSVs, per-algorithm summary JSON, comparison
/// table, convergence CSV. Returns a nonzero exit status if any run aborts.
int run_experiment(const ExperimentConfig& cfg);

/// Per-run CSV: header iter,x_1..x_d,f,c_1..c_C,feasible,best_feasible.
void write_run_csv(std::ostream& out, const RunRecord& record);
std::string run_csv_filename(Algorithm a, std::uint64_t seed);

std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const std::string& text);

std::string summary_to_json(const Summary& s);

/// Comparison table in the Best | Worst | Mean | Std | CV (%) layout,
/// 4-decimal formatting, "-" for algorithms with no feasible run.
std::string comparison_table(const std::vector<std::pair<Algorithm, Summary>>& rows);

/// Iteration index vs mean best-feasible value per algorithm; runs with no
/// feasible incumbent at an iteration are excluded and counted.
void emit_convergence(std::ostream& out,
                      const std::map<Algorithm, std::vector<RunRecord>>& runs);

}  // namespace tracebo
