#include "tracebo/benchmarks.hpp"
#include "tracebo/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<tracebo::Algorithm> parse_algorithms(const std::string& csv) {
    std::vector<tracebo::Algorithm> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto a = tracebo::algorithm_from_string(item);
        if (!a) throw CLI::ValidationError("--algo", "unknown algorithm '" + item + "'");
        out.push_back(*a);
    }
    if (out.empty()) throw CLI::ValidationError("--algo", "no algorithms given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained Bayesian optimization with a tiered acquisition ensemble"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run algorithms on a problem and write result files");
    std::string problem;
    std::string algos = "trace";
    int budget = 50;
    int init = 10;
    int runs = 10;
    std::uint64_t seed = 0;
    std::string out_dir = "results";
    int workers = 0;
    tracebo::InnerOptConfig inner;
    tracebo::AcquisitionConfig acq;
    tracebo::FitConfig fit;
    run->add_option("--problem", problem, "Benchmark name or evaluator config file")->required();
    run->add_option("--algo", algos, "Comma-separated list: trace,mace,eipf,pipf,pso");
    run->add_option("--budget", budget, "Total evaluation budget S_tot");
    run->add_option("--init", init, "Initial Latin hypercube sample size S_in");
    run->add_option("--runs", runs, "Number of independent runs");
    run->add_option("--seed", seed, "Base seed; run k uses seed + k");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--workers", workers, "Worker pool size (0 = available parallelism)");
    run->add_option("--pop", inner.population_size, "Inner optimizer population size");
    run->add_option("--iters", inner.max_iterations, "Inner optimizer iterations");
    run->add_option("--beta", acq.beta, "LCB exploration parameter");
    run->add_option("--epsilon", acq.epsilon, "PI/EI margin parameter");
    run->add_option("--alpha", acq.alpha, "Tier-1 exploration parameter");
    run->add_option("--restarts", fit.restarts, "GP fit restarts");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Exhaustive feasibility/optimum grid oracle");
    std::string oracle_problem;
    int resolution = 600;
    oracle->add_option("--problem", oracle_problem, "Benchmark name")->required();
    oracle->add_option("--resolution", resolution, "Grid resolution per axis");

    // theorem1
    auto* theorem = app.add_subcommand("theorem1", "Tier-1 feasibility-correspondence check");
    std::string theorem_problem;
    int grid_res = 101;
    int boundary = 100;
    theorem->add_option("--problem", theorem_problem, "Benchmark name")->required();
    theorem->add_option("--grid", grid_res, "Grid resolution per axis");
    theorem->add_option("--boundary", boundary, "Boundary points injected into the grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            tracebo::ExperimentConfig cfg;
            cfg.problem = problem;
            cfg.algorithms = parse_algorithms(algos);
            cfg.budget = budget;
            cfg.init = init;
            cfg.num_runs = runs;
            cfg.base_seed = seed;
            cfg.output_dir = out_dir;
            cfg.inner = inner;
            cfg.acq = acq;
            cfg.fit = fit;
            cfg.workers = workers;
            return tracebo::run_experiment(cfg);
        }
        if (*oracle) {
            const auto bench = tracebo::find_benchmark(oracle_problem);
            if (!bench) {
                std::fprintf(stderr, "unknown benchmark '%s'\n", oracle_problem.c_str());
                return 2;
            }
            const auto result = tracebo::feasible_grid_oracle(*bench, resolution);
            const double total = static_cast<double>(result.mask.size());
            std::printf("problem: %s\nresolution: %d\nfeasible_count: %d\nfeasible_fraction: %.6f\n",
                        oracle_problem.c_str(), resolution, result.feasible_count,
                        result.feasible_count / total);
            if (result.best_value) {
                std::printf("best_feasible: %.6f\nbest_point:", *result.best_value);
                for (Eigen::Index j = 0; j < result.best_point.size(); ++j) {
                    std::printf(" %.6f", result.best_point[j]);
                }
                std::printf("\n");
            } else {
                std::printf("best_feasible: -\n");
            }
            return 0;
        }
        if (*theorem) {
            const auto bench = tracebo::find_benchmark(theorem_problem);
            if (!bench) {
                std::fprintf(stderr, "unknown benchmark '%s'\n", theorem_problem.c_str());
                return 2;
            }
            auto grid = tracebo::regular_grid(bench->spec.space, grid_res);
            for (auto& x : tracebo::boundary_points(*bench, boundary)) {
                grid.push_back(std::move(x));
            }
            const bool ok = tracebo::theorem1_check(*bench, grid);
            std::printf("theorem1 %s on %s (%dx%d grid + %d boundary points)\n",
                        ok ? "PASS" : "FAIL", theorem_problem.c_str(), grid_res, grid_res, boundary);
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
