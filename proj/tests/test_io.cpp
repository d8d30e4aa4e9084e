#include "tracebo/experiment.hpp"

#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tracebo;

namespace {

#ifndef MOCK_EVALUATOR_PATH
#error "MOCK_EVALUATOR_PATH must point at the built mock evaluator"
#endif

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tracebo_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string write_descriptor(const fs::path& dir, const std::string& extra_args,
                             int constraints = 1, double timeout_s = 30.0) {
    const fs::path file = dir / "evaluator.conf";
    std::ofstream out(file);
    out << "mode = \"external\"\n";
    out << "command = \"" << MOCK_EVALUATOR_PATH << (extra_args.empty() ? "" : " " + extra_args)
        << "\"\n";
    out << "dimension = 2\n";
    out << "lower = [-1.0, -1.0]\n";
    out << "upper = [1.0, 1.0]\n";
    out << "constraints = " << constraints << "\n";
    out << "sense = \"min\"\n";
    out << "timeout_s = " << timeout_s << "\n";
    out << "name = \"mock\"\n";
    return file.string();
}

RunRecord tiny_record() {
    RunRecord r;
    r.problem = "linear";
    r.sense = Sense::maximize;
    r.algorithm = Algorithm::trace;
    r.seed = 9;
    r.cv_percent = 12.5;
    r.cv_defined = true;
    r.wall_time_s = 0.125;
    r.best = 0.75;
    for (int i = 1; i <= 3; ++i) {
        IterationRow row;
        row.index = i;
        row.x = Vector::Constant(2, 0.1 * i);
        row.f = 1.0 / i;
        row.c = Vector::Constant(1, -0.5 * i);
        row.feasible = true;
        row.best_feasible = 1.0;
        r.iterations.push_back(row);
        Evaluation e;
        e.x = row.x;
        e.f = row.f;
        e.c = row.c;
        e.tag = i == 1 ? EvalTag::initial : EvalTag::selected;
        r.final_dataset.append(e);
    }
    return r;
}

}  // namespace

TEST_CASE("run record JSON round trip is field-for-field") {
    const RunRecord original = tiny_record();
    const RunRecord copy = run_record_from_json(run_record_to_json(original));

    CHECK(copy.problem == original.problem);
    CHECK(copy.sense == original.sense);
    CHECK(copy.algorithm == original.algorithm);
    CHECK(copy.seed == original.seed);
    CHECK(copy.cv_percent == original.cv_percent);
    CHECK(copy.cv_defined == original.cv_defined);
    CHECK(copy.wall_time_s == original.wall_time_s);
    CHECK(copy.aborted == original.aborted);
    CHECK(copy.abort_reason == original.abort_reason);
    REQUIRE(copy.best.has_value());
    CHECK(*copy.best == *original.best);
    REQUIRE(copy.iterations.size() == original.iterations.size());
    for (std::size_t i = 0; i < copy.iterations.size(); ++i) {
        CHECK(copy.iterations[i].index == original.iterations[i].index);
        CHECK(copy.iterations[i].x == original.iterations[i].x);
        CHECK(copy.iterations[i].f == original.iterations[i].f);
        CHECK(copy.iterations[i].c == original.iterations[i].c);
        CHECK(copy.iterations[i].feasible == original.iterations[i].feasible);
        CHECK(copy.iterations[i].best_feasible == original.iterations[i].best_feasible);
    }
    REQUIRE(copy.final_dataset.size() == original.final_dataset.size());
    for (std::size_t i = 0; i < copy.final_dataset.size(); ++i) {
        CHECK(copy.final_dataset.records[i].x == original.final_dataset.records[i].x);
        CHECK(copy.final_dataset.records[i].f == original.final_dataset.records[i].f);
        CHECK(copy.final_dataset.records[i].c == original.final_dataset.records[i].c);
        CHECK(copy.final_dataset.records[i].tag == original.final_dataset.records[i].tag);
    }
}

TEST_CASE("run CSV carries the documented header") {
    std::ostringstream out;
    write_run_csv(out, tiny_record());
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,x_1,x_2,f,c_1,feasible,best_feasible");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("comparison table follows the Best/Worst/Mean/Std/CV layout") {
    Summary good;
    good.best = 1.0;
    good.worst = 0.5;
    good.mean = 0.75;
    good.stddev = 0.25;
    good.cv_percent = 12.0;
    good.feasible_run_count = 10;
    Summary empty;
    empty.cv_percent = 100.0;

    const std::string table =
        comparison_table({{Algorithm::trace, good}, {Algorithm::eipf, empty}});
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    CHECK(line == "Algorithm | Best | Worst | Mean | Std | CV (%)");
    std::getline(in, line);
    CHECK(line == "trace | 1.0000 | 0.5000 | 0.7500 | 0.2500 | 12.0");
    std::getline(in, line);
    CHECK(line == "eipf | - | - | - | - | 100.0");
}

TEST_CASE("convergence emission") {
    SUBCASE("single run reproduces its incumbent trace") {
        std::map<Algorithm, std::vector<RunRecord>> runs;
        runs[Algorithm::trace] = {tiny_record()};
        std::ostringstream out;
        emit_convergence(out, runs);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "algorithm,iter,mean_best_feasible,feasible_run_count");
        int rows = 0;
        while (std::getline(in, line)) {
            CHECK(line.substr(0, 6) == "trace,");
            CHECK(line.substr(line.size() - 2) == ",1");
            ++rows;
        }
        CHECK(rows == 3);
    }
    SUBCASE("runs without an incumbent are excluded and counted") {
        RunRecord feasible = tiny_record();
        RunRecord infeasible = tiny_record();
        for (auto& row : infeasible.iterations) row.best_feasible.reset();
        infeasible.best.reset();
        std::map<Algorithm, std::vector<RunRecord>> runs;
        runs[Algorithm::trace] = {feasible, infeasible};
        std::ostringstream out;
        emit_convergence(out, runs);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            CHECK(line.substr(line.size() - 2) == ",1");  // only the feasible run counts
        }
    }
}

TEST_CASE("experiment config validation happens before any run") {
    ExperimentConfig cfg;
    cfg.problem = "no-such-problem";
    CHECK_THROWS_AS(run_experiment_collect(cfg), std::invalid_argument);
    CHECK_THROWS_AS(resolve_problem("also-missing"), std::invalid_argument);
}

TEST_CASE("experiment writes the documented files") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.problem = "linear";
    cfg.algorithms = {Algorithm::trace};
    cfg.budget = 10;
    cfg.init = 5;
    cfg.num_runs = 2;
    cfg.base_seed = 3;
    cfg.output_dir = (dir.path / "out").string();
    cfg.inner.max_iterations = 20;
    cfg.fit.restarts = 2;
    cfg.fit.max_evals_per_restart = 15;
    cfg.workers = 2;

    CHECK(run_experiment(cfg) == 0);
    CHECK(fs::exists(fs::path(cfg.output_dir) / "run_trace_seed3.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "run_trace_seed4.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "summary_trace.json"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "comparison.txt"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "convergence.csv"));

    std::ifstream summary(fs::path(cfg.output_dir) / "summary_trace.json");
    std::stringstream buf;
    buf << summary.rdbuf();
    for (const auto* field :
         {"\"best\"", "\"worst\"", "\"mean\"", "\"std\"", "\"cv_percent\"", "\"feasible_run_count\""}) {
        CHECK(buf.str().find(field) != std::string::npos);
    }
}

TEST_CASE("evaluator descriptor parsing") {
    TempDir dir;
    SUBCASE("valid external descriptor") {
        const auto path = write_descriptor(dir.path, "");
        const auto desc = parse_evaluator_config(path);
        CHECK(desc.mode == EvaluatorDescriptor::Mode::external);
        CHECK(desc.dimension == 2);
        CHECK(desc.num_constraints == 1);
        CHECK(desc.objective_sense == Sense::minimize);
        CHECK(desc.timeout_s == 30.0);
        const auto spec = problem_from_descriptor(desc);
        CHECK(spec.space.dimension() == 2);
    }
    SUBCASE("external mode requires explicit geometry") {
        const fs::path file = dir.path / "bad.conf";
        std::ofstream out(file);
        out << "mode = \"external\"\ncommand = \"/bin/cat\"\n";
        out.close();
        CHECK_THROWS_AS(parse_evaluator_config(file.string()), std::invalid_argument);
    }
    SUBCASE("unknown keys rejected") {
        const fs::path file = dir.path / "bad2.conf";
        std::ofstream out(file);
        out << "flavor = \"spicy\"\n";
        out.close();
        CHECK_THROWS_AS(parse_evaluator_config(file.string()), std::invalid_argument);
    }
}

TEST_CASE("external evaluator round trip with the mock") {
    TempDir dir;
    const auto path = write_descriptor(dir.path, "");
    auto desc = parse_evaluator_config(path);
    ExternalEvaluator eval(desc);
    Vector x(2);
    x << 0.5, -0.25;
    const auto [f, c] = eval.evaluate(x);
    CHECK(f == doctest::Approx(0.3125));
    REQUIRE(c.size() == 1);
    CHECK(c[0] == -1.0);
}

TEST_CASE("external protocol failures carry distinct diagnostics") {
    TempDir dir;
    Vector x(2);
    x << 0.1, 0.2;

    SUBCASE("wrong constraint arity") {
        ExternalEvaluator eval(parse_evaluator_config(write_descriptor(dir.path, "--mode wrong-arity")));
        try {
            eval.evaluate(x);
            FAIL("expected ProtocolError");
        } catch (const ProtocolError& e) {
            CHECK(e.kind() == ProtocolError::Kind::wrong_arity);
            CHECK(std::string(e.what()).find("expected 1") != std::string::npos);
            CHECK(std::string(e.what()).find("received 3") != std::string::npos);
        }
    }
    SUBCASE("malformed response quotes the line") {
        ExternalEvaluator eval(parse_evaluator_config(write_descriptor(dir.path, "--mode malformed")));
        try {
            eval.evaluate(x);
            FAIL("expected ProtocolError");
        } catch (const ProtocolError& e) {
            CHECK(e.kind() == ProtocolError::Kind::malformed_response);
            CHECK(std::string(e.what()).find("not json at all") != std::string::npos);
        }
    }
    SUBCASE("non-numeric objective quotes the line") {
        ExternalEvaluator eval(parse_evaluator_config(write_descriptor(dir.path, "--mode nonnumeric")));
        try {
            eval.evaluate(x);
            FAIL("expected ProtocolError");
        } catch (const ProtocolError& e) {
            CHECK(e.kind() == ProtocolError::Kind::malformed_response);
            CHECK(std::string(e.what()).find("broken") != std::string::npos);
        }
    }
    SUBCASE("id mismatch") {
        ExternalEvaluator eval(parse_evaluator_config(write_descriptor(dir.path, "--mode wrong-id")));
        try {
            eval.evaluate(x);
            FAIL("expected ProtocolError");
        } catch (const ProtocolError& e) {
            CHECK(e.kind() == ProtocolError::Kind::id_mismatch);
        }
    }
    SUBCASE("timeout kills the child") {
        ExternalEvaluator eval(
            parse_evaluator_config(write_descriptor(dir.path, "--mode hang", 1, 1.5)));
        try {
            eval.evaluate(x);
            FAIL("expected ProtocolError");
        } catch (const ProtocolError& e) {
            CHECK(e.kind() == ProtocolError::Kind::timeout);
        }
    }
    SUBCASE("premature exit") {
        ExternalEvaluator eval(parse_evaluator_config(write_descriptor(dir.path, "--mode exit")));
        try {
            eval.evaluate(x);
            FAIL("expected ProtocolError");
        } catch (const ProtocolError& e) {
            CHECK(e.kind() == ProtocolError::Kind::premature_exit);
        }
    }
}

TEST_CASE("run aborts preserve partial records on protocol failure") {
    TempDir dir;
    // Correct for 6 requests, then malformed.
    const auto path = write_descriptor(dir.path, "--mode malformed --after 6");
    ExperimentConfig cfg;
    cfg.problem = path;
    cfg.algorithms = {Algorithm::trace};
    cfg.budget = 12;
    cfg.init = 4;
    cfg.num_runs = 1;
    cfg.output_dir = (dir.path / "out").string();
    cfg.inner.max_iterations = 15;
    cfg.fit.restarts = 2;
    cfg.fit.max_evals_per_restart = 10;

    const auto result = run_experiment_collect(cfg);
    CHECK(result.aborted_runs == 1);
    const auto& rec = result.runs.at(Algorithm::trace).front();
    CHECK(rec.aborted);
    CHECK(rec.final_dataset.size() == 6);
    CHECK(rec.abort_reason.find("malformed") != std::string::npos);
}
