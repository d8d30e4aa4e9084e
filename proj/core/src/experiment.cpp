#include "tracebo/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace tracebo {

namespace {

using nlohmann::json;

std::string format_fixed(double v, int decimals = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

json vector_to_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::unique_ptr<Evaluator> ResolvedProblem::make_evaluator() const {
    if (builtin) return std::make_unique<BenchmarkEvaluator>(*builtin);
    return std::make_unique<ExternalEvaluator>(*descriptor);
}

ResolvedProblem resolve_problem(const std::string& problem) {
    ResolvedProblem out;
    if (auto bench = find_benchmark(problem)) {
        out.spec = bench->spec;
        out.builtin = std::make_shared<BenchmarkProblem>(std::move(*bench));
        return out;
    }
    if (std::filesystem::exists(problem)) {
        auto desc = parse_evaluator_config(problem);
        if (desc.mode == EvaluatorDescriptor::Mode::builtin) {
            auto bench = find_benchmark(desc.name);
            if (!bench) {
                throw std::invalid_argument("unknown builtin benchmark '" + desc.name + "'");
            }
            out.spec = bench->spec;
            out.builtin = std::make_shared<BenchmarkProblem>(std::move(*bench));
            return out;
        }
        out.spec = problem_from_descriptor(desc);
        out.descriptor = std::make_shared<EvaluatorDescriptor>(std::move(desc));
        return out;
    }
    throw std::invalid_argument("unknown problem '" + problem +
                                "': not a registered benchmark or a readable config file");
}

ExperimentResult run_experiment_collect(const ExperimentConfig& cfg) {
    if (cfg.num_runs < 1) throw std::invalid_argument("experiment: num_runs must be >= 1");
    if (cfg.algorithms.empty()) throw std::invalid_argument("experiment: no algorithms given");
    const ResolvedProblem problem = resolve_problem(cfg.problem);

    struct Job {
        Algorithm algorithm;
        int run_index;
    };
    std::vector<Job> jobs;
    for (Algorithm a : cfg.algorithms) {
        for (int k = 0; k < cfg.num_runs; ++k) jobs.push_back({a, k});
    }

    ExperimentResult result;
    for (Algorithm a : cfg.algorithms) {
        result.runs[a].resize(cfg.num_runs);
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            EngineConfig ec;
            ec.initial_samples = cfg.init;
            ec.total_budget = cfg.budget;
            ec.algorithm = job.algorithm;
            ec.seed = cfg.base_seed + static_cast<std::uint64_t>(job.run_index);
            ec.inner = cfg.inner;
            ec.acq = cfg.acq;
            ec.fit = cfg.fit;
            try {
                auto evaluator = problem.make_evaluator();
                result.runs[job.algorithm][job.run_index] =
                    run_algorithm(problem.spec, ec, *evaluator);
            } catch (const std::exception& e) {
                // Configuration/spawn failures surface as aborted records.
                RunRecord rec;
                rec.problem = problem.spec.name;
                rec.sense = problem.spec.objective_sense;
                rec.algorithm = job.algorithm;
                rec.seed = ec.seed;
                rec.aborted = true;
                rec.abort_reason = e.what();
                result.runs[job.algorithm][job.run_index] = std::move(rec);
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };

    int n_workers = cfg.workers > 0 ? cfg.workers
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min<int>(n_workers, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (Algorithm a : cfg.algorithms) {
        for (const auto& rec : result.runs[a]) {
            if (rec.aborted) ++result.aborted_runs;
        }
        result.summaries[a] = summarize_runs(result.runs[a]);
    }
    return result;
}

int run_experiment(const ExperimentConfig& cfg) {
    const ExperimentResult result = run_experiment_collect(cfg);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    for (Algorithm a : cfg.algorithms) {
        for (const auto& rec : result.runs.at(a)) {
            std::ofstream out(fs::path(cfg.output_dir) / run_csv_filename(a, rec.seed));
            write_run_csv(out, rec);
        }
        std::ofstream summary(fs::path(cfg.output_dir) / ("summary_" + to_string(a) + ".json"));
        summary << summary_to_json(result.summaries.at(a)) << "\n";
    }

    std::vector<std::pair<Algorithm, Summary>> rows;
    for (Algorithm a : cfg.algorithms) rows.emplace_back(a, result.summaries.at(a));
    const std::string table = comparison_table(rows);
    {
        std::ofstream out(fs::path(cfg.output_dir) / "comparison.txt");
        out << table;
    }
    std::fputs(table.c_str(), stdout);

    {
        std::ofstream out(fs::path(cfg.output_dir) / "convergence.csv");
        emit_convergence(out, result.runs);
    }

    if (result.aborted_runs > 0) {
        std::fprintf(stderr, "%d run(s) aborted; see per-run files\n", result.aborted_runs);
        return 1;
    }
    return 0;
}

std::string run_csv_filename(Algorithm a, std::uint64_t seed) {
    return "run_" + to_string(a) + "_seed" + std::to_string(seed) + ".csv";
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
    const int d = record.iterations.empty() ? 0 : static_cast<int>(record.iterations.front().x.size());
    const int c = record.iterations.empty() ? 0 : static_cast<int>(record.iterations.front().c.size());
    out << "iter";
    for (int j = 1; j <= d; ++j) out << ",x_" << j;
    out << ",f";
    for (int j = 1; j <= c; ++j) out << ",c_" << j;
    out << ",feasible,best_feasible\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : record.iterations) {
        out << row.index;
        for (int j = 0; j < d; ++j) out << ',' << num(row.x[j]);
        out << ',' << num(row.f);
        for (int j = 0; j < c; ++j) out << ',' << num(row.c[j]);
        out << ',' << (row.feasible ? 1 : 0) << ','
            << (row.best_feasible ? num(*row.best_feasible) : "nan") << "\n";
    }
}

std::string run_record_to_json(const RunRecord& record) {
    json j;
    j["problem"] = record.problem;
    j["sense"] = record.sense == Sense::maximize ? "maximize" : "minimize";
    j["algorithm"] = to_string(record.algorithm);
    j["seed"] = record.seed;
    j["cv_percent"] = record.cv_percent;
    j["cv_defined"] = record.cv_defined;
    j["wall_time_s"] = record.wall_time_s;
    j["aborted"] = record.aborted;
    j["abort_reason"] = record.abort_reason;
    if (record.best) {
        j["best"] = *record.best;
    } else {
        j["best"] = nullptr;
    }
    j["iterations"] = json::array();
    for (const auto& row : record.iterations) {
        json r;
        r["index"] = row.index;
        r["x"] = vector_to_json(row.x);
        r["f"] = row.f;
        r["c"] = vector_to_json(row.c);
        r["feasible"] = row.feasible;
        if (row.best_feasible) {
            r["best_feasible"] = *row.best_feasible;
        } else {
            r["best_feasible"] = nullptr;
        }
        j["iterations"].push_back(std::move(r));
    }
    j["dataset"] = json::array();
    for (const auto& e : record.final_dataset.records) {
        json r;
        r["x"] = vector_to_json(e.x);
        r["f"] = e.f;
        r["c"] = vector_to_json(e.c);
        r["tag"] = e.tag == EvalTag::initial ? "initial" : "selected";
        j["dataset"].push_back(std::move(r));
    }
    return j.dump();
}

RunRecord run_record_from_json(const std::string& text) {
    const json j = json::parse(text);
    RunRecord record;
    record.problem = j.at("problem").get<std::string>();
    record.sense = j.at("sense").get<std::string>() == "maximize" ? Sense::maximize : Sense::minimize;
    const auto algo = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (!algo) throw std::invalid_argument("run record: unknown algorithm");
    record.algorithm = *algo;
    record.seed = j.at("seed").get<std::uint64_t>();
    record.cv_percent = j.at("cv_percent").get<double>();
    record.cv_defined = j.at("cv_defined").get<bool>();
    record.wall_time_s = j.at("wall_time_s").get<double>();
    record.aborted = j.at("aborted").get<bool>();
    record.abort_reason = j.at("abort_reason").get<std::string>();
    if (!j.at("best").is_null()) record.best = j.at("best").get<double>();
    for (const auto& r : j.at("iterations")) {
        IterationRow row;
        row.index = r.at("index").get<int>();
        row.x = vector_from_json(r.at("x"));
        row.f = r.at("f").get<double>();
        row.c = vector_from_json(r.at("c"));
        row.feasible = r.at("feasible").get<bool>();
        if (!r.at("best_feasible").is_null()) row.best_feasible = r.at("best_feasible").get<double>();
        record.iterations.push_back(std::move(row));
    }
    for (const auto& r : j.at("dataset")) {
        Evaluation e;
        e.x = vector_from_json(r.at("x"));
        e.f = r.at("f").get<double>();
        e.c = vector_from_json(r.at("c"));
        e.tag = r.at("tag").get<std::string>() == "initial" ? EvalTag::initial : EvalTag::selected;
        record.final_dataset.append(std::move(e));
    }
    return record;
}

std::string summary_to_json(const Summary& s) {
    json j;
    auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) {
            j[key] = *v;
        } else {
            j[key] = nullptr;
        }
    };
    put("best", s.best);
    put("worst", s.worst);
    put("mean", s.mean);
    put("std", s.stddev);
    j["cv_percent"] = s.cv_percent;
    j["feasible_run_count"] = s.feasible_run_count;
    return j.dump(2);
}

std::string comparison_table(const std::vector<std::pair<Algorithm, Summary>>& rows) {
    std::ostringstream out;
    auto cell = [](const std::optional<double>& v) {
        return v ? format_fixed(*v) : std::string("-");
    };
    out << "Algorithm | Best | Worst | Mean | Std | CV (%)\n";
    for (const auto& [algo, s] : rows) {
        out << to_string(algo) << " | " << cell(s.best) << " | " << cell(s.worst) << " | "
            << cell(s.mean) << " | " << cell(s.stddev) << " | " << format_fixed(s.cv_percent, 1)
            << "\n";
    }
    return out.str();
}

void emit_convergence(std::ostream& out,
                      const std::map<Algorithm, std::vector<RunRecord>>& runs) {
    out << "algorithm,iter,mean_best_feasible,feasible_run_count\n";
    for (const auto& [algo, records] : runs) {
        if (records.empty()) continue;
        std::size_t max_len = 0;
        for (const auto& r : records) max_len = std::max(max_len, r.iterations.size());
        for (std::size_t t = 0; t < max_len; ++t) {
            double sum = 0.0;
            int count = 0;
            for (const auto& r : records) {
                if (t >= r.iterations.size()) continue;
                const auto& incumbent = r.iterations[t].best_feasible;
                if (!incumbent) continue;
                sum += *incumbent;
                ++count;
            }
            out << to_string(algo) << ',' << (t + 1) << ',';
            if (count > 0) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", sum / count);
                out << buf;
            } else {
                out << "nan";
            }
            out << ',' << count << "\n";
        }
    }
}

}  // namespace tracebo
