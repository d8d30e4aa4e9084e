#pragma once

#include "tracebo/engine.hpp"
#include "tracebo/problem.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace tracebo {

/// Describes an evaluation backend: a builtin benchmark by name, or an
/// external subprocess speaking the line protocol.
struct EvaluatorDescriptor {
    enum class Mode { builtin, external };
    Mode mode = Mode::builtin;
    std::string name;                  // builtin benchmark / report label
    std::vector<std::string> command;  // external: argv
    int dimension = 0;
    Vector lower;
    Vector upper;
    int num_constraints = 0;
    Sense objective_sense = Sense::minimize;
    double timeout_s = 300.0;
};

/// Parse a key = value descriptor file. Recognized keys: mode, command,
/// name, dimension, lower, upper, constraints, sense, timeout_s.
EvaluatorDescriptor parse_evaluator_config(const std::string& path);

ProblemSpec problem_from_descriptor(const EvaluatorDescriptor& desc);

class ProtocolError : public EvaluatorError {
public:
    enum class Kind {
        spawn_failure,
        malformed_response,
        id_mismatch,
        wrong_arity,
        timeout,
        premature_exit,
    };

    ProtocolError(Kind kind, const std::string& message)
        : EvaluatorError(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Owns an evaluator subprocess. Requests are newline-delimited JSON objects
/// {"id": k, "x": [raw values]}; responses {"id": k, "f": real, "c": [...]}.
/// One request in flight at a time; raw coordinates cross the boundary.
class ExternalEvaluator : public Evaluator {
public:
    explicit ExternalEvaluator(EvaluatorDescriptor desc);
    ~ExternalEvaluator() override;

    ExternalEvaluator(const ExternalEvaluator&) = delete;
    ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

    std::pair<double, Vector> evaluate(const Vector& raw_x) override;

private:
    std::string read_line_with_timeout();
    void shutdown();

    EvaluatorDescriptor desc_;
    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string read_buffer_;
    long next_id_ = 0;
};

}  // namespace tracebo
