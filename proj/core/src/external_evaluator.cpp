#include "tracebo/external_evaluator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tracebo {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<double> parse_number_list(const std::string& value, const std::string& key) {
    std::string body = trim(value);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
        throw std::invalid_argument("evaluator config: " + key + " must be a [a, b, ...] list");
    }
    body = body.substr(1, body.size() - 2);
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) {
            throw std::invalid_argument("evaluator config: bad number in " + key + ": '" + item + "'");
        }
    }
    return out;
}

std::string unquote(const std::string& value, const std::string& key) {
    std::string v = trim(value);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        return v.substr(1, v.size() - 2);
    }
    if (!v.empty() && v.front() != '"') return v;
    throw std::invalid_argument("evaluator config: unterminated string for " + key);
}

std::vector<std::string> split_command(const std::string& cmd) {
    std::vector<std::string> argv;
    std::stringstream ss(cmd);
    std::string tok;
    while (ss >> tok) argv.push_back(tok);
    return argv;
}

}  // namespace

EvaluatorDescriptor parse_evaluator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("evaluator config: cannot open " + path);

    EvaluatorDescriptor desc;
    std::vector<double> lower, upper;
    bool have_dim = false, have_lower = false, have_upper = false, have_constraints = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("evaluator config: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "mode") {
            const std::string m = unquote(value, key);
            if (m == "builtin") {
                desc.mode = EvaluatorDescriptor::Mode::builtin;
            } else if (m == "external") {
                desc.mode = EvaluatorDescriptor::Mode::external;
            } else {
                throw std::invalid_argument("evaluator config: unknown mode '" + m + "'");
            }
        } else if (key == "command") {
            desc.command = split_command(unquote(value, key));
        } else if (key == "name") {
            desc.name = unquote(value, key);
        } else if (key == "dimension") {
            desc.dimension = std::stoi(value);
            have_dim = true;
        } else if (key == "constraints") {
            desc.num_constraints = std::stoi(value);
            have_constraints = true;
        } else if (key == "sense") {
            const std::string s = unquote(value, key);
            if (s == "min" || s == "minimize") {
                desc.objective_sense = Sense::minimize;
            } else if (s == "max" || s == "maximize") {
                desc.objective_sense = Sense::maximize;
            } else {
                throw std::invalid_argument("evaluator config: unknown sense '" + s + "'");
            }
        } else if (key == "timeout_s") {
            desc.timeout_s = std::stod(value);
        } else if (key == "lower") {
            lower = parse_number_list(value, key);
            have_lower = true;
        } else if (key == "upper") {
            upper = parse_number_list(value, key);
            have_upper = true;
        } else {
            throw std::invalid_argument("evaluator config: unknown key '" + key + "'");
        }
    }

    if (desc.mode == EvaluatorDescriptor::Mode::external) {
        if (desc.command.empty()) throw std::invalid_argument("evaluator config: external mode requires command");
        if (!have_dim || !have_lower || !have_upper || !have_constraints) {
            throw std::invalid_argument(
                "evaluator config: external mode requires explicit dimension, lower, upper, constraints");
        }
        if (static_cast<int>(lower.size()) != desc.dimension ||
            static_cast<int>(upper.size()) != desc.dimension) {
            throw std::invalid_argument("evaluator config: bounds length must equal dimension");
        }
        desc.lower = Eigen::Map<const Vector>(lower.data(), desc.dimension);
        desc.upper = Eigen::Map<const Vector>(upper.data(), desc.dimension);
        if (desc.name.empty()) desc.name = "external";
    } else if (desc.name.empty()) {
        throw std::invalid_argument("evaluator config: builtin mode requires name");
    }
    return desc;
}

ProblemSpec problem_from_descriptor(const EvaluatorDescriptor& desc) {
    if (desc.mode != EvaluatorDescriptor::Mode::external) {
        throw std::invalid_argument("problem_from_descriptor: builtin descriptors resolve via the registry");
    }
    return ProblemSpec{SearchSpace(desc.lower, desc.upper), desc.num_constraints,
                       desc.objective_sense, desc.name};
}

ExternalEvaluator::ExternalEvaluator(EvaluatorDescriptor desc) : desc_(std::move(desc)) {
    if (desc_.command.empty()) {
        throw ProtocolError(ProtocolError::Kind::spawn_failure, "external evaluator: empty command");
    }
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw ProtocolError(ProtocolError::Kind::spawn_failure, "external evaluator: pipe() failed");
    }
    const pid_t pid = fork();
    if (pid < 0) {
        throw ProtocolError(ProtocolError::Kind::spawn_failure, "external evaluator: fork() failed");
    }
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> argv;
        for (auto& a : desc_.command) argv.push_back(a.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    child_pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
}

ExternalEvaluator::~ExternalEvaluator() { shutdown(); }

void ExternalEvaluator::shutdown() {
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (child_pid_ > 0) {
        kill(child_pid_, SIGKILL);
        waitpid(child_pid_, nullptr, 0);
        child_pid_ = -1;
    }
}

std::string ExternalEvaluator::read_line_with_timeout() {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(desc_.timeout_s);
    while (true) {
        const std::size_t nl = read_buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = read_buffer_.substr(0, nl);
            read_buffer_.erase(0, nl + 1);
            return line;
        }
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            shutdown();
            throw ProtocolError(ProtocolError::Kind::timeout,
                                "external evaluator: no response within " +
                                    std::to_string(desc_.timeout_s) + " s, process killed");
        }
        struct pollfd pfd{from_child_, POLLIN, 0};
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        const int pr = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 1000)));
        if (pr < 0) {
            shutdown();
            throw ProtocolError(ProtocolError::Kind::premature_exit,
                                "external evaluator: poll() failed");
        }
        if (pr == 0) continue;
        char buf[4096];
        const ssize_t r = read(from_child_, buf, sizeof(buf));
        if (r < 0) {
            shutdown();
            throw ProtocolError(ProtocolError::Kind::premature_exit,
                                "external evaluator: read() failed");
        }
        if (r == 0) {
            shutdown();
            throw ProtocolError(ProtocolError::Kind::premature_exit,
                                "external evaluator: process closed its output before responding");
        }
        read_buffer_.append(buf, static_cast<std::size_t>(r));
    }
}

std::pair<double, Vector> ExternalEvaluator::evaluate(const Vector& raw_x) {
    if (child_pid_ < 0) {
        throw ProtocolError(ProtocolError::Kind::premature_exit,
                            "external evaluator: process is not running");
    }
    const long id = next_id_++;
    json request;
    request["id"] = id;
    request["x"] = std::vector<double>(raw_x.data(), raw_x.data() + raw_x.size());
    std::string line = request.dump();
    line.push_back('\n');
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t w = write(to_child_, line.data() + written, line.size() - written);
        if (w <= 0) {
            shutdown();
            throw ProtocolError(ProtocolError::Kind::premature_exit,
                                "external evaluator: process closed its input (write failed)");
        }
        written += static_cast<std::size_t>(w);
    }

    const std::string response = read_line_with_timeout();
    json parsed;
    try {
        parsed = json::parse(response);
    } catch (const json::exception&) {
        shutdown();
        throw ProtocolError(ProtocolError::Kind::malformed_response,
                            "external evaluator: malformed response line: '" + response + "'");
    }
    if (!parsed.is_object() || !parsed.contains("id") || !parsed.contains("f") ||
        !parsed.contains("c") || !parsed["f"].is_number() || !parsed["c"].is_array() ||
        !parsed["id"].is_number_integer()) {
        shutdown();
        throw ProtocolError(ProtocolError::Kind::malformed_response,
                            "external evaluator: response missing numeric id/f or array c: '" +
                                response + "'");
    }
    if (parsed["id"].get<long>() != id) {
        shutdown();
        throw ProtocolError(ProtocolError::Kind::id_mismatch,
                            "external evaluator: response id " +
                                std::to_string(parsed["id"].get<long>()) + " does not match request id " +
                                std::to_string(id));
    }
    const auto& c_json = parsed["c"];
    if (static_cast<int>(c_json.size()) != desc_.num_constraints) {
        shutdown();
        throw ProtocolError(ProtocolError::Kind::wrong_arity,
                            "external evaluator: expected " + std::to_string(desc_.num_constraints) +
                                " constraint values, received " + std::to_string(c_json.size()));
    }
    Vector c(desc_.num_constraints);
    for (int i = 0; i < desc_.num_constraints; ++i) {
        if (!c_json[i].is_number()) {
            shutdown();
            throw ProtocolError(ProtocolError::Kind::malformed_response,
                                "external evaluator: non-numeric constraint entry in '" + response + "'");
        }
        c[i] = c_json[i].get<double>();
    }
    return {parsed["f"].get<double>(), c};
}

}  // namespace tracebo
