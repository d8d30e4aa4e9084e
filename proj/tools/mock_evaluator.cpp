// Mock black-box evaluator speaking the line protocol: reads one JSON
// request {"id": k, "x": [..]} per line, answers {"id": k, "f": sum x_j^2,
// "c": [-1]}. Misbehavior modes exercise the harness diagnostics.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

using nlohmann::json;

int main(int argc, char** argv) {
    std::string mode = "ok";
    int constraints = 1;
    int after = 0;  // requests answered correctly before misbehaving
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--mode") == 0 && i + 1 < argc) {
            mode = argv[++i];
        } else if (std::strcmp(argv[i], "--constraints") == 0 && i + 1 < argc) {
            constraints = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--after") == 0 && i + 1 < argc) {
            after = std::atoi(argv[++i]);
        } else {
            std::cerr << "mock_evaluator: unknown argument " << argv[i] << "\n";
            return 2;
        }
    }

    std::string line;
    int handled = 0;
    while (std::getline(std::cin, line)) {
        json request;
        try {
            request = json::parse(line);
        } catch (const json::exception&) {
            std::cerr << "mock_evaluator: unparseable request\n";
            return 2;
        }
        const long id = request.at("id").get<long>();
        const auto x = request.at("x").get<std::vector<double>>();
        double f = 0.0;
        for (double v : x) f += v * v;

        const bool misbehave = handled >= after;
        ++handled;
        if (misbehave && mode == "malformed") {
            std::cout << "not json at all" << std::endl;
            continue;
        }
        if (misbehave && mode == "nonnumeric") {
            std::cout << "{\"id\": " << id << ", \"f\": \"broken\", \"c\": [-1]}" << std::endl;
            continue;
        }
        if (misbehave && mode == "wrong-id") {
            json response{{"id", id + 1000}, {"f", f}, {"c", std::vector<double>(constraints, -1.0)}};
            std::cout << response.dump() << std::endl;
            continue;
        }
        if (misbehave && mode == "wrong-arity") {
            json response{{"id", id}, {"f", f}, {"c", std::vector<double>(constraints + 2, -1.0)}};
            std::cout << response.dump() << std::endl;
            continue;
        }
        if (misbehave && mode == "hang") {
            std::this_thread::sleep_for(std::chrono::hours(1));
            return 0;
        }
        if (misbehave && mode == "exit") {
            return 0;
        }
        json response{{"id", id}, {"f", f}, {"c", std::vector<double>(constraints, -1.0)}};
        std::cout << response.dump() << std::endl;
    }
    return 0;
}
