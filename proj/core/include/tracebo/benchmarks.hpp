#pragma once

#include "tracebo/engine.hpp"
#include "tracebo/problem.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tracebo {

struct ReferenceProtocol {
    int budget = 0;  // S_tot
    int init = 0;    // S_in
};

/// Closed-form constrained benchmark: deterministic objective + constraints
/// on a box domain, with the reference evaluation protocol.
struct BenchmarkProblem {
    ProblemSpec spec;
    std::function<std::pair<double, Vector>(const Vector&)> evaluate;
    ReferenceProtocol protocol;
};

/// f = cos(2 x1) cos(x2) + sin(x1), minimized, subject to
/// cos(x1) cos(x2) - sin(x1) sin(x2) - 0.5 <= 0 on [0, 6]^2.
std::pair<double, Vector> tf1(const Vector& x);

/// f = (x1 - 1)^2 + (x2 - 0.5)^2, maximized, three constraints on [0, 1]^2.
std::pair<double, Vector> tf2(const Vector& x);

/// f = (x1 - 10)^2 + (x2 - 15)^2, maximized, Branin-form constraint on
/// [-5, 10] x [0, 15]. The cosine coefficient defaults to the canonical
/// 10 (1 - 1/(8 pi)); `literal_coefficient` switches to 10 (1 - 8/pi).
std::pair<double, Vector> branin_c(const Vector& x, bool literal_coefficient = false);

BenchmarkProblem make_tf1();
BenchmarkProblem make_tf2();
BenchmarkProblem make_branin(bool literal_coefficient = false);
/// Unconstrained sphere on [-1, 1]^d (pso baseline checks).
BenchmarkProblem make_sphere(int dimension);
/// Synthetic linear-constraint problem: maximize x1 + 0.5 x2 subject to
/// x1 - 0.5 <= 0 on [0, 1]^2; the boundary is exactly representable.
BenchmarkProblem make_linear_boundary();

/// Registry for the CLI: "tf1", "tf2", "branin", "branin-literal",
/// "sphere2", "linear".
std::optional<BenchmarkProblem> find_benchmark(const std::string& name);
std::vector<std::string> benchmark_names();

class BenchmarkEvaluator : public Evaluator {
public:
    explicit BenchmarkEvaluator(BenchmarkProblem problem) : problem_(std::move(problem)) {}
    std::pair<double, Vector> evaluate(const Vector& raw_x) override {
        return problem_.evaluate(raw_x);
    }

private:
    BenchmarkProblem problem_;
};

struct GridOracleResult {
    int resolution = 0;
    std::vector<std::uint8_t> mask;  // row-major feasibility over the grid
    int feasible_count = 0;
    std::optional<double> best_value;  // constrained optimum estimate, native sense
    Vector best_point;
};

/// Exhaustive regular-grid evaluation; 2-D problems only.
GridOracleResult feasible_grid_oracle(const BenchmarkProblem& p, int resolution);

/// Regular resolution x resolution grid over the problem's box (d = 2).
std::vector<Vector> regular_grid(const SearchSpace& space, int resolution);

/// Points bisected onto the feasibility boundary (max_i c_i = 0) from the
/// most interior feasible point, kept on the feasible side to the last ulp.
std::vector<Vector> boundary_points(const BenchmarkProblem& p, int count);

/// Executable Theorem-1 check with exact constraints in place of GP means
/// (alpha = 0): (a) every feasible grid point is non-dominated w.r.t.
/// F1 = [max_i c_i, min_i |c_i|] among all grid points, and (b) every
/// infeasible grid point is dominated by some feasible one. The grid must
/// contain a boundary point (min_i |c_i| <= 1e-9 while feasible).
bool theorem1_check(const BenchmarkProblem& p, const std::vector<Vector>& grid);

}  // namespace tracebo
