#include "tracebo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tracebo {

namespace {

void require_domain(const SearchSpace& space, const Vector& x, const char* name) {
    if (!space.contains(x)) {
        throw std::invalid_argument(std::string(name) + ": point outside domain");
    }
}

Vector make2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

std::pair<double, Vector> tf1(const Vector& x) {
    static const SearchSpace domain(make2(0.0, 0.0), make2(6.0, 6.0));
    require_domain(domain, x, "tf1");
    const double f = std::cos(2.0 * x[0]) * std::cos(x[1]) + std::sin(x[0]);
    Vector c(1);
    c << std::cos(x[0]) * std::cos(x[1]) - std::sin(x[0]) * std::sin(x[1]) - 0.5;
    return {f, c};
}

std::pair<double, Vector> tf2(const Vector& x) {
    static const SearchSpace domain(make2(0.0, 0.0), make2(1.0, 1.0));
    require_domain(domain, x, "tf2");
    const double f = (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 0.5) * (x[1] - 0.5);
    Vector c(3);
    const double x2_7 = std::pow(x[1], 7);
    c << ((x[0] - 3.0) * (x[0] - 3.0) + (x[1] + 2.0) * (x[1] + 2.0)) * std::exp(-x2_7) - 12.0,
        10.0 * x[0] + x[1] - 7.0,
        (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5) - 0.2;
    return {f, c};
}

std::pair<double, Vector> branin_c(const Vector& x, bool literal_coefficient) {
    static const SearchSpace domain(make2(-5.0, 0.0), make2(10.0, 15.0));
    require_domain(domain, x, "branin_c");
    const double f = (x[0] - 10.0) * (x[0] - 10.0) + (x[1] - 15.0) * (x[1] - 15.0);
    const double quad = x[1] - 5.1 / (4.0 * M_PI * M_PI) * x[0] * x[0] + 5.0 / M_PI * x[0] - 6.0;
    const double coeff = literal_coefficient ? 10.0 * (1.0 - 8.0 / M_PI)
                                             : 10.0 * (1.0 - 1.0 / (8.0 * M_PI));
    Vector c(1);
    c << quad * quad + coeff * std::cos(x[0]) + 5.0;
    return {f, c};
}

BenchmarkProblem make_tf1() {
    BenchmarkProblem p;
    p.spec = ProblemSpec{SearchSpace(make2(0.0, 0.0), make2(6.0, 6.0)), 1, Sense::minimize, "tf1"};
    p.evaluate = [](const Vector& x) { return tf1(x); };
    p.protocol = {50, 10};
    return p;
}

BenchmarkProblem make_tf2() {
    BenchmarkProblem p;
    p.spec = ProblemSpec{SearchSpace(make2(0.0, 0.0), make2(1.0, 1.0)), 3, Sense::maximize, "tf2"};
    p.evaluate = [](const Vector& x) { return tf2(x); };
    p.protocol = {160, 30};
    return p;
}

BenchmarkProblem make_branin(bool literal_coefficient) {
    BenchmarkProblem p;
    p.spec = ProblemSpec{SearchSpace(make2(-5.0, 0.0), make2(10.0, 15.0)), 1, Sense::maximize,
                         literal_coefficient ? "branin-literal" : "branin"};
    p.evaluate = [literal_coefficient](const Vector& x) { return branin_c(x, literal_coefficient); };
    p.protocol = {200, 30};
    return p;
}

BenchmarkProblem make_sphere(int dimension) {
    if (dimension < 1) throw std::invalid_argument("make_sphere: dimension must be >= 1");
    BenchmarkProblem p;
    p.spec = ProblemSpec{SearchSpace(Vector::Constant(dimension, -1.0), Vector::Constant(dimension, 1.0)),
                         0, Sense::minimize, "sphere" + std::to_string(dimension)};
    p.evaluate = [](const Vector& x) { return std::make_pair(x.squaredNorm(), Vector(0)); };
    p.protocol = {300, 20};
    return p;
}

BenchmarkProblem make_linear_boundary() {
    BenchmarkProblem p;
    p.spec = ProblemSpec{SearchSpace(make2(0.0, 0.0), make2(1.0, 1.0)), 1, Sense::maximize, "linear"};
    p.evaluate = [](const Vector& x) {
        Vector c(1);
        c << x[0] - 0.5;
        return std::make_pair(x[0] + 0.5 * x[1], c);
    };
    p.protocol = {30, 8};
    return p;
}

std::optional<BenchmarkProblem> find_benchmark(const std::string& name) {
    if (name == "tf1") return make_tf1();
    if (name == "tf2") return make_tf2();
    if (name == "branin") return make_branin(false);
    if (name == "branin-literal") return make_branin(true);
    if (name == "sphere2") return make_sphere(2);
    if (name == "linear") return make_linear_boundary();
    return std::nullopt;
}

std::vector<std::string> benchmark_names() {
    return {"tf1", "tf2", "branin", "branin-literal", "sphere2", "linear"};
}

std::vector<Vector> regular_grid(const SearchSpace& space, int resolution) {
    if (space.dimension() != 2) {
        throw std::invalid_argument("regular_grid: only 2-D domains supported");
    }
    if (resolution < 2) throw std::invalid_argument("regular_grid: resolution must be >= 2");
    std::vector<Vector> grid;
    grid.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
        const double u = static_cast<double>(i) / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double v = static_cast<double>(j) / (resolution - 1);
            grid.push_back(space.denormalize(make2(u, v)));
        }
    }
    return grid;
}

GridOracleResult feasible_grid_oracle(const BenchmarkProblem& p, int resolution) {
    const auto grid = regular_grid(p.spec.space, resolution);
    GridOracleResult out;
    out.resolution = resolution;
    out.mask.resize(grid.size());
    double best_internal = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto [f, c] = p.evaluate(grid[k]);
        const bool feas = (c.array() <= 0.0).all();
        out.mask[k] = feas ? 1 : 0;
        if (!feas) continue;
        ++out.feasible_count;
        const double v = internal_objective(f, p.spec.objective_sense);
        if (v < best_internal) {
            best_internal = v;
            out.best_point = grid[k];
        }
    }
    if (out.feasible_count > 0) {
        out.best_value = native_objective(best_internal, p.spec.objective_sense);
    }
    return out;
}

std::vector<Vector> boundary_points(const BenchmarkProblem& p, int count) {
    if (p.spec.space.dimension() != 2) {
        throw std::invalid_argument("boundary_points: only 2-D domains supported");
    }
    if (count < 1) throw std::invalid_argument("boundary_points: count must be >= 1");

    auto worst_constraint = [&](const Vector& x) {
        const auto [f, c] = p.evaluate(x);
        (void)f;
        return c.maxCoeff();
    };

    // Most interior feasible point on a scouting grid anchors the rays.
    const int scout = 201;
    Vector anchor;
    double most_interior = std::numeric_limits<double>::infinity();
    for (const auto& x : regular_grid(p.spec.space, scout)) {
        const double w = worst_constraint(x);
        if (w < most_interior) {
            most_interior = w;
            anchor = x;
        }
    }
    if (most_interior > 0.0) {
        throw std::runtime_error("boundary_points: no feasible point found on scouting grid");
    }

    const Vector lo = p.spec.space.lower();
    const Vector hi = p.spec.space.upper();
    std::vector<Vector> points;
    for (int k = 0; k < count * 4 && static_cast<int>(points.size()) < count; ++k) {
        const double theta = 2.0 * M_PI * k / (count * 4);
        const Vector dir = make2(std::cos(theta), std::sin(theta));

        // Longest step staying inside the box.
        double t_max = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 2; ++j) {
            if (dir[j] > 0) t_max = std::min(t_max, (hi[j] - anchor[j]) / dir[j]);
            if (dir[j] < 0) t_max = std::min(t_max, (lo[j] - anchor[j]) / dir[j]);
        }
        if (!std::isfinite(t_max) || t_max <= 0) continue;

        // March until infeasible, then bisect down to adjacent doubles,
        // keeping the feasible endpoint.
        const int steps = 512;
        double t_feas = 0.0;
        double t_inf = -1.0;
        for (int s = 1; s <= steps; ++s) {
            const double t = t_max * s / steps;
            if (worst_constraint(anchor + t * dir) > 0.0) {
                t_inf = t;
                break;
            }
            t_feas = t;
        }
        if (t_inf < 0) continue;  // ray stays feasible inside the box
        while (true) {
            const double mid = 0.5 * (t_feas + t_inf);
            if (mid <= t_feas || mid >= t_inf) break;
            if (worst_constraint(anchor + mid * dir) > 0.0) {
                t_inf = mid;
            } else {
                t_feas = mid;
            }
        }
        Vector x = anchor + t_feas * dir;
        const auto [f, c] = p.evaluate(x);
        (void)f;
        if ((c.array() <= 0.0).all() && c.cwiseAbs().minCoeff() <= 1e-9) {
            points.push_back(std::move(x));
        }
    }
    if (points.empty()) {
        throw std::runtime_error("boundary_points: bisection produced no boundary point");
    }
    return points;
}

bool theorem1_check(const BenchmarkProblem& p, const std::vector<Vector>& grid) {
    if (grid.empty()) throw std::invalid_argument("theorem1_check: empty grid");
    if (p.spec.num_constraints < 1) {
        throw std::invalid_argument("theorem1_check: problem has no constraints");
    }

    // Tier-1 values with exact constraints in place of GP means, alpha = 0.
    const std::size_t n = grid.size();
    std::vector<double> cv1(n), cv2(n);
    std::vector<bool> feasible(n);
    bool has_boundary = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [f, c] = p.evaluate(grid[i]);
        (void)f;
        cv1[i] = c.maxCoeff();
        cv2[i] = c.cwiseAbs().minCoeff();
        feasible[i] = (c.array() <= 0.0).all();
        if (feasible[i] && cv2[i] <= 1e-9) has_boundary = true;
    }
    if (!has_boundary) {
        throw std::invalid_argument(
            "theorem1_check: grid lacks a feasible boundary point (min_i |c_i| <= 1e-9); "
            "part (b) is not guaranteed without one");
    }

    auto dominates = [&](std::size_t a, std::size_t b) {
        const bool le = cv1[a] <= cv1[b] && cv2[a] <= cv2[b];
        const bool lt = cv1[a] < cv1[b] || cv2[a] < cv2[b];
        return le && lt;
    };

    // (a) no grid point dominates any feasible point.
    for (std::size_t i = 0; i < n; ++i) {
        if (!feasible[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && dominates(j, i)) return false;
        }
    }

    // (b) every infeasible point is dominated by some feasible point.
    // Feasible candidates sorted by cv1 descending puts near-boundary
    // points (the strongest dominators) first.
    std::vector<std::size_t> feas_idx;
    for (std::size_t i = 0; i < n; ++i) {
        if (feasible[i]) feas_idx.push_back(i);
    }
    std::sort(feas_idx.begin(), feas_idx.end(),
              [&](std::size_t a, std::size_t b) { return cv1[a] > cv1[b]; });
    for (std::size_t i = 0; i < n; ++i) {
        if (feasible[i]) continue;
        bool dominated = false;
        for (std::size_t j : feas_idx) {
            if (dominates(j, i)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) return false;
    }
    return true;
}

}  // namespace tracebo
