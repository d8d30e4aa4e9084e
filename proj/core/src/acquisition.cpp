#include "tracebo/acquisition.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tracebo {

namespace {
constexpr double kSigmaFloor = 1e-12;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double log_normal_cdf(double z) {
    if (z >= -8.0) {
        return std::log(normal_cdf(z));
    }
    // Continued-fraction tail: Phi(z) = phi(z)/(-z) (1 - 1/z^2 + 3/z^4 - ...).
    const double z2 = z * z;
    return -0.5 * z2 - 0.5 * std::log(2.0 * M_PI) - std::log(-z)
           + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

double lcb(double mu, double sigma, const AcquisitionConfig& cfg) {
    return mu - cfg.beta * sigma;
}

double pi(double mu, double sigma, const AcquisitionConfig& cfg) {
    const double margin = cfg.tau - cfg.epsilon - mu;
    if (sigma < kSigmaFloor) {
        return margin > 0.0 ? 1.0 : 0.0;
    }
    return normal_cdf(margin / sigma);
}

double ei(double mu, double sigma, const AcquisitionConfig& cfg) {
    const double margin = cfg.tau - cfg.epsilon - mu;
    if (sigma < kSigmaFloor) {
        return margin > 0.0 ? margin : 0.0;
    }
    const double lambda = margin / sigma;
    return sigma * (lambda * normal_cdf(lambda) + normal_pdf(lambda));
}

double log_pi(double mu, double sigma, const AcquisitionConfig& cfg) {
    const double margin = cfg.tau - cfg.epsilon - mu;
    if (sigma < kSigmaFloor) {
        return margin > 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return log_normal_cdf(margin / sigma);
}

double log_ei(double mu, double sigma, const AcquisitionConfig& cfg) {
    const double margin = cfg.tau - cfg.epsilon - mu;
    if (sigma < kSigmaFloor) {
        return margin > 0.0 ? std::log(margin) : -std::numeric_limits<double>::infinity();
    }
    const double lambda = margin / sigma;
    if (lambda >= -8.0) {
        const double value = lambda * normal_cdf(lambda) + normal_pdf(lambda);
        return value > 0.0 ? std::log(sigma) + std::log(value)
                           : -std::numeric_limits<double>::infinity();
    }
    // Tail: lambda Phi + phi = phi(lambda) (1 + lambda Phi/phi)
    //                        ~ phi(lambda) / lambda^2 (1 - 3/lambda^2).
    const double l2 = lambda * lambda;
    return std::log(sigma) - 0.5 * l2 - 0.5 * std::log(2.0 * M_PI) - std::log(l2)
           + std::log1p(-3.0 / l2);
}

double log_prob_feasible(const SurrogateBundle& b, const Vector& x) {
    if (b.constraint_gps.empty()) {
        throw std::invalid_argument("log_prob_feasible: C >= 1 required");
    }
    double sum = 0.0;
    for (const auto& gp : b.constraint_gps) {
        const Prediction p = gp->predict(x);
        if (p.sigma < kSigmaFloor) {
            if (p.mu >= 0.0) return -std::numeric_limits<double>::infinity();
            continue;  // certain satisfaction contributes log(1) = 0
        }
        sum += log_normal_cdf(-p.mu / p.sigma);
    }
    return sum;
}

double f_cv1(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg) {
    if (b.constraint_gps.empty()) {
        throw std::invalid_argument("f_cv1: undefined without constraints (C >= 1 required)");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& gp : b.constraint_gps) {
        const Prediction p = gp->predict(x);
        worst = std::max(worst, p.mu - cfg.alpha * p.sigma);
    }
    return worst;
}

double f_cv2(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg) {
    if (b.constraint_gps.empty()) {
        throw std::invalid_argument("f_cv2: undefined without constraints (C >= 1 required)");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& gp : b.constraint_gps) {
        const Prediction p = gp->predict(x);
        best = std::min(best, std::abs(p.mu - cfg.alpha * p.sigma));
    }
    return best;
}

double prob_feasible(const SurrogateBundle& b, const Vector& x) {
    if (b.constraint_gps.empty()) {
        throw std::invalid_argument("prob_feasible: C >= 1 required");
    }
    double prod = 1.0;
    for (const auto& gp : b.constraint_gps) {
        const Prediction p = gp->predict(x);
        double factor;
        if (p.sigma < kSigmaFloor) {
            factor = p.mu < 0.0 ? 1.0 : 0.0;
        } else {
            factor = normal_cdf(-p.mu / p.sigma);
        }
        prod *= factor;
        if (prod == 0.0) break;
    }
    return prod;
}

Vector tier1_vector(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg) {
    if (b.constraint_gps.empty()) {
        throw std::invalid_argument("tier1_vector: C >= 1 required");
    }
    // Single pass over the constraint surrogates for both components.
    double worst = -std::numeric_limits<double>::infinity();
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& gp : b.constraint_gps) {
        const Prediction p = gp->predict(x);
        const double adjusted = p.mu - cfg.alpha * p.sigma;
        worst = std::max(worst, adjusted);
        nearest = std::min(nearest, std::abs(adjusted));
    }
    Vector out(2);
    out << worst, nearest;
    return out;
}

Vector tier2_vector(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg) {
    const Prediction p = b.objective_gp->predict(x);
    Vector out(3);
    out << lcb(p.mu, p.sigma, cfg), -pi(p.mu, p.sigma, cfg), -ei(p.mu, p.sigma, cfg);
    return out;
}

}  // namespace tracebo
