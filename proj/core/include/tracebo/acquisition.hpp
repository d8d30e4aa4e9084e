#pragma once

#include "tracebo/gp.hpp"

#include <memory>
#include <vector>

namespace tracebo {

struct AcquisitionConfig {
    double beta = 0.3;     // LCB exploration weight
    double epsilon = 0.001;  // PI/EI improvement margin
    double alpha = 0.2;    // tier-1 constraint exploration weight
    double tau = 0.0;      // incumbent objective value (internal sense)
};

/// Objective surrogate plus one surrogate per constraint. Constraint models
/// predict raw constraint values (feasible iff <= 0).
struct SurrogateBundle {
    std::shared_ptr<const Predictor> objective_gp;
    std::vector<std::shared_ptr<const Predictor>> constraint_gps;

    int num_constraints() const { return static_cast<int>(constraint_gps.size()); }
};

double normal_cdf(double z);
double normal_pdf(double z);
/// log(Phi(z)), stable in the deep lower tail where Phi underflows.
double log_normal_cdf(double z);

/// LCB(x) = mu - beta * sigma
double lcb(double mu, double sigma, const AcquisitionConfig& cfg);

/// PI(x) = Phi((tau - epsilon - mu) / sigma), with the sigma -> 0 limit.
double pi(double mu, double sigma, const AcquisitionConfig& cfg);

/// EI(x) = sigma * (lambda Phi(lambda) + phi(lambda)), with the sigma -> 0 limit.
double ei(double mu, double sigma, const AcquisitionConfig& cfg);

/// max_i (mu_ci(x) - alpha * sigma_ci(x)); requires C >= 1.
double f_cv1(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg);

/// min_i |mu_ci(x) - alpha * sigma_ci(x)|; requires C >= 1.
double f_cv2(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg);

/// prod_i Phi(-mu_ci(x) / sigma_ci(x)), raw (un-adjusted) means.
double prob_feasible(const SurrogateBundle& b, const Vector& x);

// Log-scale counterparts. log(PI), log(EI) and log(PF) are strictly
// increasing images of PI, EI and PF, so any Pareto ranking or argmax over
// them is identical to the linear-scale one; they differ only where the
// linear forms underflow to 0 and merge genuinely distinct values into ties.
double log_pi(double mu, double sigma, const AcquisitionConfig& cfg);
double log_ei(double mu, double sigma, const AcquisitionConfig& cfg);
double log_prob_feasible(const SurrogateBundle& b, const Vector& x);

/// F1 = [f_cv1, f_cv2], both minimized downstream.
Vector tier1_vector(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg);

/// F2 = [LCB, -PI, -EI] from the objective surrogate at x.
Vector tier2_vector(const SurrogateBundle& b, const Vector& x, const AcquisitionConfig& cfg);

}  // namespace tracebo
