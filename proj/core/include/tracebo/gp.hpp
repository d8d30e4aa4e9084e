#pragma once

#include "tracebo/problem.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>

namespace tracebo {

struct Prediction {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Posterior mean/stddev provider. Implemented by GpModel and by the
/// synthetic stubs used in tests.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual Prediction predict(const Vector& x) const = 0;
};

/// Squared-exponential (ARD) kernel hyperparameters.
struct KernelParams {
    double signal_variance = 1.0;
    Vector lengthscales;        // one per input dimension
    double noise_variance = 1e-6;
};

/// k(x, x') = signal_variance * exp(-1/2 sum_j ((x_j - x'_j) / l_j)^2)
double kernel(const Vector& x, const Vector& x2, const KernelParams& p);

struct FitConfig {
    int restarts = 5;               // multi-start local search restarts
    int max_evals_per_restart = 40; // likelihood-evaluation budget per restart
    std::uint64_t seed = 0;
    double lengthscale_min = 1e-2;
    double lengthscale_max = 10.0;
    double signal_min = 1e-3;
    double signal_max = 1e3;
    double noise_min = 1e-8;
    double noise_max = 1e-2;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gaussian process regressor: zero prior mean over standardized targets,
/// squared-exponential kernel, Cholesky-based posterior. Immutable after fit.
class GpModel : public Predictor {
public:
    /// Maximize log marginal likelihood over the bounded hyperparameter box
    /// via multi-start coordinate search in log space. When given,
    /// `restart_inits` receives each restart's starting hyperparameters.
    static GpModel fit(const Matrix& X, const Vector& y, const FitConfig& cfg,
                       std::vector<KernelParams>* restart_inits = nullptr);

    /// Condition on data with fixed hyperparameters (no search).
    static GpModel fit_given_params(const Matrix& X, const Vector& y, const KernelParams& p);

    /// De-standardized posterior mean and stddev; x is clamped to [0,1]^d.
    Prediction predict(const Vector& x) const override;

    const KernelParams& params() const { return params_; }
    const Matrix& train_inputs() const { return X_; }
    const Matrix& cholesky_factor() const { return L_; }
    const Vector& alpha() const { return alpha_; }
    double target_mean() const { return y_mean_; }
    double target_std() const { return y_std_; }
    double jitter() const { return jitter_; }
    /// Log marginal likelihood of the standardized targets at the fitted
    /// hyperparameters.
    double log_marginal_likelihood() const { return lml_; }
    bool constant_mean() const { return constant_; }

private:
    GpModel() = default;

    // Copies observe the warn-once flag of their source model.
    struct WarnFlag : std::atomic<bool> {
        WarnFlag() : std::atomic<bool>(false) {}
        WarnFlag(const WarnFlag& o) : std::atomic<bool>(o.load()) {}
        WarnFlag& operator=(const WarnFlag& o) {
            store(o.load());
            return *this;
        }
    };
    mutable WarnFlag clamp_warned_;

    KernelParams params_;
    Matrix X_;        // normalized inputs, N x d
    Vector y_std_targets_;
    Matrix L_;        // lower Cholesky factor of K + (noise + jitter) I
    Vector alpha_;    // (K + noise I)^-1 y_std
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    double jitter_ = 0.0;
    double lml_ = 0.0;
    bool constant_ = false;  // degenerate targets: predict the constant
};

}  // namespace tracebo
