#include "tracebo/gp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <random>
#include <vector>

namespace tracebo {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

Matrix covariance_matrix(const Matrix& X, const KernelParams& p) {
    const Eigen::Index n = X.rows();
    Matrix K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = p.signal_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double q = 0.0;
            for (Eigen::Index k = 0; k < X.cols(); ++k) {
                const double r = (X(i, k) - X(j, k)) / p.lengthscales[k];
                q += r * r;
            }
            K(i, j) = K(j, i) = p.signal_variance * std::exp(-0.5 * q);
        }
    }
    return K;
}

/// Cholesky with jitter escalation; returns the jitter actually used.
double robust_cholesky(const Matrix& K, double noise, Eigen::LLT<Matrix>& llt) {
    const Eigen::Index n = K.rows();
    double jitter = 0.0;
    Matrix A = K + noise * Matrix::Identity(n, n);
    llt.compute(A);
    if (llt.info() == Eigen::Success) return jitter;
    for (jitter = kJitterStart; jitter <= kJitterMax; jitter *= 10.0) {
        llt.compute(A + jitter * Matrix::Identity(n, n));
        if (llt.info() == Eigen::Success) return jitter;
    }
    throw FitError("GP fit: Cholesky factorization failed after jitter escalation");
}

struct LikelihoodEval {
    double lml = -std::numeric_limits<double>::infinity();
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;
};

bool evaluate_lml(const Matrix& X, const Vector& y, const KernelParams& p, LikelihoodEval& out) {
    const Eigen::Index n = X.rows();
    Matrix K = covariance_matrix(X, p);
    try {
        out.jitter = robust_cholesky(K, p.noise_variance, out.llt);
    } catch (const FitError&) {
        return false;
    }
    Vector alpha = out.llt.solve(y);
    double logdet = 0.0;
    const auto& L = out.llt.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(L(i, i));
    out.lml = -0.5 * y.dot(alpha) - logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
    return std::isfinite(out.lml);
}

}  // namespace

double kernel(const Vector& x, const Vector& x2, const KernelParams& p) {
    if (x.size() != x2.size() || x.size() != p.lengthscales.size()) {
        throw std::invalid_argument("kernel: dimension mismatch with lengthscales");
    }
    if (p.signal_variance <= 0.0) {
        throw std::invalid_argument("kernel: signal_variance must be positive");
    }
    double q = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (p.lengthscales[j] <= 0.0) {
            throw std::invalid_argument("kernel: lengthscales must be positive");
        }
        const double r = (x[j] - x2[j]) / p.lengthscales[j];
        q += r * r;
    }
    return p.signal_variance * std::exp(-0.5 * q);
}

GpModel GpModel::fit_given_params(const Matrix& X, const Vector& y, const KernelParams& p) {
    if (X.rows() != y.size()) throw std::invalid_argument("GP fit: X rows must match y length");
    if (X.rows() < 1) throw std::invalid_argument("GP fit: empty dataset");
    if (p.lengthscales.size() != X.cols()) {
        throw std::invalid_argument("GP fit: lengthscale count must match input dimension");
    }
    if (!y.allFinite()) throw std::invalid_argument("GP fit: targets must be finite");

    GpModel m;
    m.params_ = p;
    m.X_ = X;
    m.y_mean_ = y.mean();
    const double var = (y.array() - m.y_mean_).square().sum() / static_cast<double>(y.size());
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
        // Degenerate targets: constant-mean model, no standardization.
        m.constant_ = true;
        m.y_std_ = 1.0;
        m.y_std_targets_ = Vector::Zero(y.size());
        m.alpha_ = Vector::Zero(y.size());
        m.L_ = Matrix::Identity(y.size(), y.size());
        m.lml_ = 0.0;
        return m;
    }
    m.y_std_ = sd;
    m.y_std_targets_ = (y.array() - m.y_mean_) / sd;

    Matrix K = covariance_matrix(X, p);
    Eigen::LLT<Matrix> llt;
    m.jitter_ = robust_cholesky(K, p.noise_variance, llt);
    m.L_ = llt.matrixL();
    m.alpha_ = llt.solve(m.y_std_targets_);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < m.L_.rows(); ++i) logdet += std::log(m.L_(i, i));
    m.lml_ = -0.5 * m.y_std_targets_.dot(m.alpha_) - logdet
             - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * M_PI);
    return m;
}

GpModel GpModel::fit(const Matrix& X, const Vector& y, const FitConfig& cfg,
                     std::vector<KernelParams>* restart_inits) {
    if (X.rows() < 2) throw std::invalid_argument("GP fit: need at least 2 observations");
    if (X.rows() != y.size()) throw std::invalid_argument("GP fit: X rows must match y length");
    if (!y.allFinite()) throw std::invalid_argument("GP fit: targets must be finite (NaN rejected)");

    const int d = static_cast<int>(X.cols());
    const double mean = y.mean();
    const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
    if (std::sqrt(var) < 1e-12) {
        KernelParams p;
        p.lengthscales = Vector::Constant(d, 1.0);
        return fit_given_params(X, y, p);
    }
    const Vector y_std = (y.array() - mean) / std::sqrt(var);

    // Search over theta = [log l_1..log l_d, log sf2, log sn2].
    const int np = d + 2;
    Vector lo(np), hi(np);
    for (int j = 0; j < d; ++j) {
        lo[j] = std::log(cfg.lengthscale_min);
        hi[j] = std::log(cfg.lengthscale_max);
    }
    lo[d] = std::log(cfg.signal_min);
    hi[d] = std::log(cfg.signal_max);
    lo[d + 1] = std::log(cfg.noise_min);
    hi[d + 1] = std::log(cfg.noise_max);

    auto params_of = [&](const Vector& theta) {
        KernelParams p;
        p.lengthscales = theta.head(d).array().exp();
        p.signal_variance = std::exp(theta[d]);
        p.noise_variance = std::exp(theta[d + 1]);
        return p;
    };
    auto nll_of = [&](const Vector& theta, double& lml) {
        LikelihoodEval ev;
        if (!evaluate_lml(X, y_std, params_of(theta), ev)) return false;
        lml = ev.lml;
        return true;
    };

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Vector best_theta;
    double best_lml = -std::numeric_limits<double>::infinity();

    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        Vector theta(np);
        if (r == 0) {
            for (int j = 0; j < d; ++j) theta[j] = std::log(0.3);
            theta[d] = 0.0;            // sf2 = 1
            theta[d + 1] = std::log(1e-6);
        } else {
            for (int j = 0; j < np; ++j) theta[j] = lo[j] + (hi[j] - lo[j]) * unif(rng);
        }
        for (int j = 0; j < np; ++j) theta[j] = std::clamp(theta[j], lo[j], hi[j]);
        if (restart_inits) restart_inits->push_back(params_of(theta));

        double cur;
        int evals = 1;
        if (!nll_of(theta, cur)) continue;
        if (cur > best_lml) {
            best_lml = cur;
            best_theta = theta;
        }

        // Coordinate-wise pattern search with shrinking step.
        double step = 1.0;
        while (step >= 0.02 && evals < cfg.max_evals_per_restart) {
            bool improved = false;
            for (int j = 0; j < np && evals < cfg.max_evals_per_restart; ++j) {
                for (double dir : {+1.0, -1.0}) {
                    Vector cand = theta;
                    cand[j] = std::clamp(cand[j] + dir * step, lo[j], hi[j]);
                    if (cand[j] == theta[j]) continue;
                    double v;
                    ++evals;
                    if (!nll_of(cand, v)) continue;
                    if (v > cur) {
                        cur = v;
                        theta = cand;
                        improved = true;
                        if (cur > best_lml) {
                            best_lml = cur;
                            best_theta = theta;
                        }
                        break;  // keep direction of improvement for this coord
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
    }

    if (!best_theta.size()) {
        throw FitError("GP fit: no valid hyperparameters found within bounds");
    }
    return fit_given_params(X, y, params_of(best_theta));
}

Prediction GpModel::predict(const Vector& x) const {
    if (!constant_ && x.size() != X_.cols()) {
        throw std::invalid_argument("GP predict: query dimension mismatch");
    }
    Vector xq = x;
    bool clamped = false;
    for (Eigen::Index j = 0; j < xq.size(); ++j) {
        if (xq[j] < 0.0 || xq[j] > 1.0) clamped = true;
        xq[j] = std::clamp(xq[j], 0.0, 1.0);
    }
    if (clamped && !clamp_warned_.exchange(true)) {
        std::fprintf(stderr, "tracebo: GP query outside unit hypercube, clamped\n");
    }
    if (constant_) {
        return {y_mean_, 0.0};
    }
    const Eigen::Index n = X_.rows();
    Vector k_vec(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double q = 0.0;
        for (Eigen::Index j = 0; j < X_.cols(); ++j) {
            const double r = (xq[j] - X_(i, j)) / params_.lengthscales[j];
            q += r * r;
        }
        k_vec[i] = params_.signal_variance * std::exp(-0.5 * q);
    }
    const double mu_std = k_vec.dot(alpha_);
    const Vector v = L_.triangularView<Eigen::Lower>().solve(k_vec);
    const double var_std = std::max(params_.signal_variance - v.squaredNorm(), 0.0);
    return {y_mean_ + y_std_ * mu_std, y_std_ * std::sqrt(var_std)};
}

}  // namespace tracebo
