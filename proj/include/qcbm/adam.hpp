#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "qcbm/error.hpp"

namespace qcbm {

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with bias-corrected moment estimates.
class Adam {
public:
    Adam(std::size_t n_params, AdamConfig cfg = {}) : cfg_(cfg), m_(n_params, 0.0), v_(n_params, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad) {
        if (params.size() != m_.size() || grad.size() != m_.size()) {
            throw ValidationError("Adam: parameter/gradient size mismatch");
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            const double m_hat = m_[i] / bc1;
            const double v_hat = v_[i] / bc2;
            params[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
        }
    }

    long step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

}  // namespace qcbm
