// Copyright 2025 The stagedvqe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagedvqe {

/**
 * SPSA hyperparameters. One iteration is one SPSA step and costs two
 * objective evaluations; the calibration phase costs a further
 * 2*calibration_iterations evaluations and estimates the gain `a` so that the
 * first update step has magnitude target_step per component.
 */
struct SpsaConfig {
    unsigned max_iterations = 100;
    unsigned calibration_iterations = 50;
    double alpha = 0.602;           // gain exponent for a_k
    double gamma = 0.101;           // decay exponent for c_k
    double perturbation = 0.1;      // c, in radians
    double stability_constant = -1; // A; negative means 0.1 * max_iterations
    double target_step = 0.1;       // desired first-step magnitude, radians
    // Step scale s with a = s * (A+1)^alpha, so the first update has
    // per-component magnitude s * |gradient estimate|. Negative means estimate
    // s from the calibration probes (target_step / average gradient magnitude).
    double gain = -1;
    std::uint64_t rng_seed = 0;

    double resolved_stability() const {
        return stability_constant >= 0 ? stability_constant : 0.1 * max_iterations;
    }

    void validate() const {
        if (!(alpha > gamma && gamma > 0)) {
            throw std::invalid_argument("SpsaConfig: requires alpha > gamma > 0");
        }
        if (perturbation <= 0) {
            throw std::invalid_argument("SpsaConfig: perturbation scale must be positive");
        }
    }
};

struct SpsaResult {
    std::vector<double> final_parameters;  // last iterate
    std::vector<double> best_parameters;   // lowest evaluated point
    double best_value = 0.0;               // +inf if nothing was evaluated
    double gain_used = 0.0;                // resolved step scale s (see SpsaConfig::gain)
    std::size_t num_evaluations = 0;
};

/// Called once per objective evaluation, in evaluation order.
/// `calibration` marks the pre-optimization gain-estimation evaluations.
using SpsaEvalSink =
    std::function<void(const std::vector<double>& point, double value, bool calibration)>;

namespace detail {

/// Deterministic uniform double in [0, 1) from raw generator bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void fill_rademacher(std::mt19937_64& rng, std::vector<double>& delta) {
    for (auto& d : delta) d = (rng() & 1) ? 1.0 : -1.0;
}

}  // namespace detail

/**
 * Standard SPSA minimization. At iteration k a Rademacher perturbation Delta
 * is sampled, the objective is evaluated at theta +- c_k Delta, the gradient
 * estimate g = (f+ - f-) / (2 c_k) * Delta^{-1} is formed element-wise and
 * theta <- theta - a_k g with a_k = a/(A+k+1)^alpha, c_k = c/(k+1)^gamma.
 * Fully deterministic for a fixed rng_seed; aborts if the objective returns a
 * non-finite value.
 */
inline SpsaResult spsa_minimize(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<double>& initial, const SpsaConfig& config,
                                const SpsaEvalSink& sink = nullptr) {
    config.validate();
    for (double v : initial) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("spsa_minimize: initial point is not finite");
        }
    }
    const std::size_t dim = initial.size();
    const double big_a = config.resolved_stability();

    SpsaResult result;
    result.final_parameters = initial;
    result.best_parameters = initial;
    result.best_value = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(config.rng_seed);
    std::vector<double> delta(dim);

    auto evaluate = [&](const std::vector<double>& point, bool calibration) {
        const double value = objective(point);
        if (!std::isfinite(value)) {
            throw std::runtime_error("spsa_minimize: objective returned a non-finite value at "
                                     "evaluation " + std::to_string(result.num_evaluations));
        }
        result.num_evaluations += 1;
        if (value < result.best_value) {
            result.best_value = value;
            result.best_parameters = point;
        }
        if (sink) sink(point, value, calibration);
        return value;
    };

    // Calibration: average |f+ - f-| / (2c) over Rademacher probes around the
    // start point, then choose the step scale s so the first per-component
    // update hits target_step. A flat objective falls back to s = target_step.
    // An explicitly configured gain skips the probes entirely.
    double step_scale = config.target_step;
    if (config.gain >= 0) {
        step_scale = config.gain;
    } else if (config.calibration_iterations > 0 && dim > 0) {
        double magnitude_sum = 0.0;
        std::vector<double> point(dim);
        for (unsigned it = 0; it < config.calibration_iterations; ++it) {
            detail::fill_rademacher(rng, delta);
            for (std::size_t i = 0; i < dim; ++i) {
                point[i] = initial[i] + config.perturbation * delta[i];
            }
            const double f_plus = evaluate(point, true);
            for (std::size_t i = 0; i < dim; ++i) {
                point[i] = initial[i] - config.perturbation * delta[i];
            }
            const double f_minus = evaluate(point, true);
            magnitude_sum += std::abs(f_plus - f_minus) / (2.0 * config.perturbation);
        }
        const double avg_magnitude = magnitude_sum / config.calibration_iterations;
        if (avg_magnitude > 1e-300) {
            step_scale = config.target_step / avg_magnitude;
        }
    }

    result.gain_used = step_scale;
    const double gain_a = step_scale * std::pow(big_a + 1.0, config.alpha);
    std::vector<double> theta = initial;
    std::vector<double> point(dim);
    for (unsigned k = 0; k < config.max_iterations; ++k) {
        const double ck = config.perturbation / std::pow(k + 1.0, config.gamma);
        const double ak = gain_a / std::pow(big_a + k + 1.0, config.alpha);
        detail::fill_rademacher(rng, delta);
        for (std::size_t i = 0; i < dim; ++i) point[i] = theta[i] + ck * delta[i];
        const double f_plus = evaluate(point, false);
        for (std::size_t i = 0; i < dim; ++i) point[i] = theta[i] - ck * delta[i];
        const double f_minus = evaluate(point, false);
        const double scale = (f_plus - f_minus) / (2.0 * ck);
        for (std::size_t i = 0; i < dim; ++i) {
            theta[i] -= ak * scale * delta[i];  // 1/delta_i == delta_i for +-1
        }
    }
    result.final_parameters = theta;
    return result;
}

}  // namespace stagedvqe
