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

#include "stagedvqe/spsa.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace stagedvqe;

namespace {

double sum_of_squares(const std::vector<double>& t) {
    double s = 0.0;
    for (double x : t) s += x * x;
    return s;
}

}  // namespace

TEST(SpsaConfig, Validation) {
    SpsaConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.alpha = 0.05;  // must exceed gamma
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SpsaConfig{};
    cfg.perturbation = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SpsaConfig{};
    cfg.max_iterations = 250;
    EXPECT_DOUBLE_EQ(cfg.resolved_stability(), 25.0);
    cfg.stability_constant = 7.0;
    EXPECT_DOUBLE_EQ(cfg.resolved_stability(), 7.0);
}

TEST(Spsa, QuadraticReachesOrigin) {
    SpsaConfig cfg;
    cfg.max_iterations = 300;
    cfg.rng_seed = 11;
    const auto r = spsa_minimize(sum_of_squares, {1.0, 1.0, 1.0}, cfg);
    EXPECT_LT(std::sqrt(sum_of_squares(r.final_parameters)), 0.05);
    EXPECT_EQ(r.num_evaluations, 2u * (300 + 50));
}

TEST(Spsa, ZeroIterationsReturnInitialUnchanged) {
    SpsaConfig cfg;
    cfg.max_iterations = 0;
    cfg.calibration_iterations = 0;
    const std::vector<double> initial = {0.3, -0.7};
    const auto r = spsa_minimize(sum_of_squares, initial, cfg);
    EXPECT_EQ(r.final_parameters, initial);
    EXPECT_EQ(r.best_parameters, initial);
    EXPECT_EQ(r.num_evaluations, 0u);
}

TEST(Spsa, EqualSeedsGiveBitwiseIdenticalTraces) {
    SpsaConfig cfg;
    cfg.max_iterations = 40;
    cfg.rng_seed = 77;
    std::vector<double> trace_a, trace_b;
    auto run = [&](std::vector<double>& sinkvec) {
        return spsa_minimize(
            sum_of_squares, {0.5, -0.5, 0.25}, cfg,
            [&sinkvec](const std::vector<double>&, double v, bool) { sinkvec.push_back(v); });
    };
    const auto ra = run(trace_a);
    const auto rb = run(trace_b);
    ASSERT_EQ(trace_a.size(), trace_b.size());
    for (std::size_t i = 0; i < trace_a.size(); ++i) {
        EXPECT_EQ(trace_a[i], trace_b[i]);
    }
    EXPECT_EQ(ra.final_parameters, rb.final_parameters);
    EXPECT_EQ(ra.best_value, rb.best_value);
}

TEST(Spsa, NonFiniteObjectiveAborts) {
    SpsaConfig cfg;
    cfg.max_iterations = 10;
    auto bad = [](const std::vector<double>&) { return std::nan(""); };
    EXPECT_THROW(spsa_minimize(bad, {1.0}, cfg), std::runtime_error);
    EXPECT_THROW(spsa_minimize(sum_of_squares,
                               {std::numeric_limits<double>::infinity()}, cfg),
                 std::invalid_argument);
}

TEST(Spsa, SinkSeesCalibrationFlag) {
    SpsaConfig cfg;
    cfg.max_iterations = 5;
    cfg.calibration_iterations = 3;
    std::size_t calibration_evals = 0, optimization_evals = 0;
    spsa_minimize(sum_of_squares, {1.0, 1.0}, cfg,
                  [&](const std::vector<double>&, double, bool calibration) {
                      (calibration ? calibration_evals : optimization_evals) += 1;
                  });
    EXPECT_EQ(calibration_evals, 6u);
    EXPECT_EQ(optimization_evals, 10u);
}

TEST(Spsa, ExplicitGainSkipsCalibrationProbes) {
    SpsaConfig cfg;
    cfg.max_iterations = 20;
    cfg.calibration_iterations = 50;
    cfg.gain = 0.05;
    std::size_t evals = 0;
    const auto r = spsa_minimize(sum_of_squares, {1.0, 1.0}, cfg,
                                 [&](const std::vector<double>&, double, bool) { ++evals; });
    EXPECT_EQ(evals, 40u);  // no calibration evaluations
    EXPECT_DOUBLE_EQ(r.gain_used, 0.05);
}

TEST(Spsa, ConvexQuadraticConvergesForMostSeeds) {
    // eight-dimensional convex quadratic, 500 iterations, >= 95 of 100 seeds
    int converged = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed + 10007);
        std::vector<double> scale(8), init(8);
        for (auto& s : scale) s = 0.5 + 1.5 * ((rng() >> 11) * 0x1p-53);
        for (auto& v : init) v = -2.0 + 4.0 * ((rng() >> 11) * 0x1p-53);
        auto objective = [&](const std::vector<double>& t) {
            double s = 0.0;
            for (int i = 0; i < 8; ++i) s += scale[i] * t[i] * t[i];
            return s;
        };
        SpsaConfig cfg;
        cfg.max_iterations = 500;
        cfg.rng_seed = seed;
        const auto r = spsa_minimize(objective, init, cfg);
        if (objective(r.final_parameters) < 0.05 * objective(init)) ++converged;
    }
    EXPECT_GE(converged, 95);
}

TEST(Spsa, BestTrackingIsMinOverEvaluations) {
    SpsaConfig cfg;
    cfg.max_iterations = 60;
    cfg.rng_seed = 5;
    double observed_min = std::numeric_limits<double>::infinity();
    const auto r = spsa_minimize(
        sum_of_squares, {2.0, -1.0}, cfg,
        [&](const std::vector<double>&, double v, bool) { observed_min = std::min(observed_min, v); });
    EXPECT_DOUBLE_EQ(r.best_value, observed_min);
    EXPECT_DOUBLE_EQ(sum_of_squares(r.best_parameters), r.best_value);
}
