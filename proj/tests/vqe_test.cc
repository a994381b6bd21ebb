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

#include "stagedvqe/vqe.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "stagedvqe/fcidump.hpp"
#include "test_util.hpp"

using namespace stagedvqe;

TEST(Improvement, SingleFullStageIsZeroPercent) {
    const auto r = improvement({{20, 100}}, 20, 100);
    EXPECT_DOUBLE_EQ(r.s_ratio, 1.0);
    EXPECT_DOUBLE_EQ(r.improvement_percent, 0.0);
}

TEST(Improvement, NaiveTwoStageArithmetic) {
    // (55, 400), (1819, 400), K = 1819, I = 800
    const auto r = improvement({{55, 400}, {1819, 400}}, 1819, 800);
    EXPECT_NEAR(r.improvement_percent, 48.488, 1e-3);
}

TEST(Improvement, ClassificationFourStageArithmetic) {
    // (1, 500), (11, 100), (11, 200), (15, 200), K = 15, I = 1000
    const auto r = improvement({{1, 500}, {11, 100}, {11, 200}, {15, 200}}, 15, 1000);
    EXPECT_NEAR(r.improvement_percent, 54.667, 1e-3);
    EXPECT_NEAR(r.s_ratio, 0.45333, 1e-5);
}

TEST(Improvement, InvalidInputsThrow) {
    EXPECT_THROW(improvement({{10, 100}}, 0, 100), std::invalid_argument);
    EXPECT_THROW(improvement({{10, 100}}, 10, 0), std::invalid_argument);
    EXPECT_THROW(improvement({{10, 100}}, 10, 150), std::invalid_argument);  // I != sum i_n
    EXPECT_THROW(improvement({{20, 100}}, 10, 100), std::invalid_argument);  // k_n > K
}

TEST(Improvement, FromH2Schedules) {
    const auto data = testutil::load_fixture("h2.fcidump");
    const auto hq = jordan_wigner(data.hamiltonian);
    const auto naive = build_cutoff_ladder(hq, {{0.1}}, {400, 400});
    EXPECT_NEAR(improvement(naive).improvement_percent, 13.333, 1e-3);
    const auto cls =
        build_classification_ladder(classify(data.hamiltonian), {500, 100, 200, 200});
    EXPECT_NEAR(improvement(cls).improvement_percent, 54.667, 1e-3);
}

TEST(Improvement, FromH4ClassificationSchedule) {
    const auto data = testutil::load_fixture("h4.fcidump");
    const auto cls =
        build_classification_ladder(classify(data.hamiltonian), {500, 100, 200, 200});
    EXPECT_NEAR(improvement(cls).improvement_percent, 66.814, 1e-3);
}

namespace {

struct H2Setup {
    FcidumpData data;
    QubitHamiltonian hq;
    Ansatz ansatz;
    H2Setup()
        : data(testutil::load_fixture("h2.fcidump")),
          hq(jordan_wigner(data.hamiltonian)),
          ansatz(Ansatz::two_local(4, 3)) {}
};

SpsaConfig small_config() {
    SpsaConfig cfg;
    cfg.calibration_iterations = 10;
    return cfg;
}

}  // namespace

TEST(StagedVqe, EmptyScheduleAndQubitMismatchThrow) {
    const H2Setup s;
    EXPECT_THROW(staged_vqe(StageSchedule{}, s.ansatz, small_config(), 1),
                 std::invalid_argument);
    StageSchedule bad;
    bad.stages.push_back({"full", QubitHamiltonian(3), 5, 1});
    EXPECT_THROW(staged_vqe(bad, s.ansatz, small_config(), 1), std::invalid_argument);
}

TEST(StagedVqe, OneStageScheduleEqualsPlainVqe) {
    const H2Setup s;
    StageSchedule degenerate;
    degenerate.stages.push_back({"full", s.hq, 30, s.hq.num_terms()});
    const auto staged = staged_vqe(degenerate, s.ansatz, small_config(), 99);
    const auto plain = standard_vqe(s.hq, 30, s.ansatz, small_config(), 99);
    EXPECT_EQ(staged.parameters, plain.parameters);
    EXPECT_EQ(staged.energy, plain.energy);
    ASSERT_EQ(staged.trace.records.size(), plain.trace.records.size());
    for (std::size_t i = 0; i < staged.trace.records.size(); ++i) {
        EXPECT_EQ(staged.trace.records[i].energy, plain.trace.records[i].energy);
    }
}

TEST(StagedVqe, WarmStartContractHoldsExactly) {
    const H2Setup s;
    const auto ladder = build_cutoff_ladder(s.hq, {{0.1}}, {25, 25});
    const auto r = staged_vqe(ladder, s.ansatz, small_config(), 3);
    ASSERT_EQ(r.stage_outcomes.size(), 2u);
    EXPECT_EQ(r.stage_outcomes[1].initial_parameters, r.stage_outcomes[0].final_parameters);
    EXPECT_EQ(r.parameters, r.stage_outcomes[1].final_parameters);
}

TEST(StagedVqe, TraceBookkeeping) {
    const H2Setup s;
    const auto ladder = build_cutoff_ladder(s.hq, {{0.1}}, {20, 10});
    SpsaConfig cfg = small_config();
    const auto r = staged_vqe(ladder, s.ansatz, cfg, 17);
    // evaluations: stage0 = 2*10 calibration + 2*20, stage1 = 2*10 (no recalibration)
    const std::size_t stage0_evals = 2 * 10 + 2 * 20;
    const std::size_t stage1_evals = 2 * 10;
    ASSERT_EQ(r.trace.records.size(), stage0_evals + stage1_evals);
    ASSERT_EQ(r.trace.stage_boundaries.size(), 2u);
    EXPECT_EQ(r.trace.stage_boundaries[0], 0u);
    EXPECT_EQ(r.trace.stage_boundaries[1], stage0_evals);
    for (std::size_t i = 0; i < r.trace.records.size(); ++i) {
        EXPECT_EQ(r.trace.records[i].evaluation_index, i);
    }
    const std::size_t expected_units =
        stage0_evals * ladder.stages[0].measurement_units +
        stage1_evals * ladder.stages[1].measurement_units;
    EXPECT_EQ(r.trace.records.back().cumulative_measurement_units, expected_units);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
        EXPECT_GE(r.trace.records[i].cumulative_measurement_units,
                  r.trace.records[i - 1].cumulative_measurement_units);
    }
}

TEST(StagedVqe, SeededRunsAreBitwiseDeterministic) {
    const H2Setup s;
    const auto ladder =
        build_classification_ladder(classify(s.data.hamiltonian), {15, 5, 5, 5});
    const auto a = staged_vqe(ladder, s.ansatz, small_config(), 1234);
    const auto b = staged_vqe(ladder, s.ansatz, small_config(), 1234);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.parameters, b.parameters);
    ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        EXPECT_EQ(a.trace.records[i].energy, b.trace.records[i].energy);
    }
    const auto c = staged_vqe(ladder, s.ansatz, small_config(), 1235);
    EXPECT_NE(a.trace.records[0].energy, c.trace.records[0].energy);
}

TEST(StagedVqe, BestSoFarWithinFinalStageIsNonIncreasing) {
    const H2Setup s;
    const auto r = standard_vqe(s.hq, 60, s.ansatz, small_config(), 21);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : r.trace.records) {
        best = std::min(best, rec.energy);
        EXPECT_LE(best, rec.energy);
    }
    EXPECT_EQ(r.stage_outcomes.back().best_value, best);
}

TEST(StagedVqe, ReportMatchesSchedule) {
    const H2Setup s;
    const auto ladder = build_cutoff_ladder(s.hq, {{0.1}}, {20, 10});
    const auto r = staged_vqe(ladder, s.ansatz, small_config(), 5);
    EXPECT_EQ(r.report.full_units, 15u);
    EXPECT_EQ(r.report.total_iterations, 30u);
    ASSERT_EQ(r.report.stages.size(), 2u);
    EXPECT_EQ(r.report.stages[0].measurement_units, 11u);
}

TEST(Trace, TsvRoundTrip) {
    ConvergenceTrace trace;
    trace.records = {{0, 0, -1.25, 11}, {1, 0, -1.5, 22}, {2, 1, -1.75, 37}};
    trace.stage_boundaries = {0, 2};
    std::stringstream ss;
    write_trace_tsv(trace, ss);
    const auto parsed = read_trace_tsv(ss);
    ASSERT_EQ(parsed.records.size(), trace.records.size());
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        EXPECT_EQ(parsed.records[i].evaluation_index, trace.records[i].evaluation_index);
        EXPECT_EQ(parsed.records[i].stage_index, trace.records[i].stage_index);
        EXPECT_EQ(parsed.records[i].energy, trace.records[i].energy);
        EXPECT_EQ(parsed.records[i].cumulative_measurement_units,
                  trace.records[i].cumulative_measurement_units);
    }
    EXPECT_EQ(parsed.stage_boundaries, trace.stage_boundaries);
}

TEST(Report, TextFormEmbedsManifest) {
    const auto data = testutil::load_fixture("h2.fcidump");
    const auto hq = jordan_wigner(data.hamiltonian);
    const auto ladder = build_cutoff_ladder(hq, {{0.1}}, {400, 400});
    std::ostringstream os;
    write_improvement_report(improvement(ladder), ladder, os);
    const std::string text = os.str();
    EXPECT_NE(text.find("cutoff=0.1\t11\t11\t400"), std::string::npos);
    EXPECT_NE(text.find("improvement_percent\t13.33"), std::string::npos);
}
