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

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stagedvqe/simulator.hpp"
#include "stagedvqe/spsa.hpp"
#include "stagedvqe/truncation.hpp"

namespace stagedvqe {

struct TraceRecord {
    std::size_t evaluation_index = 0;
    std::size_t stage_index = 0;
    double energy = 0.0;  // raw objective value at this evaluation (Hartree)
    std::size_t cumulative_measurement_units = 0;
};

/**
 * Per-evaluation energy record of a (staged) VQE run. Calibration
 * evaluations are included; each evaluation in stage n adds that stage's
 * measurement_units to the cumulative counter.
 */
struct ConvergenceTrace {
    std::vector<TraceRecord> records;
    std::vector<std::size_t> stage_boundaries;  // evaluation indices where a new stage starts
    std::vector<double> final_parameters;
};

/// One row per stage: what the stage started from, ended with, and found.
struct StageOutcome {
    std::string label;
    std::vector<double> initial_parameters;
    std::vector<double> final_parameters;
    std::vector<double> best_parameters;
    double best_value = 0.0;
    std::size_t evaluations = 0;
};

/**
 * Measurement-cost accounting: S = sum_n k_n * i_n / (K * I) and the
 * headline improvement 100 * (1 - S).
 */
struct ImprovementReport {
    struct StageStat {
        std::size_t measurement_units = 0;  // k_n
        unsigned iterations = 0;            // i_n
    };
    std::vector<StageStat> stages;
    std::size_t full_units = 0;   // K
    unsigned total_iterations = 0;  // I = sum i_n
    double s_ratio = 0.0;
    double improvement_percent = 0.0;
};

inline ImprovementReport improvement(const std::vector<ImprovementReport::StageStat>& stages,
                                     std::size_t full_units, unsigned total_iterations) {
    if (full_units == 0 || total_iterations == 0) {
        throw std::invalid_argument("improvement: K and I must be positive");
    }
    unsigned sum_i = 0;
    std::size_t max_k = 0;
    double weighted = 0.0;
    for (const auto& s : stages) {
        sum_i += s.iterations;
        max_k = std::max(max_k, s.measurement_units);
        weighted += static_cast<double>(s.measurement_units) * s.iterations;
    }
    if (sum_i != total_iterations) {
        throw std::invalid_argument("improvement: I must equal the sum of stage iterations");
    }
    if (max_k > full_units) {
        throw std::invalid_argument("improvement: K must be at least the largest stage cost");
    }
    ImprovementReport r;
    r.stages = stages;
    r.full_units = full_units;
    r.total_iterations = total_iterations;
    r.s_ratio = weighted / (static_cast<double>(full_units) * total_iterations);
    r.improvement_percent = 100.0 * (1.0 - r.s_ratio);
    return r;
}

inline ImprovementReport improvement(const StageSchedule& schedule) {
    std::vector<ImprovementReport::StageStat> stats;
    stats.reserve(schedule.stages.size());
    for (const auto& s : schedule.stages) {
        stats.push_back({s.measurement_units, s.iterations});
    }
    return improvement(stats, schedule.full_units(), schedule.total_iterations());
}

struct StagedVqeResult {
    double energy = 0.0;              // best objective value found in the final stage
    std::vector<double> parameters;   // point achieving it
    ConvergenceTrace trace;
    ImprovementReport report;
    std::vector<StageOutcome> stage_outcomes;
};

struct StagedVqeOptions {
    std::size_t shots = 0;  // 0 = exact statevector expectation
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::vector<double> random_initial_parameters(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> p(count);
    for (auto& v : p) v = (2.0 * uniform01(rng) - 1.0) * M_PI;  // uniform in [-pi, pi)
    return p;
}

}  // namespace detail

/**
 * Warm-started staged minimization: stage 0 starts from uniformly random
 * parameters in [-pi, pi); every later stage starts from the previous
 * stage's final iterate. SPSA calibrates its step scale once, on stage 0;
 * later stages reuse it (re-probing at a warm-started point would blow the
 * gain up and kick the parameters away). The returned parameters are the
 * final stage's last iterate and the returned energy is the exact
 * expectation there. Fully deterministic for a fixed seed in
 * exact-expectation mode.
 */
inline StagedVqeResult staged_vqe(const StageSchedule& schedule, const Ansatz& ansatz,
                                  const SpsaConfig& base_config, std::uint64_t seed,
                                  const StagedVqeOptions& options = {}) {
    if (schedule.stages.empty()) {
        throw std::invalid_argument("staged_vqe: empty schedule");
    }
    for (const auto& s : schedule.stages) {
        if (s.hamiltonian.num_qubits() != ansatz.num_qubits()) {
            throw std::invalid_argument("staged_vqe: stage '" + s.label +
                                        "' qubit count does not match the ansatz");
        }
    }

    StagedVqeResult result;
    std::vector<double> theta =
        detail::random_initial_parameters(ansatz.num_parameters(), detail::mix_seed(seed, 0));

    std::size_t eval_index = 0;
    std::size_t cumulative_units = 0;
    std::mt19937_64 shot_rng(detail::mix_seed(seed, 0x5107));
    double carried_gain = base_config.gain;

    for (std::size_t stage_idx = 0; stage_idx < schedule.stages.size(); ++stage_idx) {
        const Stage& stage = schedule.stages[stage_idx];
        result.trace.stage_boundaries.push_back(eval_index);

        auto objective = [&](const std::vector<double>& params) {
            const StateVector state = prepare_state(ansatz, params);
            return options.shots == 0 ? expectation(state, stage.hamiltonian)
                                      : expectation_sampled(state, stage.hamiltonian,
                                                            options.shots, shot_rng);
        };
        auto sink = [&](const std::vector<double>&, double value, bool) {
            cumulative_units += stage.measurement_units;
            result.trace.records.push_back({eval_index, stage_idx, value, cumulative_units});
            ++eval_index;
        };

        SpsaConfig config = base_config;
        config.max_iterations = stage.iterations;
        if (base_config.stability_constant < 0) {
            config.stability_constant = 0.1 * stage.iterations;
        }
        config.rng_seed = detail::mix_seed(seed, stage_idx + 1);
        config.gain = carried_gain;
        if (stage_idx > 0) config.calibration_iterations = 0;

        StageOutcome outcome;
        outcome.label = stage.label;
        outcome.initial_parameters = theta;
        const SpsaResult opt = spsa_minimize(objective, theta, config, sink);
        outcome.final_parameters = opt.final_parameters;
        outcome.best_parameters = opt.best_parameters;
        outcome.best_value = opt.best_value;
        outcome.evaluations = opt.num_evaluations;
        result.stage_outcomes.push_back(outcome);

        carried_gain = opt.gain_used;
        theta = opt.final_parameters;  // warm start for the next stage
    }
    result.trace.final_parameters = theta;
    result.parameters = theta;
    result.energy = expectation(prepare_state(ansatz, theta), schedule.final_stage().hamiltonian);
    result.report = improvement(schedule);
    return result;
}

/// Plain single-Hamiltonian VQE: a degenerate one-stage schedule.
inline StagedVqeResult standard_vqe(const QubitHamiltonian& h, unsigned iterations,
                                    const Ansatz& ansatz, const SpsaConfig& base_config,
                                    std::uint64_t seed, const StagedVqeOptions& options = {}) {
    StageSchedule schedule;
    schedule.stages.push_back({"full", h, iterations, h.num_terms()});
    return staged_vqe(schedule, ansatz, base_config, seed, options);
}

// ---------------------------------------------------------------------------
// serialization

inline void write_trace_tsv(const ConvergenceTrace& trace, std::ostream& os) {
    os << "evaluation_index\tstage_index\tenergy\tcumulative_measurement_units\n";
    char buf[64];
    for (const auto& r : trace.records) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.energy);
        os << r.evaluation_index << '\t' << r.stage_index << '\t' << buf << '\t'
           << r.cumulative_measurement_units << '\n';
    }
}

inline ConvergenceTrace read_trace_tsv(std::istream& is) {
    ConvergenceTrace trace;
    std::string line;
    bool header = true;
    std::size_t last_stage = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        TraceRecord r;
        std::istringstream ls(line);
        if (!(ls >> r.evaluation_index >> r.stage_index >> r.energy >>
              r.cumulative_measurement_units)) {
            throw std::runtime_error("malformed trace line: " + line);
        }
        if (trace.records.empty() || r.stage_index != last_stage) {
            trace.stage_boundaries.push_back(r.evaluation_index);
            last_stage = r.stage_index;
        }
        trace.records.push_back(r);
    }
    return trace;
}

inline void write_improvement_report(const ImprovementReport& report,
                                     const StageSchedule& schedule, std::ostream& os) {
    os << "# measurement-cost accounting: S = sum_n k_n*i_n / (K*I)\n";
    write_stage_manifest(schedule, os);
    char buf[64];
    os << "K\t" << report.full_units << '\n';
    os << "I\t" << report.total_iterations << '\n';
    std::snprintf(buf, sizeof(buf), "%.6f", report.s_ratio);
    os << "S_ratio\t" << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.2f", report.improvement_percent);
    os << "improvement_percent\t" << buf << '\n';
}

}  // namespace stagedvqe
