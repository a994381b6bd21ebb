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
#include <ostream>
#include <string>
#include <vector>

#include "stagedvqe/fermion.hpp"
#include "stagedvqe/pauli.hpp"

namespace stagedvqe {

/// Strictly descending positive coefficient thresholds.
struct CutoffSchedule {
    std::vector<double> cutoffs;

    void validate() const {
        if (cutoffs.empty()) {
            throw std::invalid_argument("CutoffSchedule: empty cutoff list");
        }
        for (std::size_t i = 0; i < cutoffs.size(); ++i) {
            if (cutoffs[i] <= 0.0) {
                throw std::invalid_argument("CutoffSchedule: cutoffs must be positive");
            }
            if (i > 0 && cutoffs[i] >= cutoffs[i - 1]) {
                throw std::invalid_argument("CutoffSchedule: cutoffs must be strictly descending");
            }
        }
    }
};

struct Stage {
    std::string label;
    QubitHamiltonian hamiltonian;
    unsigned iterations = 0;
    // Cost of one objective evaluation in "measurement units". By convention
    // this is the stage's stored term count (the measurable set the schedule
    // accounts for), except the Z-string stage of a classification ladder,
    // which is simultaneously measurable and costs a single unit.
    std::size_t measurement_units = 0;
};

/// Ordered optimization stages ending in the full Hamiltonian.
struct StageSchedule {
    std::vector<Stage> stages;

    std::size_t num_stages() const { return stages.size(); }
    const Stage& final_stage() const { return stages.back(); }

    /// Measurement units of the final (full) Hamiltonian stage.
    std::size_t full_units() const { return stages.back().measurement_units; }

    unsigned total_iterations() const {
        unsigned total = 0;
        for (const auto& s : stages) total += s.iterations;
        return total;
    }
};

/**
 * Keeps exactly the terms with |c_k| >= cutoff. Equality keeps the term
 * (inclusive Heaviside convention) and the identity term is always kept so
 * every stage reports energies on the same absolute scale.
 */
inline QubitHamiltonian truncate_by_cutoff(const QubitHamiltonian& h, double cutoff) {
    if (cutoff <= 0.0) {
        throw std::invalid_argument("truncate_by_cutoff: cutoff must be positive");
    }
    return filter_terms(h, [cutoff](const PauliTerm& t) {
        return std::abs(t.coefficient) >= cutoff || t.string.is_identity();
    });
}

/**
 * Cutoff ladder: stages run from the most truncated Hamiltonian (largest
 * cutoff) to the full one, so each stage's term set contains the previous
 * stage's. Budgets supply one iteration count per stage, the last entry
 * belonging to the full-Hamiltonian stage.
 */
inline StageSchedule build_cutoff_ladder(const QubitHamiltonian& h, const CutoffSchedule& schedule,
                                         const std::vector<unsigned>& iterations) {
    schedule.validate();
    if (iterations.size() != schedule.cutoffs.size() + 1) {
        throw std::invalid_argument("build_cutoff_ladder: need one budget per cutoff plus one "
                                    "for the full stage");
    }
    StageSchedule out;
    char label[64];
    for (std::size_t i = 0; i < schedule.cutoffs.size(); ++i) {
        QubitHamiltonian trunc = truncate_by_cutoff(h, schedule.cutoffs[i]);
        std::snprintf(label, sizeof(label), "cutoff=%g", schedule.cutoffs[i]);
        out.stages.push_back(
            {label, std::move(trunc), iterations[i], 0});
        out.stages.back().measurement_units = out.stages.back().hamiltonian.num_terms();
    }
    out.stages.push_back({"full", h, iterations.back(), h.num_terms()});
    return out;
}

/**
 * Classification ladder: H3 = num+cou, then cumulative additions of the exc,
 * nex and dex fragments, each stage JW-mapped and simplified. The H3 stage is
 * a single qubit-wise commuting Z-string set and costs one measurement unit;
 * later stages cost their term count.
 */
inline StageSchedule build_classification_ladder(const ClassifiedHamiltonian& c,
                                                 const std::array<unsigned, 4>& iterations) {
    QubitHamiltonian h3 = add(jordan_wigner(c.num), jordan_wigner(c.cou));
    QubitHamiltonian h2 = add(h3, jordan_wigner(c.exc));
    QubitHamiltonian h1 = add(h2, jordan_wigner(c.nex));
    QubitHamiltonian hq = add(h1, jordan_wigner(c.dex));
    StageSchedule out;
    out.stages.push_back({"H3", std::move(h3), iterations[0], 1});
    out.stages.push_back({"H2", std::move(h2), iterations[1], 0});
    out.stages.push_back({"H1", std::move(h1), iterations[2], 0});
    out.stages.push_back({"Hq", std::move(hq), iterations[3], 0});
    for (std::size_t i = 1; i < out.stages.size(); ++i) {
        out.stages[i].measurement_units = out.stages[i].hamiltonian.num_terms();
    }
    return out;
}

/// Text manifest consumed by the CLI and embedded in run reports.
inline void write_stage_manifest(const StageSchedule& schedule, std::ostream& os) {
    os << "stage\tlabel\tterms\tmeasurement_units\titerations\n";
    for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
        const auto& s = schedule.stages[i];
        os << i << '\t' << s.label << '\t' << s.hamiltonian.num_terms() << '\t'
           << s.measurement_units << '\t' << s.iterations << '\n';
    }
}

}  // namespace stagedvqe
