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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "stagedvqe/fermion.hpp"
#include "stagedvqe/pauli.hpp"

namespace stagedvqe {

/// Dense amplitudes cap; mirrors the largest systems in scope (16 qubits).
inline constexpr std::size_t kMaxSimulatorQubits = 16;

using Amplitude = std::complex<double>;

/// Dense 2^N statevector, qubit q = bit q of the basis index.
class StateVector {
  public:
    explicit StateVector(std::size_t num_qubits)
        : num_qubits_(num_qubits), amps_(std::size_t(1) << num_qubits, Amplitude(0, 0)) {
        if (num_qubits == 0 || num_qubits > kMaxSimulatorQubits) {
            throw std::invalid_argument("StateVector supports 1.." +
                                        std::to_string(kMaxSimulatorQubits) + " qubits");
        }
    }

    static StateVector zero_state(std::size_t num_qubits) {
        StateVector s(num_qubits);
        s.amps_[0] = 1.0;
        return s;
    }

    /// Computational basis state |bits>, bit q of `bits` = occupation of qubit q.
    static StateVector basis_state(std::size_t num_qubits, std::uint64_t bits) {
        StateVector s(num_qubits);
        s.amps_[bits & ((std::size_t(1) << num_qubits) - 1)] = 1.0;
        return s;
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<Amplitude>& amplitudes() const { return amps_; }
    std::vector<Amplitude>& amplitudes() { return amps_; }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    void apply_ry(std::size_t qubit, double theta) {
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        const std::size_t bit = std::size_t(1) << qubit;
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            if (b & bit) continue;
            const Amplitude a0 = amps_[b];
            const Amplitude a1 = amps_[b | bit];
            amps_[b] = c * a0 - s * a1;
            amps_[b | bit] = s * a0 + c * a1;
        }
    }

    void apply_cz(std::size_t q1, std::size_t q2) {
        const std::size_t mask = (std::size_t(1) << q1) | (std::size_t(1) << q2);
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            if ((b & mask) == mask) amps_[b] = -amps_[b];
        }
    }

    void apply_x(std::size_t qubit) {
        const std::size_t bit = std::size_t(1) << qubit;
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            if (!(b & bit)) std::swap(amps_[b], amps_[b | bit]);
        }
    }

    /// In-place exp(i*angle*P)|psi> = cos(angle)|psi> + i sin(angle) P|psi>.
    void apply_pauli_rotation(const PauliString& p, double angle) {
        require_width(p);
        const std::uint64_t x = p.x_mask_word(0);
        const std::uint64_t z = p.z_mask_word(0);
        const int y_count = popcount(p.y_mask_word(0));
        const Amplitude cos_part(std::cos(angle), 0);
        const Amplitude i_sin = Amplitude(0, std::sin(angle)) * i_power(y_count);
        std::vector<Amplitude> out(amps_.size());
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            const Amplitude flip = amps_[b ^ x];
            const double sign = parity(static_cast<std::uint64_t>(b ^ x) & z) ? -1.0 : 1.0;
            out[b] = cos_part * amps_[b] + i_sin * sign * flip;
        }
        amps_ = std::move(out);
    }

    /// <psi|P|psi>.
    double pauli_expectation(const PauliString& p) const {
        require_width(p);
        const std::uint64_t x = p.x_mask_word(0);
        const std::uint64_t z = p.z_mask_word(0);
        const Amplitude phase = i_power(popcount(p.y_mask_word(0)));
        Amplitude acc(0, 0);
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            const double sign = parity(static_cast<std::uint64_t>(b) & z) ? -1.0 : 1.0;
            acc += std::conj(amps_[b ^ x]) * (phase * sign * amps_[b]);
        }
        return acc.real();
    }

  private:
    static int popcount(std::uint64_t v) {
        return __builtin_popcountll(v);
    }
    static bool parity(std::uint64_t v) { return popcount(v) & 1; }
    static Amplitude i_power(int n) {
        static const Amplitude table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return table[n & 3];
    }
    void require_width(const PauliString& p) const {
        if (p.num_qubits() != num_qubits_) {
            throw std::invalid_argument("Pauli string width does not match state");
        }
    }

    std::size_t num_qubits_;
    std::vector<Amplitude> amps_;
};

/// Sum_k c_k <psi|P_k|psi>, evaluated exactly (no sampling).
inline double expectation(const StateVector& state, const QubitHamiltonian& h) {
    if (state.num_qubits() != h.num_qubits()) {
        throw std::invalid_argument("expectation: qubit counts differ");
    }
    double e = 0.0;
    for (const auto& t : h.terms()) {
        e += t.coefficient * state.pauli_expectation(t.string);
    }
    return e;
}

/**
 * Parameterized circuit family. TWO_LOCAL is the hardware-efficient pattern:
 * an Ry rotation layer, a linear chain of CZ entanglers (qubit q with q+1),
 * repeated, with a final rotation layer; N*(repetitions+1) parameters.
 * UCCSD prepares the Hartree-Fock bitstring and applies one first-order
 * Trotter step of the excitation exponentials, singles (ascending) then
 * doubles (ascending), one parameter per generator.
 */
class Ansatz {
  public:
    enum class Kind { TwoLocal, Uccsd };

    /// One anti-Hermitian excitation generator t(T - T+); JW gives purely
    /// imaginary weights i*c on mutually commuting strings, stored as (P, c)
    /// so exp(theta*G) = prod_k exp(i theta c_k P_k) holds exactly.
    struct ExcitationGenerator {
        std::string label;
        std::vector<std::pair<PauliString, double>> rotations;
    };

    static Ansatz two_local(std::size_t num_qubits, unsigned repetitions) {
        Ansatz a;
        a.kind_ = Kind::TwoLocal;
        a.num_qubits_ = num_qubits;
        a.repetitions_ = repetitions;
        a.num_parameters_ = num_qubits * (repetitions + 1);
        return a;
    }

    static Ansatz uccsd(std::size_t num_modes, std::size_t num_electrons) {
        if (num_electrons > num_modes) {
            throw std::invalid_argument("uccsd: more electrons than modes");
        }
        Ansatz a;
        a.kind_ = Kind::Uccsd;
        a.num_qubits_ = num_modes;
        a.num_electrons_ = num_electrons;
        for (std::size_t q = 0; q < num_electrons; ++q) a.hf_bits_ |= std::uint64_t(1) << q;

        auto spin = [](std::size_t mode) { return mode % 2; };
        // singles, ascending (occupied, virtual), spin conserving
        for (std::size_t i = 0; i < num_electrons; ++i) {
            for (std::size_t v = num_electrons; v < num_modes; ++v) {
                if (spin(i) != spin(v)) continue;
                FermionTerm t{1.0, {{static_cast<unsigned>(v), true},
                                    {static_cast<unsigned>(i), false}}};
                FermionTerm t_dag{-1.0, {{static_cast<unsigned>(i), true},
                                         {static_cast<unsigned>(v), false}}};
                a.generators_.push_back(make_generator(
                    num_modes, {t, t_dag},
                    "s_" + std::to_string(i) + "->" + std::to_string(v)));
            }
        }
        // doubles, ascending (i<j occupied, v<w virtual), Sz conserving
        for (std::size_t i = 0; i < num_electrons; ++i) {
            for (std::size_t j = i + 1; j < num_electrons; ++j) {
                for (std::size_t v = num_electrons; v < num_modes; ++v) {
                    for (std::size_t w = v + 1; w < num_modes; ++w) {
                        if (spin(i) + spin(j) != spin(v) + spin(w)) continue;
                        FermionTerm t{1.0,
                                      {{static_cast<unsigned>(v), true},
                                       {static_cast<unsigned>(w), true},
                                       {static_cast<unsigned>(j), false},
                                       {static_cast<unsigned>(i), false}}};
                        FermionTerm t_dag{-1.0,
                                          {{static_cast<unsigned>(i), true},
                                           {static_cast<unsigned>(j), true},
                                           {static_cast<unsigned>(w), false},
                                           {static_cast<unsigned>(v), false}}};
                        a.generators_.push_back(make_generator(
                            num_modes, {t, t_dag},
                            "d_" + std::to_string(i) + "," + std::to_string(j) + "->" +
                                std::to_string(v) + "," + std::to_string(w)));
                    }
                }
            }
        }
        a.num_parameters_ = a.generators_.size();
        return a;
    }

    Kind kind() const { return kind_; }
    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t num_parameters() const { return num_parameters_; }
    unsigned repetitions() const { return repetitions_; }
    std::size_t num_electrons() const { return num_electrons_; }
    std::uint64_t hartree_fock_bits() const { return hf_bits_; }
    const std::vector<ExcitationGenerator>& generators() const { return generators_; }

    std::string description() const {
        if (kind_ == Kind::TwoLocal) {
            return "two_local(ry+cz_linear, repetitions=" + std::to_string(repetitions_) + ")";
        }
        return "uccsd(single_trotter_step, generators=" + std::to_string(generators_.size()) + ")";
    }

  private:
    static ExcitationGenerator make_generator(std::size_t num_modes,
                                              const std::vector<FermionTerm>& terms,
                                              std::string label) {
        PauliAccumulator acc(num_modes);
        for (const auto& t : terms) detail::jw_accumulate_term(acc, num_modes, t);
        ExcitationGenerator g;
        g.label = std::move(label);
        // anti-Hermitian: coefficients must be purely imaginary
        for (const auto& [s, c] : acc.terms()) {
            if (std::abs(c.real()) > 1e-12) {
                throw std::logic_error("excitation generator has a real Pauli component");
            }
            if (std::abs(c.imag()) >= kDropTolerance) {
                g.rotations.emplace_back(s, c.imag());
            }
        }
        std::sort(g.rotations.begin(), g.rotations.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return g;
    }

    Kind kind_ = Kind::TwoLocal;
    std::size_t num_qubits_ = 0;
    std::size_t num_parameters_ = 0;
    unsigned repetitions_ = 0;
    std::size_t num_electrons_ = 0;
    std::uint64_t hf_bits_ = 0;
    std::vector<ExcitationGenerator> generators_;
};

/// Exact statevector of U(theta)|0...0> (TWO_LOCAL) or of the Trotterized
/// UCCSD circuit applied to the Hartree-Fock bitstring.
inline StateVector prepare_state(const Ansatz& ansatz, const std::vector<double>& parameters) {
    if (parameters.size() != ansatz.num_parameters()) {
        throw std::invalid_argument("prepare_state: expected " +
                                    std::to_string(ansatz.num_parameters()) + " parameters, got " +
                                    std::to_string(parameters.size()));
    }
    const std::size_t n = ansatz.num_qubits();
    if (ansatz.kind() == Ansatz::Kind::TwoLocal) {
        StateVector state = StateVector::zero_state(n);
        std::size_t p = 0;
        for (unsigned rep = 0; rep < ansatz.repetitions(); ++rep) {
            for (std::size_t q = 0; q < n; ++q) state.apply_ry(q, parameters[p++]);
            for (std::size_t q = 0; q + 1 < n; ++q) state.apply_cz(q, q + 1);
        }
        for (std::size_t q = 0; q < n; ++q) state.apply_ry(q, parameters[p++]);
        return state;
    }
    StateVector state = StateVector::basis_state(n, ansatz.hartree_fock_bits());
    const auto& gens = ansatz.generators();
    for (std::size_t g = 0; g < gens.size(); ++g) {
        for (const auto& [pauli, c] : gens[g].rotations) {
            state.apply_pauli_rotation(pauli, parameters[g] * c);
        }
    }
    return state;
}

/**
 * Smallest eigenvalue via matrix-free Lanczos with full reorthogonalization.
 * Two independent deterministic starting vectors guard against an unlucky
 * start; the tridiagonal eigenproblem is solved densely.
 */
inline double exact_ground_energy(const QubitHamiltonian& h, std::size_t max_qubits = 16) {
    if (h.num_qubits() > max_qubits) {
        throw std::invalid_argument("exact_ground_energy: qubit budget exceeded (" +
                                    std::to_string(h.num_qubits()) + " > " +
                                    std::to_string(max_qubits) + ")");
    }
    if (h.empty()) return 0.0;
    const std::size_t dim = std::size_t(1) << h.num_qubits();

    struct TermAction {
        std::uint64_t x, z;
        Amplitude scale;  // c_k * i^{#Y}
    };
    std::vector<TermAction> actions;
    actions.reserve(h.num_terms());
    static const Amplitude kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& t : h.terms()) {
        const int y = __builtin_popcountll(t.string.y_mask_word(0));
        actions.push_back({t.string.x_mask_word(0), t.string.z_mask_word(0),
                           t.coefficient * kIPow[y & 3]});
    }
    auto apply_h = [&](const std::vector<Amplitude>& in, std::vector<Amplitude>& out) {
        std::fill(out.begin(), out.end(), Amplitude(0, 0));
        for (const auto& a : actions) {
            for (std::size_t b = 0; b < dim; ++b) {
                const double sign = (__builtin_popcountll(b & a.z) & 1) ? -1.0 : 1.0;
                out[b ^ a.x] += a.scale * sign * in[b];
            }
        }
    };

    const std::size_t max_steps = std::min<std::size_t>(dim, 160);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed : {0x5eedull, 0xa17e5ull}) {
        std::mt19937_64 rng(seed);
        std::vector<std::vector<Amplitude>> basis;
        std::vector<double> alpha, beta;
        std::vector<Amplitude> v(dim), w(dim);
        for (auto& a : v) {
            a = Amplitude((rng() >> 11) * 0x1p-53 - 0.5, (rng() >> 11) * 0x1p-53 - 0.5);
        }
        double nrm = 0.0;
        for (const auto& a : v) nrm += std::norm(a);
        nrm = std::sqrt(nrm);
        for (auto& a : v) a /= nrm;

        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < max_steps; ++j) {
            basis.push_back(v);
            apply_h(v, w);
            Amplitude a(0, 0);
            for (std::size_t b = 0; b < dim; ++b) a += std::conj(v[b]) * w[b];
            alpha.push_back(a.real());
            // w -= alpha*v + beta*v_prev, then full reorthogonalization
            for (std::size_t b = 0; b < dim; ++b) w[b] -= a * v[b];
            if (j > 0) {
                for (std::size_t b = 0; b < dim; ++b) w[b] -= beta.back() * basis[j - 1][b];
            }
            for (const auto& u : basis) {
                Amplitude overlap(0, 0);
                for (std::size_t b = 0; b < dim; ++b) overlap += std::conj(u[b]) * w[b];
                for (std::size_t b = 0; b < dim; ++b) w[b] -= overlap * u[b];
            }
            double bnorm = 0.0;
            for (const auto& x : w) bnorm += std::norm(x);
            bnorm = std::sqrt(bnorm);

            // lowest Ritz value of the current tridiagonal
            Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
            Eigen::VectorXd sub(std::max<std::size_t>(alpha.size(), 1) - 1);
            for (std::size_t k = 0; k + 1 < alpha.size(); ++k) sub[k] = beta[k];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
            const double low = es.eigenvalues()(0);

            if (bnorm < 1e-13) {
                prev = low;
                break;  // invariant subspace exhausted
            }
            if (j >= 4 && std::abs(low - prev) < 1e-13 * std::max(1.0, std::abs(low))) {
                prev = low;
                break;
            }
            prev = low;
            beta.push_back(bnorm);
            for (std::size_t b = 0; b < dim; ++b) v[b] = w[b] / bnorm;
        }
        best = std::min(best, prev);
    }
    return best;
}

/**
 * Analytic gradient of expectation(prepare_state(ansatz, .), h) via shift
 * rules: the two-term rule for Ry parameters, the four-term rule for
 * excitation parameters (whose generators have eigenvalues {0, +-i}).
 */
inline std::vector<double> parameter_shift_gradient(const Ansatz& ansatz,
                                                    const std::vector<double>& parameters,
                                                    const QubitHamiltonian& h) {
    auto energy_at = [&](std::vector<double> theta) {
        return expectation(prepare_state(ansatz, theta), h);
    };
    std::vector<double> grad(parameters.size(), 0.0);
    const double half_pi = M_PI / 2, quarter_pi = M_PI / 4;
    for (std::size_t p = 0; p < parameters.size(); ++p) {
        auto shifted = [&](double s) {
            std::vector<double> t = parameters;
            t[p] += s;
            return energy_at(t);
        };
        if (ansatz.kind() == Ansatz::Kind::TwoLocal) {
            grad[p] = (shifted(half_pi) - shifted(-half_pi)) / 2.0;
        } else {
            const double d_half = shifted(half_pi) - shifted(-half_pi);
            const double d_quarter = shifted(quarter_pi) - shifted(-quarter_pi);
            grad[p] = d_quarter - (std::sqrt(2.0) - 1.0) / 2.0 * d_half;
        }
    }
    return grad;
}

/**
 * Shot-sampled estimate of the expectation value: every term inside a
 * qubit-wise commuting group is read from the same `shots` repetitions,
 * modeled as a binomial draw around the exact single-term expectation. The
 * identity contribution is added exactly. Deterministic given the RNG state.
 */
inline double expectation_sampled(const StateVector& state, const QubitHamiltonian& h,
                                  std::size_t shots, std::mt19937_64& rng) {
    if (shots == 0) return expectation(state, h);
    double e = h.identity_coefficient();
    for (const auto& group : qubitwise_commuting_groups(h)) {
        for (const auto& t : group) {
            const double exact = state.pauli_expectation(t.string);
            const double p = std::min(1.0, std::max(0.0, 0.5 * (1.0 + exact)));
            std::binomial_distribution<std::uint64_t> dist(shots, p);
            const double mean = static_cast<double>(dist(rng)) / static_cast<double>(shots);
            e += t.coefficient * (2.0 * mean - 1.0);
        }
    }
    return e;
}

/// Debug dump: one `index real imag` line per amplitude.
inline void dump_statevector(const StateVector& state, std::ostream& os) {
    char buf[128];
    const auto& amps = state.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g", b, amps[b].real(), amps[b].imag());
        os << buf << '\n';
    }
}

}  // namespace stagedvqe
