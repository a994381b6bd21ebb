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

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "stagedvqe/pauli.hpp"

namespace stagedvqe {

struct FermionOp {
    unsigned mode = 0;
    bool dagger = false;
};

/**
 * One normal-ordered product of ladder operators with its coefficient.
 * Lengths 0/2/4 correspond to the constant, one-body and two-body pieces;
 * all daggered operators precede the undaggered ones. For two-body terms the
 * coefficient already carries the 1/2 prefactor of the Hamiltonian.
 */
struct FermionTerm {
    double coefficient = 0.0;
    std::vector<FermionOp> ops;
};

enum class OperatorClass { Num = 0, Cou = 1, Exc = 2, Nex = 3, Dex = 4 };

inline const char* operator_class_name(OperatorClass c) {
    static const char* names[] = {"num", "cou", "exc", "nex", "dex"};
    return names[static_cast<int>(c)];
}

/**
 * Second-quantized Hamiltonian over M spin-orbitals:
 *
 *   H = constant + sum_ij h_ij a+_i a_j
 *                + 1/2 sum_ijkl h_ijkl a+_i a+_j a_k a_l
 *
 * one_body and two_body store h_ij and h_ijkl directly (Hartree); the 1/2 is
 * applied when terms are enumerated or mapped. Energies are in Hartree, the
 * constant holds nuclear repulsion plus any frozen-core offset.
 */
class FermionHamiltonian {
  public:
    explicit FermionHamiltonian(std::size_t num_modes)
        : num_modes_(num_modes),
          constant_(0.0),
          one_body_(num_modes * num_modes, 0.0),
          two_body_(num_modes * num_modes * num_modes * num_modes, 0.0) {
        if (num_modes == 0) {
            throw std::invalid_argument("FermionHamiltonian requires at least one mode");
        }
    }

    std::size_t num_modes() const { return num_modes_; }

    double constant() const { return constant_; }
    void set_constant(double c) { constant_ = c; }

    double one_body(std::size_t i, std::size_t j) const {
        return one_body_[i * num_modes_ + j];
    }
    void set_one_body(std::size_t i, std::size_t j, double v) {
        one_body_[i * num_modes_ + j] = v;
    }

    double two_body(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return two_body_[((i * num_modes_ + j) * num_modes_ + k) * num_modes_ + l];
    }
    void set_two_body(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double v) {
        two_body_[((i * num_modes_ + j) * num_modes_ + k) * num_modes_ + l] = v;
    }

    /// Max |h_ij - h_ji| (real orbitals make the one-body tensor symmetric).
    double one_body_asymmetry() const {
        double m = 0.0;
        for (std::size_t i = 0; i < num_modes_; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                m = std::max(m, std::abs(one_body(i, j) - one_body(j, i)));
            }
        }
        return m;
    }

    /// Max |h_ijkl - h_lkji| (Hermiticity of the two-body tensor).
    double two_body_hermiticity_violation() const {
        double m = 0.0;
        for (std::size_t i = 0; i < num_modes_; ++i) {
            for (std::size_t j = 0; j < num_modes_; ++j) {
                for (std::size_t k = 0; k < num_modes_; ++k) {
                    for (std::size_t l = 0; l < num_modes_; ++l) {
                        m = std::max(m, std::abs(two_body(i, j, k, l) - two_body(l, k, j, i)));
                    }
                }
            }
        }
        return m;
    }

    void validate(double tolerance = 1e-10) const {
        if (one_body_asymmetry() > tolerance) {
            throw std::runtime_error("one-body tensor is not symmetric");
        }
        if (two_body_hermiticity_violation() > tolerance) {
            throw std::runtime_error("two-body tensor violates Hermiticity");
        }
    }

    /**
     * All nonzero canonical terms. Two-body entries with a repeated creation
     * or annihilation index vanish identically (a+_i a+_i = 0) and are
     * skipped; the 1/2 prefactor is folded into the coefficients here.
     * The constant is emitted as a length-0 term when nonzero.
     */
    std::vector<FermionTerm> canonical_terms() const {
        std::vector<FermionTerm> out;
        if (constant_ != 0.0) {
            out.push_back({constant_, {}});
        }
        for (unsigned i = 0; i < num_modes_; ++i) {
            for (unsigned j = 0; j < num_modes_; ++j) {
                const double v = one_body(i, j);
                if (std::abs(v) >= kDropTolerance) {
                    out.push_back({v, {{i, true}, {j, false}}});
                }
            }
        }
        for (unsigned i = 0; i < num_modes_; ++i) {
            for (unsigned j = 0; j < num_modes_; ++j) {
                if (i == j) continue;
                for (unsigned k = 0; k < num_modes_; ++k) {
                    for (unsigned l = 0; l < num_modes_; ++l) {
                        if (k == l) continue;
                        const double v = 0.5 * two_body(i, j, k, l);
                        if (std::abs(v) >= kDropTolerance) {
                            out.push_back({v, {{i, true}, {j, true}, {k, false}, {l, false}}});
                        }
                    }
                }
            }
        }
        return out;
    }

    bool is_zero() const {
        if (constant_ != 0.0) return false;
        for (double v : one_body_) {
            if (v != 0.0) return false;
        }
        for (double v : two_body_) {
            if (v != 0.0) return false;
        }
        return true;
    }

  private:
    std::size_t num_modes_;
    double constant_;
    std::vector<double> one_body_;
    std::vector<double> two_body_;
};

/// Class of a canonical term by its mode-index multiset (§ one-/two-body split).
inline OperatorClass classify_term(const FermionTerm& t) {
    if (t.ops.size() == 2) {
        return t.ops[0].mode == t.ops[1].mode ? OperatorClass::Num : OperatorClass::Exc;
    }
    if (t.ops.size() == 4) {
        std::array<unsigned, 4> idx = {t.ops[0].mode, t.ops[1].mode, t.ops[2].mode, t.ops[3].mode};
        std::sort(idx.begin(), idx.end());
        int distinct = 1;
        for (int i = 1; i < 4; ++i) {
            if (idx[i] != idx[i - 1]) ++distinct;
        }
        switch (distinct) {
            case 2: return OperatorClass::Cou;
            case 3: return OperatorClass::Nex;
            case 4: return OperatorClass::Dex;
            default:
                throw std::invalid_argument("two-body term with one distinct index is zero");
        }
    }
    throw std::invalid_argument("only one- and two-body terms are classified");
}

/**
 * The five-way split of a Hamiltonian into number, coulomb, excitation,
 * number-excitation and double-excitation fragments. The constant rides with
 * the num fragment (it belongs to the first optimization stage and is
 * measurement-free). Fragment tensors sum back to the source.
 */
struct ClassifiedHamiltonian {
    FermionHamiltonian num;
    FermionHamiltonian cou;
    FermionHamiltonian exc;
    FermionHamiltonian nex;
    FermionHamiltonian dex;

    std::size_t num_modes() const { return num.num_modes(); }

    const FermionHamiltonian& fragment(OperatorClass c) const {
        switch (c) {
            case OperatorClass::Num: return num;
            case OperatorClass::Cou: return cou;
            case OperatorClass::Exc: return exc;
            case OperatorClass::Nex: return nex;
            case OperatorClass::Dex: return dex;
        }
        throw std::logic_error("unreachable");
    }
};

inline ClassifiedHamiltonian classify(const FermionHamiltonian& h) {
    const std::size_t m = h.num_modes();
    ClassifiedHamiltonian c{FermionHamiltonian(m), FermionHamiltonian(m), FermionHamiltonian(m),
                            FermionHamiltonian(m), FermionHamiltonian(m)};
    c.num.set_constant(h.constant());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v = h.one_body(i, j);
            if (v == 0.0) continue;
            (i == j ? c.num : c.exc).set_one_body(i, j, v);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;  // a+_i a+_i = 0
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t l = 0; l < m; ++l) {
                    if (k == l) continue;
                    const double v = h.two_body(i, j, k, l);
                    if (v == 0.0) continue;
                    std::array<std::size_t, 4> idx = {i, j, k, l};
                    std::sort(idx.begin(), idx.end());
                    int distinct = 1;
                    for (int p = 1; p < 4; ++p) {
                        if (idx[p] != idx[p - 1]) ++distinct;
                    }
                    FermionHamiltonian* dst = nullptr;
                    if (distinct == 2) {
                        dst = &c.cou;
                    } else if (distinct == 3) {
                        dst = &c.nex;
                    } else {
                        dst = &c.dex;
                    }
                    dst->set_two_body(i, j, k, l, v);
                }
            }
        }
    }
    return c;
}

namespace detail {

/// The two Pauli pieces of a JW ladder operator on qubit j:
/// a+_j = (X - iY)/2 * Z-string, a_j = (X + iY)/2 * Z-string.
inline std::array<std::pair<std::complex<double>, PauliString>, 2> jw_ladder(
    std::size_t num_qubits, unsigned mode, bool dagger) {
    PauliString x_part(num_qubits);
    for (unsigned q = 0; q < mode; ++q) x_part.set_factor(q, Pauli::Z);
    PauliString y_part = x_part;
    x_part.set_factor(mode, Pauli::X);
    y_part.set_factor(mode, Pauli::Y);
    const std::complex<double> y_coeff = dagger ? std::complex<double>(0, -0.5)
                                                : std::complex<double>(0, 0.5);
    return {{{0.5, x_part}, {y_coeff, y_part}}};
}

inline void jw_accumulate_term(PauliAccumulator& acc, std::size_t num_qubits,
                               const FermionTerm& term) {
    if (term.ops.empty()) {
        acc.add(PauliString::identity(num_qubits), term.coefficient);
        return;
    }
    std::vector<std::pair<std::complex<double>, PauliString>> partial = {
        {term.coefficient, PauliString::identity(num_qubits)}};
    for (const auto& op : term.ops) {
        const auto ladder = jw_ladder(num_qubits, op.mode, op.dagger);
        std::vector<std::pair<std::complex<double>, PauliString>> next;
        next.reserve(partial.size() * 2);
        for (const auto& [c, s] : partial) {
            for (const auto& [lc, ls] : ladder) {
                auto [phase, prod] = multiply(s, ls);
                next.emplace_back(c * lc * phase, prod);
            }
        }
        partial = std::move(next);
    }
    for (const auto& [c, s] : partial) acc.add(s, c);
}

}  // namespace detail

/**
 * Jordan-Wigner map to a qubit Hamiltonian on N = M qubits. Products are
 * expanded and simplified; the result must be real (Hermitian source) and is
 * pruned at the drop tolerance.
 */
inline QubitHamiltonian jordan_wigner(const FermionHamiltonian& h) {
    PauliAccumulator acc(h.num_modes());
    for (const auto& term : h.canonical_terms()) {
        detail::jw_accumulate_term(acc, h.num_modes(), term);
    }
    return acc.finalize();
}

struct ClassProfileEntry {
    OperatorClass op_class = OperatorClass::Num;
    std::size_t term_count = 0;
    double coefficient_norm_sum = 0.0;  // sum of |coefficient| over canonical terms
};

/// Per-class counts and L1 norms over canonical fermionic terms (two-body
/// coefficients carry the 1/2 prefactor, as mapped). The constant is not a
/// ladder product and is not counted.
inline std::array<ClassProfileEntry, 5> class_norm_profile(const ClassifiedHamiltonian& c) {
    std::array<ClassProfileEntry, 5> profile;
    for (int k = 0; k < 5; ++k) {
        const auto cls = static_cast<OperatorClass>(k);
        profile[k].op_class = cls;
        for (const auto& t : c.fragment(cls).canonical_terms()) {
            if (t.ops.empty()) continue;
            profile[k].term_count += 1;
            profile[k].coefficient_norm_sum += std::abs(t.coefficient);
        }
    }
    return profile;
}

}  // namespace stagedvqe
