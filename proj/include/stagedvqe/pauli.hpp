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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stagedvqe {

namespace detail {
inline int count_trailing_zeros(std::uint64_t v) {
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_ctzll(v);
#else
    int c = 0;
    while (!(v & 1)) {
        v >>= 1;
        ++c;
    }
    return c;
#endif
}
}  // namespace detail

/// Coefficients with absolute value below this are treated as floating-point
/// residue and removed whenever a Hamiltonian is (re)normalized.
inline constexpr double kDropTolerance = 1e-12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_to_char(Pauli p) {
    return "IXYZ"[static_cast<int>(p)];
}

inline Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw std::invalid_argument(std::string("invalid Pauli character '") + c + "'");
    }
}

/**
 * Tensor product of N single-qubit Pauli factors.
 *
 * Factors are stored as two bitplanes holding the low/high bit of the factor
 * code (I=0, X=1, Y=2, Z=3), so the factor-wise product reduces to XOR of the
 * planes plus a phase. Qubit 0 is the leftmost character in the text label.
 */
class PauliString {
  public:
    PauliString() : num_qubits_(0) {}

    explicit PauliString(std::size_t num_qubits)
        : num_qubits_(num_qubits),
          bit0_(word_count(num_qubits), 0),
          bit1_(word_count(num_qubits), 0) {
        if (num_qubits == 0) {
            throw std::invalid_argument("PauliString requires at least one qubit");
        }
    }

    static PauliString identity(std::size_t num_qubits) {
        return PauliString(num_qubits);
    }

    static PauliString from_label(const std::string& label) {
        PauliString p(label.size());
        for (std::size_t q = 0; q < label.size(); ++q) {
            p.set_factor(q, pauli_from_char(label[q]));
        }
        return p;
    }

    /// Single non-identity factor on one qubit, identity elsewhere.
    static PauliString single(std::size_t num_qubits, std::size_t qubit, Pauli p) {
        PauliString s(num_qubits);
        s.set_factor(qubit, p);
        return s;
    }

    std::size_t num_qubits() const { return num_qubits_; }

    Pauli factor(std::size_t qubit) const {
        const std::size_t w = qubit >> 6, b = qubit & 63;
        const int code = static_cast<int>((bit0_[w] >> b) & 1) |
                         (static_cast<int>((bit1_[w] >> b) & 1) << 1);
        return static_cast<Pauli>(code);
    }

    void set_factor(std::size_t qubit, Pauli p) {
        if (qubit >= num_qubits_) {
            throw std::out_of_range("qubit index out of range");
        }
        const std::size_t w = qubit >> 6, b = qubit & 63;
        const auto code = static_cast<std::uint64_t>(p);
        bit0_[w] = (bit0_[w] & ~(1ull << b)) | ((code & 1) << b);
        bit1_[w] = (bit1_[w] & ~(1ull << b)) | (((code >> 1) & 1) << b);
    }

    bool is_identity() const {
        for (std::size_t w = 0; w < bit0_.size(); ++w) {
            if (bit0_[w] | bit1_[w]) return false;
        }
        return true;
    }

    /// True when every factor is I or Z.
    bool is_z_only() const {
        for (std::size_t w = 0; w < bit0_.size(); ++w) {
            if (bit0_[w] ^ bit1_[w]) return false;
        }
        return true;
    }

    std::size_t weight() const {
        std::size_t n = 0;
        for (std::size_t w = 0; w < bit0_.size(); ++w) {
            n += static_cast<std::size_t>(popcount64(bit0_[w] | bit1_[w]));
        }
        return n;
    }

    /// Qubit-wise commutation: on every qubit the factors are equal or one is I.
    bool qubitwise_commutes(const PauliString& other) const {
        require_same_size(other);
        for (std::size_t w = 0; w < bit0_.size(); ++w) {
            const std::uint64_t non_i_a = bit0_[w] | bit1_[w];
            const std::uint64_t non_i_b = other.bit0_[w] | other.bit1_[w];
            const std::uint64_t differ = (bit0_[w] ^ other.bit0_[w]) | (bit1_[w] ^ other.bit1_[w]);
            if (non_i_a & non_i_b & differ) return false;
        }
        return true;
    }

    /// Bitmask of qubits whose factor flips basis states (X or Y), low word first.
    std::uint64_t x_mask_word(std::size_t w) const { return bit0_[w] ^ bit1_[w]; }
    /// Bitmask of qubits whose factor is diagonal-signed (Z or Y).
    std::uint64_t z_mask_word(std::size_t w) const { return bit1_[w]; }
    /// Bitmask of Y factors.
    std::uint64_t y_mask_word(std::size_t w) const { return ~bit0_[w] & bit1_[w]; }
    std::size_t word_count() const { return bit0_.size(); }

    std::string label() const {
        std::string s(num_qubits_, 'I');
        for (std::size_t q = 0; q < num_qubits_; ++q) {
            s[q] = pauli_to_char(factor(q));
        }
        return s;
    }

    bool operator==(const PauliString& other) const {
        return num_qubits_ == other.num_qubits_ && bit0_ == other.bit0_ && bit1_ == other.bit1_;
    }
    bool operator!=(const PauliString& other) const { return !(*this == other); }

    /// Total order matching lexicographic order of the text label (I < X < Y < Z).
    bool operator<(const PauliString& other) const {
        if (num_qubits_ != other.num_qubits_) return num_qubits_ < other.num_qubits_;
        for (std::size_t q = 0; q < num_qubits_; ++q) {
            const auto a = factor(q), b = other.factor(q);
            if (a != b) return static_cast<int>(a) < static_cast<int>(b);
        }
        return false;
    }

    std::size_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(num_qubits_);
        for (std::size_t w = 0; w < bit0_.size(); ++w) {
            mix(bit0_[w]);
            mix(bit1_[w]);
        }
        return static_cast<std::size_t>(h);
    }

    friend std::pair<std::complex<double>, PauliString> multiply(const PauliString& a,
                                                                 const PauliString& b);

  private:
    static std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

    static int popcount64(std::uint64_t v) {
#if defined(__GNUC__) || defined(__clang__)
        return __builtin_popcountll(v);
#else
        int c = 0;
        while (v) {
            v &= v - 1;
            ++c;
        }
        return c;
#endif
    }

    void require_same_size(const PauliString& other) const {
        if (num_qubits_ != other.num_qubits_) {
            throw std::invalid_argument("PauliString qubit counts differ (" +
                                        std::to_string(num_qubits_) + " vs " +
                                        std::to_string(other.num_qubits_) + ")");
        }
    }

    std::size_t num_qubits_;
    std::vector<std::uint64_t> bit0_;
    std::vector<std::uint64_t> bit1_;
};

struct PauliStringHash {
    std::size_t operator()(const PauliString& p) const noexcept { return p.hash(); }
};

/**
 * Factor-wise product a*b. Returns the accumulated unit phase (one of
 * {1, i, -1, -i}) and the resulting string.
 */
inline std::pair<std::complex<double>, PauliString> multiply(const PauliString& a,
                                                             const PauliString& b) {
    a.require_same_size(b);
    // i-exponent of the single-qubit product, indexed by [code_a][code_b].
    static constexpr int kPhaseExp[4][4] = {
        {0, 0, 0, 0},
        {0, 0, 1, 3},  // XY = iZ, XZ = -iY
        {0, 3, 0, 1},  // YX = -iZ, YZ = iX
        {0, 1, 3, 0},  // ZX = iY, ZY = -iX
    };
    PauliString out(a.num_qubits_);
    int exponent = 0;
    for (std::size_t w = 0; w < a.bit0_.size(); ++w) {
        out.bit0_[w] = a.bit0_[w] ^ b.bit0_[w];
        out.bit1_[w] = a.bit1_[w] ^ b.bit1_[w];
        std::uint64_t both = (a.bit0_[w] | a.bit1_[w]) & (b.bit0_[w] | b.bit1_[w]);
        while (both) {
            const int bit = detail::count_trailing_zeros(both);
            both &= both - 1;
            const int ca = static_cast<int>((a.bit0_[w] >> bit) & 1) |
                           (static_cast<int>((a.bit1_[w] >> bit) & 1) << 1);
            const int cb = static_cast<int>((b.bit0_[w] >> bit) & 1) |
                           (static_cast<int>((b.bit1_[w] >> bit) & 1) << 1);
            exponent += kPhaseExp[ca][cb];
        }
    }
    static const std::complex<double> kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {kPhases[exponent & 3], out};
}

struct PauliTerm {
    double coefficient = 0.0;
    PauliString string;
};

/**
 * Real-weighted sum of Pauli strings, kept simplified: unique strings, no
 * coefficient below kDropTolerance, every string of the declared width.
 */
class QubitHamiltonian {
  public:
    explicit QubitHamiltonian(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits == 0) {
            throw std::invalid_argument("QubitHamiltonian requires at least one qubit");
        }
    }

    /// Builds from arbitrary (possibly duplicated) terms; merges and prunes.
    static QubitHamiltonian from_terms(std::size_t num_qubits, const std::vector<PauliTerm>& terms) {
        QubitHamiltonian h(num_qubits);
        std::unordered_map<PauliString, double, PauliStringHash> acc;
        for (const auto& t : terms) {
            if (!std::isfinite(t.coefficient)) {
                throw std::invalid_argument("non-finite Pauli term coefficient");
            }
            if (t.string.num_qubits() != num_qubits) {
                throw std::invalid_argument("term qubit count does not match Hamiltonian");
            }
            acc[t.string] += t.coefficient;
        }
        h.assign_from_map(acc);
        return h;
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t num_terms() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Terms in canonical (label-lexicographic) order.
    const std::vector<PauliTerm>& terms() const { return terms_; }

    /// Coefficient of a string, 0 if absent.
    double coefficient(const PauliString& s) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                                   [](const PauliTerm& t, const PauliString& key) {
                                       return t.string < key;
                                   });
        if (it != terms_.end() && it->string == s) return it->coefficient;
        return 0.0;
    }

    double identity_coefficient() const {
        return terms_.empty() ? 0.0 : coefficient(PauliString::identity(num_qubits_));
    }

    std::size_t num_non_identity_terms() const {
        std::size_t n = 0;
        for (const auto& t : terms_) {
            if (!t.string.is_identity()) ++n;
        }
        return n;
    }

    /// Sum of |c_k| over all stored terms.
    double l1_norm() const {
        double s = 0.0;
        for (const auto& t : terms_) s += std::abs(t.coefficient);
        return s;
    }

    bool operator==(const QubitHamiltonian& other) const {
        if (num_qubits_ != other.num_qubits_ || terms_.size() != other.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (terms_[i].string != other.terms_[i].string ||
                terms_[i].coefficient != other.terms_[i].coefficient) {
                return false;
            }
        }
        return true;
    }

  private:
    friend class PauliAccumulator;
    friend QubitHamiltonian add(const QubitHamiltonian&, const QubitHamiltonian&);
    friend QubitHamiltonian filter_terms(const QubitHamiltonian&,
                                         const std::function<bool(const PauliTerm&)>&);

    void assign_from_map(const std::unordered_map<PauliString, double, PauliStringHash>& acc) {
        terms_.clear();
        terms_.reserve(acc.size());
        for (const auto& [s, c] : acc) {
            if (std::abs(c) >= kDropTolerance) terms_.push_back({c, s});
        }
        sort_terms();
    }

    void sort_terms() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const PauliTerm& a, const PauliTerm& b) { return a.string < b.string; });
    }

    std::size_t num_qubits_;
    std::vector<PauliTerm> terms_;
};

/**
 * Accumulator for complex-weighted Pauli terms, used while expanding operator
 * products whose imaginary parts must cancel (Hermitian sources). finalize()
 * checks the residues and emits a real QubitHamiltonian.
 */
class PauliAccumulator {
  public:
    explicit PauliAccumulator(std::size_t num_qubits) : num_qubits_(num_qubits) {}

    void add(const PauliString& s, std::complex<double> coefficient) {
        acc_[s] += coefficient;
    }

    const std::unordered_map<PauliString, std::complex<double>, PauliStringHash>& terms() const {
        return acc_;
    }

    /// Largest |imag| seen across accumulated coefficients (diagnostic).
    double max_imaginary_residue() const {
        double m = 0.0;
        for (const auto& [s, c] : acc_) m = std::max(m, std::abs(c.imag()));
        return m;
    }

    /// Validates imaginary residues against `imag_tolerance`, then truncates
    /// to real coefficients and prunes below the drop tolerance.
    QubitHamiltonian finalize(double imag_tolerance = 1e-12) const {
        QubitHamiltonian h(num_qubits_);
        std::unordered_map<PauliString, double, PauliStringHash> real_acc;
        real_acc.reserve(acc_.size());
        for (const auto& [s, c] : acc_) {
            if (std::abs(c.imag()) > imag_tolerance) {
                throw std::runtime_error("non-Hermitian accumulation: imaginary residue " +
                                         std::to_string(c.imag()) + " on " + s.label());
            }
            real_acc[s] = c.real();
        }
        h.assign_from_map(real_acc);
        return h;
    }

  private:
    std::size_t num_qubits_;
    std::unordered_map<PauliString, std::complex<double>, PauliStringHash> acc_;
};

/// Coefficient-wise sum of two Hamiltonians over the same qubits.
inline QubitHamiltonian add(const QubitHamiltonian& h, const QubitHamiltonian& g) {
    if (h.num_qubits() != g.num_qubits()) {
        throw std::invalid_argument("cannot add Hamiltonians with different qubit counts");
    }
    QubitHamiltonian out(h.num_qubits());
    // both inputs are sorted; merge directly
    const auto& a = h.terms();
    const auto& b = g.terms();
    out.terms_.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].string < b[j].string)) {
            out.terms_.push_back(a[i++]);
        } else if (i == a.size() || b[j].string < a[i].string) {
            out.terms_.push_back(b[j++]);
        } else {
            const double c = a[i].coefficient + b[j].coefficient;
            if (std::abs(c) >= kDropTolerance) out.terms_.push_back({c, a[i].string});
            ++i;
            ++j;
        }
    }
    return out;
}

/// Keeps exactly the terms of an already-simplified Hamiltonian that satisfy
/// the predicate. Order and coefficients are preserved.
inline QubitHamiltonian filter_terms(const QubitHamiltonian& h,
                                     const std::function<bool(const PauliTerm&)>& keep) {
    QubitHamiltonian out(h.num_qubits());
    for (const auto& t : h.terms()) {
        if (keep(t)) out.terms_.push_back(t);
    }
    return out;
}

struct HistogramBin {
    double lower = 0.0;                 // inclusive
    double upper = 0.0;                 // exclusive; +inf for the last bin
    std::size_t term_count = 0;
    double coefficient_norm_sum = 0.0;  // sum of |c_k| inside the bin
};

/**
 * Bins every non-identity term by |coefficient|. Bin boundaries are
 * [0, e_0), [e_0, e_1), ..., [e_last, inf) so each term lands in exactly one
 * bin. The identity term is not binned (it needs no measurement).
 */
inline std::vector<HistogramBin> coefficient_histogram(const QubitHamiltonian& h,
                                                       const std::vector<double>& bin_edges) {
    if (bin_edges.empty()) {
        throw std::invalid_argument("coefficient_histogram: bin_edges must be non-empty");
    }
    for (std::size_t i = 0; i < bin_edges.size(); ++i) {
        if (bin_edges[i] <= 0.0 || (i > 0 && bin_edges[i] <= bin_edges[i - 1])) {
            throw std::invalid_argument(
                "coefficient_histogram: bin_edges must be positive and strictly ascending");
        }
    }
    std::vector<HistogramBin> bins(bin_edges.size() + 1);
    bins[0].lower = 0.0;
    for (std::size_t i = 0; i < bin_edges.size(); ++i) {
        bins[i].upper = bin_edges[i];
        bins[i + 1].lower = bin_edges[i];
    }
    bins.back().upper = std::numeric_limits<double>::infinity();
    for (const auto& t : h.terms()) {
        if (t.string.is_identity()) continue;
        const double mag = std::abs(t.coefficient);
        const std::size_t idx =
            std::upper_bound(bin_edges.begin(), bin_edges.end(), mag) - bin_edges.begin();
        bins[idx].term_count += 1;
        bins[idx].coefficient_norm_sum += mag;
    }
    return bins;
}

/**
 * Greedy first-fit partition of the non-identity terms into qubit-wise
 * commuting groups. Terms are visited in descending |coefficient| order
 * (ties broken by label order) so the partition is deterministic.
 */
inline std::vector<std::vector<PauliTerm>> qubitwise_commuting_groups(const QubitHamiltonian& h) {
    std::vector<PauliTerm> order;
    order.reserve(h.num_terms());
    for (const auto& t : h.terms()) {
        if (!t.string.is_identity()) order.push_back(t);
    }
    std::stable_sort(order.begin(), order.end(), [](const PauliTerm& a, const PauliTerm& b) {
        return std::abs(a.coefficient) > std::abs(b.coefficient);
    });
    std::vector<std::vector<PauliTerm>> groups;
    for (const auto& t : order) {
        bool placed = false;
        for (auto& g : groups) {
            bool fits = true;
            for (const auto& member : g) {
                if (!t.string.qubitwise_commutes(member.string)) {
                    fits = false;
                    break;
                }
            }
            if (fits) {
                g.push_back(t);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({t});
    }
    return groups;
}

/// Writes `<coefficient> <label>` lines, 17 significant digits.
inline void write_hamiltonian_text(const QubitHamiltonian& h, std::ostream& os) {
    char buf[64];
    for (const auto& t : h.terms()) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.coefficient);
        os << buf << ' ' << t.string.label() << '\n';
    }
}

inline std::string hamiltonian_to_text(const QubitHamiltonian& h) {
    std::ostringstream os;
    write_hamiltonian_text(h, os);
    return os.str();
}

/// Parses the line-oriented `<coefficient> <label>` form.
inline QubitHamiltonian read_hamiltonian_text(std::istream& is, std::size_t num_qubits) {
    std::vector<PauliTerm> terms;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        double c;
        std::string label;
        if (!(ls >> c >> label)) {
            throw std::runtime_error("malformed Hamiltonian text at line " +
                                     std::to_string(line_no));
        }
        if (label.size() != num_qubits) {
            throw std::runtime_error("label width mismatch at line " + std::to_string(line_no));
        }
        terms.push_back({c, PauliString::from_label(label)});
    }
    return QubitHamiltonian::from_terms(num_qubits, terms);
}

}  // namespace stagedvqe
