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

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stagedvqe/fermion.hpp"

namespace stagedvqe {

/**
 * Parsed FCIDUMP contents. The Hamiltonian is already expanded to
 * spin-orbitals: spatial orbital p becomes spin-orbitals 2p (alpha) and
 * 2p+1 (beta), chemist-notation integrals are reordered into the physicist
 * normal-ordered two-body tensor.
 */
struct FcidumpData {
    FermionHamiltonian hamiltonian;
    std::size_t num_spatial_orbitals = 0;
    std::size_t num_electrons = 0;
    std::vector<std::string> warnings;
};

namespace detail {

struct SpatialIntegrals {
    std::size_t norb = 0;
    std::size_t nelec = 0;
    double core = 0.0;
    bool core_seen = false;
    std::vector<double> h1;   // norb x norb
    std::vector<double> eri;  // chemist (ij|kl), norb^4

    double& h1_at(std::size_t i, std::size_t j) { return h1[i * norb + j]; }
    double& eri_at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return eri[((i * norb + j) * norb + k) * norb + l];
    }
    double eri_get(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return eri[((i * norb + j) * norb + k) * norb + l];
    }
};

inline bool parse_header_int(const std::string& header, const std::string& key, std::size_t* out) {
    // case-insensitive "KEY = <int>"
    std::string upper;
    upper.reserve(header.size());
    for (char c : header) upper.push_back(static_cast<char>(std::toupper(c)));
    auto pos = upper.find(key);
    while (pos != std::string::npos) {
        std::size_t p = pos + key.size();
        while (p < upper.size() && (upper[p] == ' ' || upper[p] == '=')) ++p;
        if (p < upper.size() && std::isdigit(static_cast<unsigned char>(upper[p]))) {
            *out = std::strtoull(upper.c_str() + p, nullptr, 10);
            return true;
        }
        pos = upper.find(key, pos + 1);
    }
    return false;
}

/// Expand the spatial integrals into the spin-orbital Hamiltonian of Eq-form
/// H = const + sum h_ij a+_i a_j + 1/2 sum h_ijkl a+_i a+_j a_k a_l with
/// h_ijkl = (s(i) s(l) | s(j) s(k)) delta(spin i, spin l) delta(spin j, spin k).
inline FermionHamiltonian expand_to_spin_orbitals(const SpatialIntegrals& si) {
    const std::size_t m = 2 * si.norb;
    FermionHamiltonian h(m);
    h.set_constant(si.core);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if ((i % 2) != (j % 2)) continue;
            h.set_one_body(i, j, si.h1[(i / 2) * si.norb + (j / 2)]);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t l = 0; l < m; ++l) {
                    if ((i % 2) != (l % 2) || (j % 2) != (k % 2)) continue;
                    const double v = si.eri_get(i / 2, l / 2, j / 2, k / 2);
                    if (std::abs(v) < kDropTolerance) continue;
                    h.set_two_body(i, j, k, l, v);
                }
            }
        }
    }
    return h;
}

}  // namespace detail

/**
 * Reads the standard FCIDUMP convention: a namelist header carrying NORB and
 * NELEC terminated by "&END" (or "/"), then `value i j k l` lines with
 * 1-based spatial indices. Two-electron lines are chemist-notation (ij|kl)
 * with 8-fold permutational symmetry applied to unlisted entries; `value i j
 * 0 0` is a one-body entry, `value 0 0 0 0` the core energy. A missing core
 * line leaves the constant at 0 and adds a warning.
 *
 * Two-electron integrals below the drop tolerance are discarded.
 */
inline FcidumpData parse_fcidump_data(std::istream& is) {
    FcidumpData out{FermionHamiltonian(1)};
    std::string header;
    std::string line;
    bool header_done = false;
    std::size_t line_no = 0;

    while (!header_done && std::getline(is, line)) {
        ++line_no;
        header += line + "\n";
        std::string upper;
        for (char c : line) upper.push_back(static_cast<char>(std::toupper(c)));
        if (upper.find("&END") != std::string::npos) {
            header_done = true;
        } else {
            // a bare "/" also terminates a namelist
            std::string trimmed;
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
            }
            if (trimmed == "/") header_done = true;
        }
        if (line_no > 64 && !header_done) break;  // runaway header
    }
    if (!header_done) {
        throw std::runtime_error("FCIDUMP: header not terminated by &END");
    }

    detail::SpatialIntegrals si;
    if (!detail::parse_header_int(header, "NORB", &si.norb) || si.norb == 0) {
        throw std::runtime_error("FCIDUMP: malformed header, NORB missing");
    }
    if (!detail::parse_header_int(header, "NELEC", &si.nelec)) {
        throw std::runtime_error("FCIDUMP: malformed header, NELEC missing");
    }
    si.h1.assign(si.norb * si.norb, 0.0);
    si.eri.assign(si.norb * si.norb * si.norb * si.norb, 0.0);

    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string value_token;
        if (!(ls >> value_token)) continue;  // blank line
        char* end = nullptr;
        const double value = std::strtod(value_token.c_str(), &end);
        if (end == value_token.c_str() || *end != '\0') {
            throw std::runtime_error("FCIDUMP: non-numeric value at line " +
                                     std::to_string(line_no));
        }
        long idx[4];
        for (int t = 0; t < 4; ++t) {
            if (!(ls >> idx[t])) {
                throw std::runtime_error("FCIDUMP: expected four indices at line " +
                                         std::to_string(line_no));
            }
            if (idx[t] < 0 || idx[t] > static_cast<long>(si.norb)) {
                throw std::runtime_error("FCIDUMP: orbital index out of range at line " +
                                         std::to_string(line_no));
            }
        }
        const long i = idx[0], j = idx[1], k = idx[2], l = idx[3];
        if (i == 0 && j == 0 && k == 0 && l == 0) {
            si.core = value;
            si.core_seen = true;
        } else if (k == 0 && l == 0) {
            if (i == 0 || j == 0) {
                throw std::runtime_error("FCIDUMP: bad one-body indices at line " +
                                         std::to_string(line_no));
            }
            si.h1_at(i - 1, j - 1) = value;
            si.h1_at(j - 1, i - 1) = value;
        } else {
            if (i == 0 || j == 0 || k == 0 || l == 0) {
                throw std::runtime_error("FCIDUMP: bad two-body indices at line " +
                                         std::to_string(line_no));
            }
            const std::size_t a = i - 1, b = j - 1, c = k - 1, d = l - 1;
            // 8-fold symmetry of real chemist integrals
            si.eri_at(a, b, c, d) = value;
            si.eri_at(b, a, c, d) = value;
            si.eri_at(a, b, d, c) = value;
            si.eri_at(b, a, d, c) = value;
            si.eri_at(c, d, a, b) = value;
            si.eri_at(d, c, a, b) = value;
            si.eri_at(c, d, b, a) = value;
            si.eri_at(d, c, b, a) = value;
        }
    }
    if (!si.core_seen) {
        out.warnings.push_back("FCIDUMP: no core-energy line, constant defaults to 0");
    }

    out.hamiltonian = detail::expand_to_spin_orbitals(si);
    out.num_spatial_orbitals = si.norb;
    out.num_electrons = si.nelec;
    return out;
}

inline FermionHamiltonian parse_fcidump(std::istream& is) {
    return parse_fcidump_data(is).hamiltonian;
}

inline FcidumpData load_fcidump(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open FCIDUMP file: " + path);
    }
    try {
        return parse_fcidump_data(f);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

/**
 * Writes a spin-orbital Hamiltonian back to FCIDUMP form. The Hamiltonian
 * must carry the spin symmetry produced by the reader (alpha/beta blocks of a
 * spatial tensor); the spatial integrals are recovered from the alpha/beta
 * blocks and emitted over the 8-fold-unique index quadruples.
 */
inline void write_fcidump(const FermionHamiltonian& h, std::size_t num_electrons,
                          std::ostream& os) {
    if (h.num_modes() % 2 != 0) {
        throw std::invalid_argument("write_fcidump: spin-orbital count must be even");
    }
    const std::size_t norb = h.num_modes() / 2;
    char buf[64];
    os << "&FCI NORB=" << norb << ",NELEC=" << num_electrons << ",MS2= 0,\n";
    os << "  ORBSYM=";
    for (std::size_t i = 0; i < norb; ++i) os << "1,";
    os << "\n  ISYM=1,\n &END\n";
    auto emit = [&](double v, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << ' ' << buf << "  " << i << ' ' << j << ' ' << k << ' ' << l << '\n';
    };
    for (std::size_t i = 0; i < norb; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            for (std::size_t k = 0; k <= i; ++k) {
                const std::size_t lmax = (k == i) ? j : k;
                for (std::size_t l = 0; l <= lmax; ++l) {
                    // chemist (ij|kl) = h[2i, 2k+1, 2l+1, 2j]
                    const double v = h.two_body(2 * i, 2 * k + 1, 2 * l + 1, 2 * j);
                    if (std::abs(v) >= kDropTolerance) {
                        emit(v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for (std::size_t i = 0; i < norb; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = h.one_body(2 * i, 2 * j);
            if (std::abs(v) >= kDropTolerance) {
                emit(v, i + 1, j + 1, 0, 0);
            }
        }
    }
    emit(h.constant(), 0, 0, 0, 0);
}

}  // namespace stagedvqe
