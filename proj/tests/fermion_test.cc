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

#include "stagedvqe/fermion.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>
#include <set>
#include <sstream>

#include "dense_oracle.hpp"
#include "stagedvqe/fcidump.hpp"
#include "test_util.hpp"

using namespace stagedvqe;

TEST(Fcidump, ConstantOnlyFile) {
    std::istringstream in(
        "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n"
        " 1.25  0 0 0 0\n");
    const auto h = parse_fcidump(in);
    EXPECT_EQ(h.num_modes(), 4u);
    EXPECT_DOUBLE_EQ(h.constant(), 1.25);
    EXPECT_TRUE(jordan_wigner(h).num_terms() == 1);
}

TEST(Fcidump, MissingCoreLineWarns) {
    std::istringstream in(
        "&FCI NORB=1,NELEC=2,MS2=0,\n&END\n"
        " -1.0  1 1 0 0\n");
    auto data = parse_fcidump_data(in);
    EXPECT_DOUBLE_EQ(data.hamiltonian.constant(), 0.0);
    ASSERT_EQ(data.warnings.size(), 1u);
}

TEST(Fcidump, MalformedInputsThrow) {
    {
        std::istringstream in("&FCI NELEC=2,\n&END\n 1.0 0 0 0 0\n");
        EXPECT_THROW(parse_fcidump(in), std::runtime_error);  // NORB missing
    }
    {
        std::istringstream in("&FCI NORB=2,NELEC=2,\n&END\n 1.0 3 1 0 0\n");
        EXPECT_THROW(parse_fcidump(in), std::runtime_error);  // index out of range
    }
    {
        std::istringstream in("&FCI NORB=2,NELEC=2,\n&END\n abc 1 1 0 0\n");
        EXPECT_THROW(parse_fcidump(in), std::runtime_error);  // non-numeric value
    }
    {
        std::istringstream in("&FCI NORB=2,NELEC=2,\n 1.0 1 1 0 0\n");
        EXPECT_THROW(parse_fcidump(in), std::runtime_error);  // unterminated header
    }
}

TEST(Fcidump, H2FixtureShape) {
    const auto data = testutil::load_fixture("h2.fcidump");
    EXPECT_EQ(data.hamiltonian.num_modes(), 4u);
    EXPECT_EQ(data.num_electrons, 2u);
    EXPECT_EQ(data.num_spatial_orbitals, 2u);
    data.hamiltonian.validate();
}

TEST(Fcidump, WriteParseIsIdempotent) {
    std::mt19937_64 rng(61);
    // random spatial integrals expressed directly as an FCIDUMP body
    std::ostringstream first;
    first << "&FCI NORB=3,NELEC=4,MS2=0,\n&END\n";
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= i; ++j) {
            for (int k = 1; k <= i; ++k) {
                const int lmax = (k == i) ? j : k;
                for (int l = 1; l <= lmax; ++l) {
                    first << testutil::uniform(rng, -1, 1) << "  " << i << ' ' << j << ' ' << k
                          << ' ' << l << '\n';
                }
            }
        }
    }
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= i; ++j) {
            first << testutil::uniform(rng, -1, 1) << "  " << i << ' ' << j << " 0 0\n";
        }
    }
    first << "0.5  0 0 0 0\n";

    std::istringstream pass1(first.str());
    const auto data1 = parse_fcidump_data(pass1);
    std::ostringstream text2;
    write_fcidump(data1.hamiltonian, data1.num_electrons, text2);
    std::istringstream pass2(text2.str());
    const auto data2 = parse_fcidump_data(pass2);
    std::ostringstream text3;
    write_fcidump(data2.hamiltonian, data2.num_electrons, text3);
    EXPECT_EQ(text2.str(), text3.str());
    EXPECT_EQ(jordan_wigner(data1.hamiltonian), jordan_wigner(data2.hamiltonian));
}

TEST(Classify, OneBodyTerms) {
    FermionTerm number{1.0, {{0, true}, {0, false}}};
    FermionTerm hopping{1.0, {{0, true}, {2, false}}};
    EXPECT_EQ(classify_term(number), OperatorClass::Num);
    EXPECT_EQ(classify_term(hopping), OperatorClass::Exc);
}

TEST(Classify, TwoBodyTermsByDistinctIndexCount) {
    FermionTerm coulomb{1.0, {{0, true}, {1, true}, {1, false}, {0, false}}};
    FermionTerm nex{1.0, {{0, true}, {2, true}, {3, false}, {0, false}}};
    FermionTerm dex{1.0, {{0, true}, {1, true}, {2, false}, {3, false}}};
    EXPECT_EQ(classify_term(coulomb), OperatorClass::Cou);
    EXPECT_EQ(classify_term(nex), OperatorClass::Nex);
    EXPECT_EQ(classify_term(dex), OperatorClass::Dex);
}

TEST(Classify, FragmentsPartitionEveryCanonicalTerm) {
    std::mt19937_64 rng(67);
    const auto h = testutil::random_fermion_hamiltonian(rng, 4);
    const auto c = classify(h);
    std::size_t total = 0;
    for (int k = 0; k < 5; ++k) {
        const auto cls = static_cast<OperatorClass>(k);
        for (const auto& t : c.fragment(cls).canonical_terms()) {
            if (t.ops.empty()) continue;
            EXPECT_EQ(classify_term(t), cls);
            ++total;
        }
    }
    std::size_t expected = 0;
    for (const auto& t : h.canonical_terms()) {
        if (!t.ops.empty()) ++expected;
    }
    EXPECT_EQ(total, expected);
}

TEST(Classify, FragmentResumEqualsDirectMap) {
    const auto data = testutil::load_fixture("h2.fcidump");
    const auto c = classify(data.hamiltonian);
    QubitHamiltonian resum = jordan_wigner(c.num);
    resum = add(resum, jordan_wigner(c.cou));
    resum = add(resum, jordan_wigner(c.exc));
    resum = add(resum, jordan_wigner(c.nex));
    resum = add(resum, jordan_wigner(c.dex));
    const auto direct = jordan_wigner(data.hamiltonian);
    ASSERT_EQ(resum.num_terms(), direct.num_terms());
    for (const auto& t : direct.terms()) {
        EXPECT_NEAR(resum.coefficient(t.string), t.coefficient, 1e-12);
    }
}

TEST(Classify, H2ClassificationStageTermCounts) {
    const auto data = testutil::load_fixture("h2.fcidump");
    const auto c = classify(data.hamiltonian);
    const auto h3 = add(jordan_wigner(c.num), jordan_wigner(c.cou));
    EXPECT_EQ(h3.num_terms(), 11u);
}

TEST(JordanWigner, SingleModeNumberOperator) {
    FermionHamiltonian h(1);
    h.set_one_body(0, 0, 1.0);
    const auto q = jordan_wigner(h);
    ASSERT_EQ(q.num_terms(), 2u);
    EXPECT_NEAR(q.coefficient(PauliString::from_label("I")), 0.5, 1e-15);
    EXPECT_NEAR(q.coefficient(PauliString::from_label("Z")), -0.5, 1e-15);
}

TEST(JordanWigner, AnticommutationAsDenseMatrices) {
    for (std::size_t m = 1; m <= 4; ++m) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                // map a_i and a+_j through the JW ladder expansion
                PauliAccumulator acc_a(m), acc_adag(m);
                detail::jw_accumulate_term(acc_a, m, {1.0, {{unsigned(i), false}}});
                detail::jw_accumulate_term(acc_adag, m, {1.0, {{unsigned(j), true}}});
                const Eigen::Index dim = Eigen::Index(1) << m;
                oracle::Matrix a = oracle::Matrix::Zero(dim, dim);
                for (const auto& [s, coeff] : acc_a.terms()) {
                    a += coeff * oracle::dense_pauli(s.label());
                }
                oracle::Matrix adag = oracle::Matrix::Zero(dim, dim);
                for (const auto& [s, coeff] : acc_adag.terms()) {
                    adag += coeff * oracle::dense_pauli(s.label());
                }
                const oracle::Matrix anti = a * adag + adag * a;
                oracle::Matrix expected = oracle::Matrix::Zero(dim, dim);
                if (i == j) expected = oracle::Matrix::Identity(dim, dim);
                EXPECT_LT((anti - expected).cwiseAbs().maxCoeff(), 1e-12)
                    << "m=" << m << " i=" << i << " j=" << j;
            }
        }
    }
}

TEST(JordanWigner, H2FixtureHasFifteenTerms) {
    const auto data = testutil::load_fixture("h2.fcidump");
    EXPECT_EQ(jordan_wigner(data.hamiltonian).num_terms(), 15u);
}

TEST(JordanWigner, NumPlusCouMapsToZStrings) {
    std::mt19937_64 rng(71);
    const auto h = testutil::random_fermion_hamiltonian(rng, 4);
    const auto c = classify(h);
    const auto zpart = add(jordan_wigner(c.num), jordan_wigner(c.cou));
    for (const auto& t : zpart.terms()) {
        EXPECT_TRUE(t.string.is_z_only()) << t.string.label();
    }
}

TEST(JordanWigner, SpectrumMatchesDenseFermionicHamiltonian) {
    std::mt19937_64 rng(73);
    for (std::size_t m = 2; m <= 4; ++m) {
        const auto h = testutil::random_fermion_hamiltonian(rng, m);
        const auto q = jordan_wigner(h);
        Eigen::SelfAdjointEigenSolver<oracle::Matrix> f_solver(
            oracle::dense_fermion_hamiltonian(h));
        Eigen::SelfAdjointEigenSolver<oracle::Matrix> q_solver(oracle::dense_hamiltonian(q));
        const auto diff =
            (f_solver.eigenvalues() - q_solver.eigenvalues()).cwiseAbs().maxCoeff();
        EXPECT_LT(diff, 1e-10) << "m=" << m;
    }
}

TEST(ClassProfile, EmptyHamiltonianIsAllZero) {
    const auto profile = class_norm_profile(classify(FermionHamiltonian(4)));
    for (const auto& entry : profile) {
        EXPECT_EQ(entry.term_count, 0u);
        EXPECT_EQ(entry.coefficient_norm_sum, 0.0);
    }
}

TEST(ClassProfile, H2NormProfile) {
    // H2 has no core orbitals and symmetry kills exc/nex entirely, so the
    // generic class ordering does not apply: the coulomb class tops the list.
    const auto data = testutil::load_fixture("h2.fcidump");
    const auto profile = class_norm_profile(classify(data.hamiltonian));
    const double num = profile[0].coefficient_norm_sum;
    const double cou = profile[1].coefficient_norm_sum;
    const double exc = profile[2].coefficient_norm_sum;
    const double nex = profile[3].coefficient_norm_sum;
    const double dex = profile[4].coefficient_norm_sum;
    EXPECT_GT(cou, num);
    EXPECT_GT(num, dex);
    EXPECT_GT(dex, 0.0);
    EXPECT_EQ(exc, 0.0);
    EXPECT_EQ(nex, 0.0);
    EXPECT_EQ(profile[0].term_count, 4u);
}

TEST(ClassProfile, NumberClassDominatesPerTerm) {
    // The staging rationale: number-operator terms carry by far the largest
    // coefficients. Their per-term mean tops every other class on all
    // bundled fixtures.
    for (const char* name :
         {"h2.fcidump", "h4.fcidump", "h6.fcidump", "lih.fcidump", "beh2.fcidump",
          "h2o.fcidump", "nh3.fcidump"}) {
        const auto data = testutil::load_fixture(name);
        const auto profile = class_norm_profile(classify(data.hamiltonian));
        ASSERT_GT(profile[0].term_count, 0u) << name;
        const double num_mean =
            profile[0].coefficient_norm_sum / double(profile[0].term_count);
        for (int k = 1; k < 5; ++k) {
            if (profile[k].term_count == 0) continue;
            const double mean =
                profile[k].coefficient_norm_sum / double(profile[k].term_count);
            EXPECT_GT(num_mean, mean) << name << " class " << k;
        }
    }
}

TEST(ClassProfile, CountsMatchBruteForceEnumeration) {
    std::mt19937_64 rng(79);
    const auto h = testutil::random_fermion_hamiltonian(rng, 4);
    const auto profile = class_norm_profile(classify(h));
    std::array<std::size_t, 5> expected_counts{};
    std::array<double, 5> expected_norms{};
    // brute force straight off the tensors: raw |h_ij| and |h_ijkl|
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double v = h.one_body(i, j);
            if (std::abs(v) < kDropTolerance) continue;
            const int cls = static_cast<int>(i == j ? OperatorClass::Num : OperatorClass::Exc);
            expected_counts[cls] += 1;
            expected_norms[cls] += std::abs(v);
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (i == j) continue;
            for (std::size_t k = 0; k < 4; ++k) {
                for (std::size_t l = 0; l < 4; ++l) {
                    if (k == l) continue;
                    const double v = h.two_body(i, j, k, l);
                    if (std::abs(0.5 * v) < kDropTolerance) continue;
                    std::set<std::size_t> distinct{i, j, k, l};
                    const int cls = static_cast<int>(
                        distinct.size() == 2 ? OperatorClass::Cou
                        : distinct.size() == 3 ? OperatorClass::Nex : OperatorClass::Dex);
                    expected_counts[cls] += 1;
                    expected_norms[cls] += std::abs(0.5 * v);
                }
            }
        }
    }
    for (int k = 0; k < 5; ++k) {
        EXPECT_EQ(profile[k].term_count, expected_counts[k]);
        EXPECT_NEAR(profile[k].coefficient_norm_sum, expected_norms[k], 1e-12);
    }
}

TEST(FermionHamiltonian, ValidateDetectsAsymmetry) {
    FermionHamiltonian h(2);
    h.set_one_body(0, 1, 0.5);
    EXPECT_THROW(h.validate(), std::runtime_error);
    h.set_one_body(1, 0, 0.5);
    EXPECT_NO_THROW(h.validate());
    h.set_two_body(0, 1, 0, 1, 0.25);
    EXPECT_THROW(h.validate(), std::runtime_error);
}
