#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcs/io.hpp"
#include "pcs/profiles.hpp"

using namespace pcs;

namespace {

ProfileFamilySpec family(ProfileFamily f) {
    ProfileFamilySpec spec;
    spec.family = f;
    return spec;
}

ProfileFamilySpec piecewise(const CMatrix& v) {
    ProfileFamilySpec spec;
    spec.family = ProfileFamily::piecewise_constant;
    spec.isometry = v;
    return spec;
}

SensorProfileSet random_set(ProfileKind kind, Scenario scenario, Index c, Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CVector> v;
    for (Index k = 0; k < c; ++k) v.push_back(oracle::random_complex(n, rng));
    return SensorProfileSet(kind, scenario, std::move(v));
}

} // namespace

TEST(Oscillatory, UnitModulusDistinct) {
    const auto p = make_profiles(family(ProfileFamily::oscillatory), 4, 8, Scenario::distinct);
    for (Index c = 0; c < 4; ++c)
        for (Index i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(p.vector(c)(i)), 1.0, 1e-15);
    for (Index i = 0; i < 8; ++i) {
        double sum = 0.0;
        for (Index c = 0; c < 4; ++c) sum += std::norm(p.vector(c)(i));
        EXPECT_NEAR(sum / 4.0, 1.0, 1e-15);
    }
}

TEST(Oscillatory, LiteralIndexConvention) {
    // h_{c,i} = exp(2 pi i c i / N) / sqrt(M), c and i 1-based.
    const Index n = 12, sensors = 3;
    const auto p = make_profiles(family(ProfileFamily::oscillatory), sensors, n, Scenario::identical);
    for (Index c = 1; c <= sensors; ++c)
        for (Index i = 1; i <= n; ++i) {
            const Complex want = std::polar(1.0 / std::sqrt(3.0), 2.0 * oracle::kPi * static_cast<double>(c * i) / 12.0);
            EXPECT_NEAR(std::abs(p.vector(c - 1)(i - 1) - want), 0.0, 1e-13);
        }
}

TEST(PiecewiseConstant, IdentityIsometryIdentical) {
    const auto p = make_profiles(piecewise(CMatrix::Identity(2, 2)), 2, 10, Scenario::identical);
    const auto part = LevelPartition::equal(10, 2);
    for (Index i = 0; i < 10; ++i) {
        const bool first = part.level_of(i) == 0;
        EXPECT_NEAR(std::abs(p.vector(0)(i) - Complex(first ? 1.0 : 0.0)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(p.vector(1)(i) - Complex(first ? 0.0 : 1.0)), 0.0, 1e-14);
    }
    CMatrix gram = CMatrix::Zero(10, 10);
    for (Index c = 0; c < 2; ++c) gram += p.dense(c).adjoint() * p.dense(c);
    EXPECT_LE((gram - CMatrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PiecewiseConstant, ValuesFollowIsometry) {
    const CMatrix v = dft_isometry(4, 2);
    const auto p = make_profiles(piecewise(v), 4, 16, Scenario::distinct);
    const auto part = LevelPartition::equal(16, 2);
    for (Index c = 0; c < 4; ++c)
        for (Index i = 0; i < 16; ++i)
            EXPECT_NEAR(std::abs(p.vector(c)(i) - 2.0 * v(c, part.level_of(i))), 0.0, 1e-13);
}

TEST(PiecewiseConstant, RejectsNonIsometry) {
    CMatrix v = CMatrix::Identity(2, 2);
    v(0, 1) = 0.5;
    EXPECT_THROW(make_profiles(piecewise(v), 2, 8, Scenario::distinct), ConfigError);
    EXPECT_THROW(make_profiles(piecewise(CMatrix::Identity(3, 3).leftCols(2).transpose()), 2, 8, Scenario::distinct),
                 ConfigError);
}

TEST(Banded, SupportWithinNeighbouringLevels) {
    auto spec = family(ProfileFamily::banded);
    spec.band_below = spec.band_above = 1;
    for (Scenario sc : {Scenario::distinct, Scenario::identical}) {
        const auto p = make_profiles(spec, 4, 16, sc);
        const auto part = LevelPartition::equal(16, 4);
        for (Index c = 0; c < 4; ++c)
            for (Index i = 0; i < 16; ++i) {
                const Index d = part.level_of(i);
                if (std::abs(d - c) > 1) EXPECT_EQ(p.vector(c)(i), Complex(0.0)) << "c=" << c << " i=" << i;
            }
        EXPECT_LE(verify_joint_isometry(p), 1e-12);
    }
}

TEST(Banded, BandIndependentOfC) {
    auto spec = family(ProfileFamily::banded);
    spec.band_below = 0;
    spec.band_above = 2;
    const auto p = make_profiles(spec, 8, 64, Scenario::distinct);
    const auto part = LevelPartition::equal(64, 8);
    for (Index c = 0; c < 8; ++c)
        for (Index i = 0; i < 64; ++i) {
            const Index d = part.level_of(i);
            if (d < c || d > c + 2) EXPECT_EQ(p.vector(c)(i), Complex(0.0));
        }
}

TEST(Banded, RequiresDEqualsC) {
    auto spec = family(ProfileFamily::banded);
    EXPECT_THROW(make_profiles(spec, 4, 16, Scenario::distinct, LevelPartition::equal(16, 2)), ConfigError);
}

TEST(Normalize, SingleSensorToOnes) {
    const SensorProfileSet raw(ProfileKind::diagonal, Scenario::distinct, {CVector::Constant(6, 2.0)});
    const auto p = normalize_joint_isometry(raw);
    EXPECT_LE((p.vector(0) - CVector::Ones(6)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Normalize, IdenticalPairScaledByInverseRootTwo) {
    const SensorProfileSet raw(ProfileKind::diagonal, Scenario::identical, {CVector::Ones(5), CVector::Ones(5)});
    const auto p = normalize_joint_isometry(raw);
    for (Index c = 0; c < 2; ++c)
        EXPECT_LE((p.vector(c) - CVector::Constant(5, 1.0 / std::sqrt(2.0))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Normalize, RandomPositiveDiagonalResidual) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::vector<CVector> v;
    for (int c = 0; c < 3; ++c) {
        CVector h(32);
        for (Index i = 0; i < 32; ++i) h(i) = u(rng);
        v.push_back(h);
    }
    const SensorProfileSet raw(ProfileKind::diagonal, Scenario::distinct, v);
    const auto p = normalize_joint_isometry(raw);
    // Residual from dense matrices.
    CMatrix gram = CMatrix::Zero(32, 32);
    for (Index c = 0; c < 3; ++c) gram += oracle::diagonal_matrix(p.vector(c)).adjoint() * oracle::diagonal_matrix(p.vector(c));
    EXPECT_LE((gram / 3.0 - CMatrix::Identity(32, 32)).cwiseAbs().maxCoeff(), 1e-12);
    // Directions across sensors are kept.
    for (Index i = 0; i < 32; ++i) {
        const Complex before = v[0](i) / v[1](i);
        const Complex after = p.vector(0)(i) / p.vector(1)(i);
        EXPECT_NEAR(std::abs(before - after), 0.0, 1e-12 * std::abs(before));
    }
}

TEST(Normalize, CirculantPerEigenvalue) {
    const auto raw = random_set(ProfileKind::circulant, Scenario::distinct, 3, 16, 5);
    const auto p = normalize_joint_isometry(raw);
    CMatrix gram = CMatrix::Zero(16, 16);
    for (Index c = 0; c < 3; ++c) {
        const CMatrix h = oracle::circulant_matrix(p.vector(c));
        gram += h.adjoint() * h;
    }
    EXPECT_LE((gram / 3.0 - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalize, ZeroStackIsDegenerate) {
    CVector h = CVector::Ones(4);
    h(2) = 0.0;
    const SensorProfileSet raw(ProfileKind::diagonal, Scenario::distinct, {h, h});
    EXPECT_THROW(normalize_joint_isometry(raw), DegenerateProfileError);
    const SensorProfileSet circ(ProfileKind::circulant, Scenario::distinct, {CVector::Ones(4)});
    EXPECT_THROW(normalize_joint_isometry(circ), DegenerateProfileError);  // spectrum (4, 0, 0, 0)
}

TEST(VerifyJointIsometry, Examples) {
    EXPECT_EQ(verify_joint_isometry(SensorProfileSet(ProfileKind::diagonal, Scenario::distinct, {CVector::Ones(7)})), 0.0);
    EXPECT_LE(verify_joint_isometry(make_profiles(family(ProfileFamily::oscillatory), 8, 64, Scenario::distinct)), 1e-12);
    const SensorProfileSet twice(ProfileKind::diagonal, Scenario::distinct, {CVector::Ones(5), CVector::Ones(5)});
    EXPECT_EQ(verify_joint_isometry(twice), 0.0);
    // identical: the Gram sum is 2 I
    const SensorProfileSet ones(ProfileKind::diagonal, Scenario::identical, {CVector::Ones(5), CVector::Ones(5)});
    EXPECT_NEAR(verify_joint_isometry(ones), 1.0, 1e-15);
}

TEST(VerifyJointIsometry, EveryFamilyAndScenario) {
    for (Scenario sc : {Scenario::distinct, Scenario::identical})
        for (Index c : {1, 2, 3, 4, 8})
            for (Index n : {8, 16, 33}) {
                EXPECT_LE(verify_joint_isometry(make_profiles(family(ProfileFamily::oscillatory), c, n, sc)), 1e-10);
                EXPECT_LE(verify_joint_isometry(make_profiles(family(ProfileFamily::banded), c, n, sc)), 1e-10);
                EXPECT_LE(verify_joint_isometry(make_profiles(piecewise(dft_isometry(c, std::max<Index>(1, c / 2))), c, n, sc)),
                          1e-10);
                auto circ = family(ProfileFamily::circulant_unit_modulus);
                circ.seed = static_cast<std::uint64_t>(c * 100 + n);
                EXPECT_LE(verify_joint_isometry(make_profiles(circ, c, n, sc)), 1e-10);
                circ.conjugate_symmetric = true;
                const auto real = make_profiles(circ, c, n, sc);
                EXPECT_LE(verify_joint_isometry(real), 1e-10);
                EXPECT_TRUE(real.is_real(1e-12));
            }
}

TEST(ProfileNorms, DiagonalExample) {
    CVector h(3);
    h << 1.0, -2.0, 0.5;
    const auto norms = profile_norms(SensorProfileSet(ProfileKind::diagonal, Scenario::distinct, {h}));
    EXPECT_DOUBLE_EQ(norms[0].norm_1to1, 2.0);
    EXPECT_DOUBLE_EQ(norms[0].norm_2to2, 2.0);
}

TEST(ProfileNorms, CirculantExample) {
    CVector h(4);
    h << 0.5, 0.25, 0.25, 0.0;
    const auto norms = profile_norms(SensorProfileSet(ProfileKind::circulant, Scenario::distinct, {h}));
    EXPECT_DOUBLE_EQ(norms[0].norm_1to1, 1.0);
    EXPECT_NEAR(norms[0].norm_2to2, oracle::norm_2to2(oracle::circulant_matrix(h)), 1e-12);
}

TEST(ProfileNorms, MatchDenseInducedNorms) {
    for (Index n : {1, 2, 5, 16, 31, 64}) {
        const auto diag = random_set(ProfileKind::diagonal, Scenario::distinct, 2, n, 100 + static_cast<std::uint64_t>(n));
        const auto circ = random_set(ProfileKind::circulant, Scenario::distinct, 2, n, 200 + static_cast<std::uint64_t>(n));
        const auto nd = profile_norms(diag);
        const auto nc = profile_norms(circ);
        for (Index c = 0; c < 2; ++c) {
            const CMatrix d = oracle::diagonal_matrix(diag.vector(c));
            const CMatrix m = oracle::circulant_matrix(circ.vector(c));
            EXPECT_NEAR(nd[static_cast<std::size_t>(c)].norm_1to1, oracle::norm_1to1(d), 1e-10);
            EXPECT_NEAR(nd[static_cast<std::size_t>(c)].norm_2to2, oracle::norm_2to2(d), 1e-10);
            EXPECT_NEAR(nc[static_cast<std::size_t>(c)].norm_1to1, oracle::norm_1to1(m), 1e-10);
            EXPECT_NEAR(nc[static_cast<std::size_t>(c)].norm_2to2, oracle::norm_2to2(m), 1e-8);
        }
    }
}

TEST(ProfileNorms, CirculantEigenvaluesMatchDenseEigenpairs) {
    for (Index n : {3, 8, 16, 64}) {
        const auto circ = random_set(ProfileKind::circulant, Scenario::distinct, 1, n, 300 + static_cast<std::uint64_t>(n));
        const CMatrix h = oracle::circulant_matrix(circ.vector(0));
        const CMatrix phi = oracle::unitary_dft(n);
        // Phi H Phi^* is diagonal with the spectrum on the diagonal.
        const CMatrix d = phi * h * phi.adjoint();
        for (Index k = 0; k < n; ++k) {
            EXPECT_NEAR(std::abs(d(k, k) - circ.eigenvalues(0)(k)), 0.0, 1e-8);
            for (Index j = 0; j < n; ++j)
                if (j != k) EXPECT_LE(std::abs(d(k, j)), 1e-8);
        }
        // lambda = sqrt(N) Phi h
        const CVector lam = std::sqrt(static_cast<double>(n)) * phi * circ.vector(0);
        EXPECT_LE((lam - circ.eigenvalues(0)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ProfileNorms, DistinctSupNormBounds) {
    // Each ||h_c||_inf^2 <= C, and the largest is >= 1.
    for (Index c : {1, 2, 4, 8}) {
        for (const auto& p : {make_profiles(family(ProfileFamily::banded), c, 64, Scenario::distinct),
                              make_profiles(family(ProfileFamily::oscillatory), c, 64, Scenario::distinct),
                              make_profiles(piecewise(dft_isometry(c, c)), c, 64, Scenario::distinct),
                              normalize_joint_isometry(random_set(ProfileKind::diagonal, Scenario::distinct, c, 64, 9))}) {
            double top = 0.0;
            for (Index k = 0; k < c; ++k) {
                const double sup2 = p.vector(k).cwiseAbs2().maxCoeff();
                EXPECT_LE(sup2, static_cast<double>(c) * (1.0 + 1e-12));
                top = std::max(top, sup2);
            }
            EXPECT_GE(top, 1.0 - 1e-12);
        }
    }
}

TEST(ApplyProfile, Examples) {
    CVector h(3);
    h << 1.0, 2.0, 3.0;
    const SensorProfileSet diag(ProfileKind::diagonal, Scenario::distinct, {h});
    EXPECT_EQ(apply_profile(diag, 0, CVector::Ones(3)), h);

    CVector impulse = CVector::Zero(8);
    impulse(0) = 1.0;
    const SensorProfileSet id(ProfileKind::circulant, Scenario::distinct, {impulse});
    std::mt19937_64 rng(3);
    const CVector x = oracle::random_complex(8, rng);
    EXPECT_LE((apply_profile(id, 0, x) - x).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ApplyProfile, MatchesDenseProducts) {
    std::mt19937_64 rng(11);
    for (Index n : {1, 7, 8, 33, 64})
        for (auto kind : {ProfileKind::diagonal, ProfileKind::circulant}) {
            const auto p = random_set(kind, Scenario::distinct, 2, n, 400 + static_cast<std::uint64_t>(n));
            for (Index c = 0; c < 2; ++c) {
                const CMatrix dense = kind == ProfileKind::diagonal ? oracle::diagonal_matrix(p.vector(c))
                                                                    : oracle::circulant_matrix(p.vector(c));
                const CVector x = oracle::random_complex(n, rng);
                EXPECT_LE((apply_profile(p, c, x) - dense * x).norm(), 1e-10 * (1.0 + (dense * x).norm()));
                EXPECT_LE((p.apply_adjoint(c, x) - dense.adjoint() * x).norm(), 1e-10 * (1.0 + x.norm() * n));
                EXPECT_LE((p.dense(c) - dense).cwiseAbs().maxCoeff(), 1e-12);
                const CMatrix rows = CMatrix::Random(3, n);
                EXPECT_LE((p.right_multiply(c, rows) - rows * dense).cwiseAbs().maxCoeff(), 1e-10 * n);
            }
        }
}

TEST(ApplyProfile, DimensionMismatch) {
    const auto p = make_profiles(family(ProfileFamily::oscillatory), 2, 8, Scenario::distinct);
    EXPECT_THROW(apply_profile(p, 0, CVector::Ones(7)), DimensionError);
    EXPECT_THROW(apply_profile(p, 2, CVector::Ones(8)), DimensionError);
}

TEST(CirculantUnitModulus, UnitModulusSpectrumAndDeterminism) {
    auto spec = family(ProfileFamily::circulant_unit_modulus);
    spec.seed = 42;
    const auto a = make_profiles(spec, 4, 32, Scenario::identical);
    const auto b = make_profiles(spec, 4, 32, Scenario::identical);
    for (Index c = 0; c < 4; ++c) {
        EXPECT_EQ(a.vector(c), b.vector(c));
        for (Index k = 0; k < 32; ++k) EXPECT_NEAR(std::abs(a.eigenvalues(c)(k)), 0.5, 1e-12);
    }
}

TEST(IsometryCoherence, DftIsIncoherent) {
    for (Index c : {1, 2, 5, 8}) {
        const CMatrix v = dft_isometry(c, c);
        EXPECT_LE((v.adjoint() * v - CMatrix::Identity(c, c)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(isometry_coherence(v), 1.0 / static_cast<double>(c), 1e-12);
    }
    EXPECT_DOUBLE_EQ(isometry_coherence(CMatrix::Identity(3, 3)), 1.0);
}

TEST(ProfileJson, RoundTrip) {
    auto spec = family(ProfileFamily::circulant_unit_modulus);
    spec.seed = 4;
    const auto p = make_profiles(spec, 3, 10, Scenario::distinct);
    const auto q = profiles_from_json(json::parse(profiles_to_json(p).dump()));
    EXPECT_EQ(q.kind(), p.kind());
    EXPECT_EQ(q.scenario(), p.scenario());
    for (Index c = 0; c < 3; ++c) EXPECT_EQ(q.vector(c), p.vector(c));
}
