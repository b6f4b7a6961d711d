#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "replab/errors.hpp"
#include "replab/repbuild.hpp"
#include "test_support.hpp"

using namespace replab;

namespace {

const AlgebraParams kRotation3(1.0, {-1.0}, {-1.0});
const PeriodicOrbit kOrbit3{{{0.4, 0.3}, {0.3, 0.4}, {0.3, 0.3}}};

// The affine orbit is exact only up to rounding of 1 - 0.3 - 0.4.
PeriodicOrbit exact_orbit3() {
    PeriodicOrbit o{{{0.4, 0.3}}};
    o.points.push_back(apply(kRotation3, o.points[0]));
    o.points.push_back(apply(kRotation3, o.points[1]));
    return o;
}

} // namespace

TEST(BuildLoopRep, PeriodThreeMatrix) {
    const auto rep = build_loop_rep(kRotation3, kOrbit3, 0.0);
    EXPECT_EQ(rep.kind, RepKind::loop);
    ASSERT_EQ(rep.dim(), 3u);
    EXPECT_EQ(rep.W(0, 1), Complex(std::sqrt(0.4), 0.0));
    EXPECT_EQ(rep.W(1, 2), Complex(std::sqrt(0.3), 0.0));
    EXPECT_EQ(rep.W(2, 0), Complex(std::sqrt(0.3), 0.0));
    EXPECT_EQ(rep.W(0, 0), Complex(0.0, 0.0));
    const auto r = relation_residual(kRotation3, rep.W);
    EXPECT_LT(r.max(), 1e-12);
}

TEST(BuildLoopRep, FixedPointScalar) {
    const double d = 1.0 / 3.0;
    const auto rep = build_loop_rep(kRotation3, PeriodicOrbit{{{d, d}}}, 1.25);
    ASSERT_EQ(rep.dim(), 1u);
    EXPECT_NEAR(std::abs(rep.W(0, 0) - std::polar(std::sqrt(d), 1.25)), 0.0, 1e-15);
    EXPECT_LT(relation_residual(kRotation3, rep.W).max(), 1e-15);
}

TEST(BuildLoopRep, RejectsNonPositivePoint) {
    EXPECT_THROW(build_loop_rep(kRotation3, PeriodicOrbit{{{0.0, 1.0}, {1.0, 0.0}}}, 0.0), InvalidOrbitError);
    EXPECT_THROW(build_loop_rep(kRotation3, PeriodicOrbit{{{0.5, 0.5}, {0.6, 0.5}}}, 0.0), InvalidOrbitError);
}

TEST(BuildLoopRep, DiagonalsAreExactlyTheOrbit) {
    const auto o = exact_orbit3();
    const auto rep = build_loop_rep(kRotation3, o, 2.0);
    const CMatrix D = rep.W * rep.W.adjoint();
    const CMatrix Dt = rep.W.adjoint() * rep.W;
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(D(i, i).real(), o.points[static_cast<std::size_t>(i)].d, 1e-15);
        EXPECT_NEAR(Dt(i, i).real(), o.points[static_cast<std::size_t>(i)].dt, 1e-15);
    }
    EXPECT_NEAR((D - CMatrix(D.diagonal().asDiagonal())).norm(), 0.0, 1e-15);
}

TEST(BuildLoopRep, DeterminantModulusAndPhase) {
    const auto o = exact_orbit3();
    for (double phase : {0.0, 0.5, 3.0, 6.0}) {
        const auto rep = build_loop_rep(kRotation3, o, phase);
        const Complex det = determinant(rep);
        const double prod = o.points[0].d * o.points[1].d * o.points[2].d;
        EXPECT_NEAR(std::abs(det), std::sqrt(prod), 1e-15);
        // Odd N: the 3-cycle is an even permutation.
        EXPECT_NEAR(std::abs(det - std::polar(std::sqrt(prod), phase)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(det - rep.W.determinant()), 0.0, 1e-14);
    }
}

TEST(BuildLoopRep, EvenDimensionDeterminantCarriesCycleSign) {
    // N = 4 rotation orbit: det = (-1)^(N-1) e^{i phase} sqrt(prod d).
    const auto p = theta_params(4, 1, 1.0);
    PeriodicOrbit o{{{0.7, 0.4}}};
    for (int i = 0; i < 3; ++i)
        o.points.push_back(apply(p, o.points.back()));
    const auto rep = build_loop_rep(p, o, 0.3);
    const Complex det = determinant(rep);
    EXPECT_NEAR(std::abs(det - rep.W.determinant()), 0.0, 1e-14);
    EXPECT_NEAR(std::arg(-det), 0.3, 1e-14);
}

TEST(BuildStringRep, TwoDimensional) {
    const auto rep = build_string_rep(kRotation3, NString{{{1.0, 0.0}, {0.0, 1.0}}});
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 1) = 1.0;
    EXPECT_EQ(rep.W, expected);
    EXPECT_EQ(relation_residual(kRotation3, rep.W).max(), 0.0);
    EXPECT_EQ(determinant(rep), Complex(0.0, 0.0));
}

TEST(BuildStringRep, DegenerateOrigin) {
    const auto rep = build_string_rep(kRotation3, NString{{{0.0, 0.0}}});
    EXPECT_EQ(rep.W, CMatrix::Zero(1, 1));
    const auto spec = spectrum(rep);
    ASSERT_EQ(spec.size(), 1u);
    EXPECT_EQ(spec[0].point, (PlanePoint{0.0, 0.0}));
    EXPECT_EQ(spec[0].multiplicity, 1u);
}

TEST(BuildStringRep, AlphaTwo) {
    const AlgebraParams p(2.0, {-1.0}, {-1.0});
    const auto rep = build_string_rep(p, NString{{{2.0, 0.0}, {0.0, 2.0}}});
    EXPECT_EQ(rep.W(0, 1), Complex(std::sqrt(2.0), 0.0));
}

TEST(BuildStringRep, RejectsInvalid) {
    EXPECT_THROW(build_string_rep(kRotation3, NString{{{1.0, 0.0}, {-1.0, 0.5}, {0.0, 1.0}}}),
                 InvalidStringError);
    EXPECT_THROW(build_string_rep(kRotation3, NString{{{2.0, 0.0}, {0.0, 2.0}}}), InvalidStringError);
}

TEST(BuildStringRep, TransmitterAndReceiverEndpoints) {
    const auto p = henon_preset(5, 0.3, 3);
    for (std::size_t n = 2; n <= 5; ++n)
        for (const auto& s : find_strings(p, n, 6.0)) {
            const auto rep = build_string_rep(p, s);
            const CMatrix D = rep.W * rep.W.adjoint();
            const CMatrix Dt = rep.W.adjoint() * rep.W;
            const auto last = static_cast<Eigen::Index>(n - 1);
            EXPECT_EQ(Dt(0, 0), Complex(0.0, 0.0));
            EXPECT_EQ(D(last, last), Complex(0.0, 0.0));
            EXPECT_LT(relation_residual(p, rep.W).max(), 1e-9 * residual_scale(rep.W));
        }
}

TEST(Spectrum, LoopPointsAndMultiplicity) {
    const auto o = exact_orbit3();
    const auto rep = build_loop_rep(kRotation3, o, 0.0);
    const auto spec = spectrum(rep);
    ASSERT_EQ(spec.size(), 3u);
    for (const auto& s : spec)
        EXPECT_EQ(s.multiplicity, 1u);

    const auto twice = direct_sum({rep, rep});
    const auto spec2 = spectrum(twice);
    ASSERT_EQ(spec2.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(spec2[i].multiplicity, 2u);
        EXPECT_NEAR(spec2[i].point.d, spec[i].point.d, 1e-12);
        EXPECT_NEAR(spec2[i].point.dt, spec[i].point.dt, 1e-12);
    }
}

TEST(Spectrum, RejectsNonCommutingMatrix) {
    Representation r;
    r.W = CMatrix(2, 2);
    r.W << 1.0, 2.0, 0.0, 1.0;
    EXPECT_THROW(spectrum(r), NotARepresentationError);
}

TEST(Equivalent, PhasesZeroAndPiDiffer) {
    const auto o = exact_orbit3();
    EXPECT_FALSE(equivalent(build_loop_rep(kRotation3, o, 0.0), build_loop_rep(kRotation3, o, M_PI), kRotation3));
}

TEST(Equivalent, CyclicRelabeling) {
    const auto o = exact_orbit3();
    PeriodicOrbit rotated{{o.points[1], o.points[2], o.points[0]}};
    EXPECT_TRUE(equivalent(build_loop_rep(kRotation3, o, 0.7), build_loop_rep(kRotation3, rotated, 0.7), kRotation3));
}

TEST(Equivalent, StringWithItself) {
    const auto s = build_string_rep(kRotation3, NString{{{1.0, 0.0}, {0.0, 1.0}}});
    EXPECT_TRUE(equivalent(s, s, kRotation3));
}

TEST(Equivalent, DifferentDimensionsAndReducibleInput) {
    const auto o = exact_orbit3();
    const auto loop = build_loop_rep(kRotation3, o, 0.0);
    const auto str = build_string_rep(kRotation3, NString{{{1.0, 0.0}, {0.0, 1.0}}});
    EXPECT_FALSE(equivalent(loop, str, kRotation3));
    EXPECT_THROW(equivalent(direct_sum({loop, loop}), loop, kRotation3), PreconditionError);
}

TEST(Equivalent, PhaseFamilyPairwiseInequivalent) {
    const auto o = exact_orbit3();
    std::vector<Representation> reps;
    for (int k = 0; k < 8; ++k)
        reps.push_back(build_loop_rep(kRotation3, o, 2.0 * M_PI * k / 8.0));
    for (std::size_t i = 0; i < reps.size(); ++i)
        for (std::size_t j = 0; j < reps.size(); ++j)
            EXPECT_EQ(equivalent(reps[i], reps[j], kRotation3), i == j);
}

TEST(Equivalent, GeneralKindIrreducibleAccepted) {
    const auto o = exact_orbit3();
    auto loop = build_loop_rep(kRotation3, o, 0.4);
    Representation g = loop;
    g.kind = RepKind::general;
    g.source.reset();
    EXPECT_TRUE(equivalent(g, loop, kRotation3));
}

TEST(LocallyInjective, LoopAndHenon) {
    const auto o = exact_orbit3();
    EXPECT_TRUE(locally_injective(build_loop_rep(kRotation3, o, 0.0), kRotation3));
    const auto p = henon_preset(5, 0.3, 3);
    const auto orbits = find_periodic_orbits(p, 3, {0, 6, 0, 6}, {.seeds = 512}).orbits;
    std::vector<Representation> reps;
    for (const auto& orb : orbits)
        reps.push_back(build_loop_rep(p, orb, 0.0));
    EXPECT_TRUE(locally_injective(direct_sum(reps), p));
}

TEST(LocallyInjective, MapIgnoringSecondCoordinate) {
    // beta = 0: s(x, y) = (alpha + p(x), x), so (1, 2) and (1, 5) collide.
    const AlgebraParams p(0.5, {0.0}, {1.0});
    EXPECT_FALSE(locally_injective(std::vector<PlanePoint>{{1.0, 2.0}, {1.0, 5.0}}, p));
    EXPECT_TRUE(locally_injective(std::vector<PlanePoint>{{1.0, 2.0}, {1.5, 5.0}}, p));
}
