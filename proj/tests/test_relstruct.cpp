#include <gtest/gtest.h>

#include "tob/random.hpp"
#include "tob/relstruct.hpp"

using namespace tob;

namespace {

Extension identity_system(std::size_t n) {
    return Extension(identity_extension(FiniteProbabilitySpace::uniform(n), {Permutation::rotation(n, 1)}));
}

Extension trivial_action(std::size_t n) {
    return Extension(identity_extension(FiniteProbabilitySpace::uniform(n), {Permutation::identity(n)}));
}

Extension z4_over_z2() { return Extension(rotation_extension(4, 2)); }

}  // namespace

TEST(Orbit, Examples) {
    const auto id = trivial_action(3);
    EXPECT_EQ(orbit(id.point_indicator(1), id).size(), 1u);

    const Extension z4(ExtensionData{FiniteProbabilitySpace::uniform(4), {Permutation::rotation(4, 1)},
                                     FiniteProbabilitySpace::uniform(1), {Permutation::identity(1)}, {0, 0, 0, 0}});
    const auto fs = orbit_functions(z4.point_indicator(0), z4);
    ASSERT_EQ(fs.size(), 4u);
    // enumeration order: identity, rotation by 1, its inverse, rotation by 2
    const std::size_t shift[] = {0, 1, 3, 2};
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LE((fs[k] - z4.point_indicator(shift[k])).norm(), 1e-15);
}

TEST(Orbit, EqualNorms) {
    random::Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto f = random::function(rng, ext.X().size());
        for (const auto& g : orbit_functions(f, ext)) EXPECT_NEAR(ext.X().norm(g), ext.X().norm(f), 1e-12);
    }
}

TEST(ConditionallyAP, Examples) {
    random::Rng rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto f = random::function(rng, ext.X().size());
        const auto rep = is_conditionally_ap(f, ext, {1.0, 0.1, 1e-3});
        EXPECT_TRUE(rep.all());
        for (std::size_t k = 0; k < rep.eps.size(); ++k)
            EXPECT_TRUE(leq(defect(orbit(f, ext), rep.witnesses[k]).value,
                            StoneElement::constant(ext.Y().size(), rep.eps[k]), 1e-9));
    }
    // Y = X: relative norm is the pointwise modulus.
    const auto id = identity_system(3);
    const Function f = Function::LinSpaced(3, 1.0, 3.0).cast<Complex>();
    EXPECT_TRUE(approx_equal(id.rel_norm(f), StoneElement{1, 2, 3}));
    EXPECT_TRUE(is_conditionally_ap(f, id, {0.5}).all());
    EXPECT_THROW(is_conditionally_ap(f, id, {0.0}), ArgumentError);
}

TEST(GeneratedSubmodule, Examples) {
    const auto ext = z4_over_z2();
    const auto one = generated_submodule(Function::Ones(4), ext);
    ASSERT_EQ(one.basis.size(), 1u);
    EXPECT_TRUE(approx_equal(one.basis[0], ext.encode(Function::Ones(4))));
    EXPECT_EQ(one.rank, (std::vector<std::size_t>{1, 1}));

    const auto d0 = generated_submodule(ext.point_indicator(0), ext);
    EXPECT_EQ(d0.basis.size(), 2u);
    EXPECT_EQ(d0.rank, (std::vector<std::size_t>{2, 2}));
    EXPECT_TRUE(is_suborthonormal(d0.basis));
    EXPECT_LE(invariance_residual(d0, ext), 1e-12);
}

TEST(GeneratedSubmodule, InvariantAndSuborthonormal) {
    random::Rng rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto f = random::function(rng, ext.X().size());
        const auto sub = generated_submodule(f, ext);
        EXPECT_TRUE(is_suborthonormal(sub.basis));
        EXPECT_LE(invariance_residual(sub, ext), 1e-9);
        for (const auto& v : orbit(f, ext)) EXPECT_LE(sup_norm(distance(v, project(v, sub))), 1e-9);
    }
}

TEST(Kronecker, Examples) {
    const auto id = identity_system(5);
    EXPECT_EQ(kronecker_subspace(id).dim(), 5u);
    EXPECT_TRUE(has_discrete_spectrum(id));

    const auto z = z4_over_z2();
    const auto k = kronecker_subspace(z);
    EXPECT_EQ(k.dim(), 4u);
    EXPECT_LE(group_commutator(k, z), 1e-12);
    EXPECT_LE(module_commutator(k, z), 1e-12);
}

TEST(Kronecker, RandomExtensionsHaveDiscreteSpectrum) {
    random::Rng rng(59);
    for (int trial = 0; trial < 30; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto k = kronecker_subspace(ext);
        EXPECT_EQ(k.dim(), ext.X().size());
        EXPECT_LE(group_commutator(k, ext), 1e-9);
        EXPECT_LE(module_commutator(k, ext), 1e-9);
    }
}

TEST(Subspace, Metrics) {
    const auto X = FiniteProbabilitySpace(PointSet::indexed(3), {0.5, 0.25, 0.25});
    Function a = Function::Zero(3), b = Function::Zero(3);
    a(0) = 1;
    b(1) = 1;
    const auto A = span_functions({a}, X);
    const auto AB = span_functions({a, b, a + b}, X);
    EXPECT_EQ(AB.dim(), 2u);
    EXPECT_NEAR(inclusion_residual(A, AB), 0.0, 1e-12);
    EXPECT_NEAR(inclusion_residual(AB, A), 1.0, 1e-12);
    EXPECT_NEAR(projector_distance(A, AB), 1.0, 1e-12);
    EXPECT_NEAR(projector_distance(AB, AB), 0.0, 1e-12);
    for (const auto& f : AB.functions()) EXPECT_NEAR(X.norm(f), 1.0, 1e-12);
    EXPECT_NEAR(AB.residual(a - 2.0 * b), 0.0, 1e-12);
}

TEST(Egoroff, AlreadyUniform) {
    const std::vector<StoneElement> u{{1, 1, 1}, {0.5, 0.2, 0}, {0, 0, 0}};
    const auto rep = egoroff_localize(u, {0.2, 0.3, 0.5}, 0.1, {0.3});
    EXPECT_TRUE(rep.keep.is_one());
    EXPECT_EQ(rep.removed_mass, 0.0);
    EXPECT_TRUE(rep.uniform);
    EXPECT_EQ(rep.thresholds, std::vector<std::size_t>{2});
    EXPECT_EQ(rep.convergence_index, (std::vector<std::size_t>{2, 2, 1}));
}

TEST(Egoroff, RemovesSlowestPoints) {
    // point 2 never converges, point 1 converges last
    const std::vector<StoneElement> u{{1, 1, 1}, {0, 1, 1}, {0, 0.5, 1}, {0, 0, 1}};
    const auto small = egoroff_localize(u, {0.7, 0.2, 0.1}, 0.15);
    EXPECT_EQ(small.keep, (Idempotent{std::vector<bool>{true, true, false}}));
    EXPECT_TRUE(small.uniform);
    const auto big = egoroff_localize(u, {0.7, 0.2, 0.1}, 0.35, {0.1});
    EXPECT_EQ(big.keep, (Idempotent{std::vector<bool>{true, false, false}}));
    EXPECT_EQ(big.thresholds, std::vector<std::size_t>{1});
    const auto none = egoroff_localize(u, {0.7, 0.2, 0.1}, 0.05);
    EXPECT_TRUE(none.keep.is_one());
    EXPECT_FALSE(none.uniform);
    EXPECT_EQ(none.convergence_index[2], never);

    EXPECT_THROW(egoroff_localize({{0.0}, {1.0}}, {1.0}, 0.1), ArgumentError);
    EXPECT_THROW(egoroff_localize({{0.0}}, {1.0}, 0.0), ArgumentError);
}

TEST(Localization, ApRecheck) {
    random::Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto f = random::function(rng, ext.X().size());
        for (double d : {0.5, 0.05}) {
            const auto rep = localize_ap(f, ext, d, {0.5, 0.1});
            EXPECT_TRUE(rep.passed(d));
        }
    }
}

TEST(ApModule, ClosureProperties) {
    random::Rng rng(67);
    for (int trial = 0; trial < 40; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto f = random::function(rng, ext.X().size());
        const auto g = random::function(rng, ext.X().size());
        const auto h = random::function(rng, ext.Y().size());
        for (double eps : {0.5, 0.1}) {
            const auto rep = ap_module_checks(f, g, h, ext, eps);
            EXPECT_TRUE(rep.sum);
            EXPECT_TRUE(rep.multiple);
            EXPECT_TRUE(rep.conjugate);
            EXPECT_TRUE(rep.modulus);
            EXPECT_TRUE(rep.translate);
            EXPECT_TRUE(rep.reverse_triangle);
        }
    }
}

TEST(HeineBorel, OrbitCertifiedInsideGeneratedSubmodule) {
    const auto z = z4_over_z2();
    const auto c = heine_borel_certificate(z.point_indicator(0), z, 0.5);
    EXPECT_TRUE(c.passed);
    EXPECT_NEAR(c.radius, std::sqrt(0.5), 1e-12);
    EXPECT_GT(c.net_size, 1u);
}

TEST(CrossCheck, Fixtures) {
    for (const auto& ext : {identity_system(4), trivial_action(3), z4_over_z2()}) {
        const auto rep = theorem_cross_check(ext);
        EXPECT_TRUE(rep.passed(1e-7));
        EXPECT_TRUE(rep.corollary_agrees());
        EXPECT_EQ(rep.kronecker_dim, ext.X().size());
        EXPECT_EQ(rep.weakly_mixing_dim, 0u);
        EXPECT_LE(rep.fm_ap, 1e-12);
        EXPECT_FALSE(rep.note.empty());
    }
}

TEST(CrossCheck, RandomExtensions) {
    random::Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto rep = theorem_cross_check(ext);
        EXPECT_TRUE(rep.passed(1e-7)) << "trial " << trial << " fm_ap " << rep.fm_ap << " fm_tob " << rep.fm_tob;
        EXPECT_TRUE(rep.corollary_agrees());
    }
}
