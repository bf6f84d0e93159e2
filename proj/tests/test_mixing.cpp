#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tob/mixing.hpp"
#include "tob/random.hpp"

using namespace tob;

namespace {

ModuleVector scalar_vector(std::vector<Complex> values) {
    std::vector<Fiber> f;
    for (auto v : values) {
        Fiber x(1);
        x(0) = v;
        f.push_back(x);
    }
    return ModuleVector(FiberSpace::uniform(values.size(), 1), std::move(f));
}

FiniteSet random_set(random::Rng& rng, std::size_t max_points, std::size_t max_dim, std::size_t max_size) {
    const auto space = random::fiber_space(rng, max_points, max_dim);
    return random::finite_set(rng, space, random::uniform_size(rng, 1, max_size));
}

}  // namespace

TEST(EqIdempotent, Examples) {
    const auto x = scalar_vector({1, 0, 2});
    const auto y = scalar_vector({0, 3, 0});
    EXPECT_TRUE(eq_idempotent(x, x).is_one());
    // disjoint supports: equal exactly where both vanish
    EXPECT_EQ(eq_idempotent(x, y), (Idempotent{std::vector<bool>{false, false, false}}));
    const auto z = scalar_vector({1, 0, 0});
    const auto u = scalar_vector({0, 0, 0});
    EXPECT_EQ(eq_idempotent(z, u), (Idempotent{std::vector<bool>{false, true, true}}));
}

TEST(EqIdempotent, BSetAxiomsOnRandomTriples) {
    random::Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto space = random::fiber_space(rng, 6, 3);
        const auto n = space.points();
        // Share fibers at random so that equalities actually occur.
        auto x = random::vector(rng, space);
        auto y = random::vector(rng, space);
        auto z = random::vector(rng, space);
        y = mix(random::partition(rng, n, 2), std::vector<ModuleVector>{x, y});
        z = mix(random::partition(rng, n, 2), std::vector<ModuleVector>{y, z});
        const auto xy = eq_idempotent(x, y), yx = eq_idempotent(y, x);
        const auto yz = eq_idempotent(y, z), xz = eq_idempotent(x, z);
        EXPECT_EQ(xy, yx);
        EXPECT_TRUE(leq(xy & yz, xz));
        EXPECT_EQ(xy.is_one(), approx_equal(x, y));
    }
}

TEST(Mix, Examples) {
    random::Rng rng(2);
    const auto space = FiberSpace({1, 2, 3});
    const auto x = random::vector(rng, space);
    EXPECT_TRUE(approx_equal(mix(PartitionOfUnity::trivial(3), std::vector<ModuleVector>{x}), x));
    const auto p = Idempotent{std::vector<bool>{true, false, true}};
    const PartitionOfUnity pp({p, p.complement()});
    EXPECT_TRUE(approx_equal(mix(pp, std::vector<ModuleVector>{x, x}), x));
    EXPECT_THROW(mix(pp, std::vector<ModuleVector>{x}), ArgumentError);
}

TEST(Mix, NormOfDifferenceIsMixed) {
    random::Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto space = random::fiber_space(rng, 6, 3);
        const std::size_t k = random::uniform_size(rng, 1, 4);
        const auto family = random::finite_set(rng, space, k);
        const auto p = random::partition(rng, space.points(), k);
        const auto z = random::vector(rng, space);
        std::vector<StoneElement> dists;
        for (const auto& x : family) dists.push_back(distance(z, x));
        EXPECT_TRUE(approx_equal(distance(z, mix(p, family)), mix(p, dists), 1e-12));
        for (std::size_t a = 0; a < k; ++a) EXPECT_TRUE(leq(p.part(a), eq_idempotent(mix(p, family), family[a])));
    }
}

TEST(MixMembership, Examples) {
    random::Rng rng(7);
    const auto space = FiberSpace({2, 2, 1, 3});
    const auto M = random::finite_set(rng, space, 3);

    const auto own = mix_membership(M[1], M);
    ASSERT_TRUE(own.has_value());
    EXPECT_EQ(own->assignment, std::vector<std::size_t>{1});
    EXPECT_EQ(own->partition.size(), 1u);

    const auto p = PartitionOfUnity::from_owner({0, 2, 2, 0}, 3);
    const auto x = mix(p, std::vector<ModuleVector>{M[0], M[1], M[2]});
    const auto w = mix_membership(x, M);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->assignment, (std::vector<std::size_t>{0, 2}));
    std::vector<ModuleVector> chosen;
    for (auto i : w->assignment) chosen.push_back(M[i]);
    EXPECT_TRUE(approx_equal(mix(w->partition, chosen), x));

    const double tol = 1e-9;
    auto bumped = x;
    bumped.fiber(2)(0) += 10 * tol;
    EXPECT_FALSE(mix_membership(bumped, M, tol).has_value());
}

TEST(MixMembership, RandomMixingsAreMembers) {
    random::Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto M = random_set(rng, 6, 3, 4);
        const auto p = random::partition(rng, M.space().points(), M.size());
        const auto x = mix(p, M);
        const auto w = mix_membership(x, M);
        ASSERT_TRUE(w.has_value());
        for (std::size_t a = 0; a < w->partition.size(); ++a)
            EXPECT_TRUE(leq(w->partition.part(a), eq_idempotent(x, M[w->assignment[a]])));
    }
}

TEST(Defect, InvariantUnderMixing) {
    random::Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto M = random_set(rng, 5, 2, 4);
        const auto F = random::finite_set(rng, M.space(), random::uniform_size(rng, 1, 3));
        FiniteSet sampled = M;
        for (int s = 0; s < 6; ++s) sampled.push_back(mix(random::partition(rng, M.space().points(), M.size()), M));
        EXPECT_TRUE(approx_equal(defect(sampled, F).value, defect(M, F).value, 1e-12));
    }
}

TEST(Cyclic, DefectZeroGivesOnePart) {
    random::Rng rng(3);
    const auto M = random::finite_set(rng, FiberSpace::uniform(1, 2), 1);
    const double r = sup_norm(sup_lattice_norm(M)) + 1;
    const auto w = cyclic_witness(M, 0.5, r);
    ASSERT_EQ(w.parts.size(), 1u);
    EXPECT_TRUE(w.parts[0].q.is_one());
    EXPECT_TRUE(verify_cyclic(M, 0.5, w).passed);
}

TEST(Cyclic, RoundTripOnRandomSets) {
    random::Rng rng(19);
    for (double eps : {0.5, 0.1}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto M = random_set(rng, 6, 3, 6);
            const double r = sup_norm(sup_lattice_norm(M)) + 1e-3;
            const auto w = cyclic_witness(M, eps, r);
            const auto v = verify_cyclic(M, eps, w);
            EXPECT_TRUE(v.passed) << v.failure;
            ASSERT_TRUE(v.localized_defect.has_value());
            EXPECT_TRUE(leq(*v.localized_defect, StoneElement::constant(M.space().points(), eps), 1e-9));
            for (const auto& part : w.parts) {
                EXPECT_EQ(part.generators.size(), part.cardinality);
                for (const auto& y : part.generators)
                    EXPECT_TRUE(leq(lattice_norm(y), StoneElement::constant(M.space().points(), 2 * r)));
            }
            // Localized defect agrees with the brute-force oracle.
            const auto p = w.partition();
            for (std::size_t k = 0; k < w.parts.size(); ++k) {
                const auto ref = oracle::defect(M, w.parts[k].generators);
                for (std::size_t pt = 0; pt < ref.size(); ++pt)
                    if (p.part(k)[pt]) EXPECT_LE(ref[pt], eps + 1e-9);
            }
        }
    }
}

TEST(Cyclic, HalvedEpsUsuallyFails) {
    // The greedy seed 1 is within 1.0 of 0 but not within 0.5.
    const auto M = FiniteSet({scalar_vector({0}), scalar_vector({1})});
    const auto w = cyclic_witness(M, 1.0, 3.0);
    EXPECT_TRUE(verify_cyclic(M, 1.0, w).passed);
    ASSERT_EQ(w.parts.size(), 1u);
    EXPECT_EQ(w.parts[0].cardinality, 1u);
    const auto tight = verify_cyclic(M, 0.5, w);
    EXPECT_FALSE(tight.passed);
    EXPECT_FALSE(tight.failure.empty());
}

TEST(Cyclic, EmptySetIsVacuous) {
    const FiniteSet M(FiberSpace::uniform(3, 1));
    EXPECT_TRUE(verify_cyclic(M, 0.1, CyclicWitness{}).passed);
    EXPECT_THROW(cyclic_witness(M, 0.1, 1.0), ArgumentError);
}

TEST(Cyclic, UncoveredCandidatesRaiseConstructionError) {
    const auto M = FiniteSet({scalar_vector({0}), scalar_vector({2})});
    EXPECT_THROW(cyclic_witness_from_candidates(M, 0.5, {FiniteSet({scalar_vector({1})})}), ConstructionError);
}
