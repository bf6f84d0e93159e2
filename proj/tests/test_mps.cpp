#include <gtest/gtest.h>

#include <set>

#include "tob/mps.hpp"
#include "tob/random.hpp"

using namespace tob;

namespace {

Function fn(std::vector<Complex> v) { return Eigen::Map<Function>(v.data(), static_cast<Eigen::Index>(v.size())); }

bool close(const Function& a, const Function& b, double tol = 1e-9) {
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Naive closure: multiply every pair until nothing new appears.
std::size_t brute_force_order(const std::vector<Permutation>& gens, std::size_t n) {
    std::set<Permutation> all{Permutation::identity(n)};
    all.insert(gens.begin(), gens.end());
    for (bool grew = true; grew;) {
        grew = false;
        std::vector<Permutation> snapshot(all.begin(), all.end());
        for (const auto& a : snapshot)
            for (const auto& b : snapshot) grew |= all.insert(a * b).second;
    }
    return all.size();
}

Extension z4_over_z2() { return Extension(rotation_extension(4, 2)); }

}  // namespace

TEST(ProbabilitySpace, RejectsBadWeights) {
    EXPECT_THROW(FiniteProbabilitySpace(PointSet::indexed(2), {0.5, 0.6}), ArgumentError);
    EXPECT_THROW(FiniteProbabilitySpace(PointSet::indexed(2), {1.0, 0.0}), ArgumentError);
    EXPECT_THROW(FiniteProbabilitySpace(PointSet::indexed(2), {1.0}), ArgumentError);
    EXPECT_NO_THROW(FiniteProbabilitySpace(PointSet::indexed(3), {0.5, 0.25, 0.25}));
}

TEST(Permutation, AlgebraAndValidation) {
    EXPECT_THROW(Permutation({0, 0}), ArgumentError);
    const Permutation a({1, 2, 0}), b({1, 0, 2});
    EXPECT_TRUE((a * a.inverse()).is_identity());
    EXPECT_EQ((a * b)(0), a(b(0)));
}

TEST(EnumerateGroup, Examples) {
    EXPECT_EQ(enumerate_group({Permutation::identity(4)}, 4).size(), 1u);
    EXPECT_EQ(enumerate_group({Permutation({1, 2, 3, 0})}, 4).size(), 4u);
    EXPECT_THROW(enumerate_group({Permutation({1, 2, 3, 0})}, 4, 3), CapExceededError);
    EXPECT_THROW(enumerate_group({Permutation::identity(4)}, 4, 0), ArgumentError);
    const auto g = enumerate_group({Permutation({1, 0, 2}), Permutation({1, 2, 0})}, 3);
    EXPECT_EQ(g.size(), 6u);
    EXPECT_TRUE(g.elements().front().is_identity());
}

TEST(EnumerateGroup, LagrangeOnS5) {
    random::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<Permutation> gens{random::permutation(rng, 5), random::permutation(rng, 5)};
        const auto g = enumerate_group(gens, 5);
        EXPECT_EQ(120 % g.size(), 0u);
        EXPECT_EQ(g.size(), brute_force_order(gens, 5));
        for (const auto& a : g.elements()) {
            EXPECT_TRUE(g.find(a.inverse()).has_value());
            for (const auto& s : gens) EXPECT_TRUE(g.find(s * a).has_value());
        }
    }
}

TEST(EnumerateGroup, Deterministic) {
    const std::vector<Permutation> gens{Permutation({1, 2, 3, 4, 0}), Permutation({1, 0, 2, 3, 4})};
    EXPECT_EQ(enumerate_group(gens, 5).elements(), enumerate_group(gens, 5).elements());
}

TEST(ValidateExtension, Examples) {
    const auto X = FiniteProbabilitySpace::uniform(3);
    EXPECT_TRUE(validate_extension(identity_extension(X, {Permutation({1, 2, 0})})).valid);

    ExtensionData bad{FiniteProbabilitySpace::uniform(4), {Permutation::identity(4)},
                      FiniteProbabilitySpace(PointSet::indexed(2), {0.6, 0.4}), {Permutation::identity(2)},
                      {0, 0, 1, 1}};
    const auto rep = validate_extension(bad);
    EXPECT_FALSE(rep.valid);
    ASSERT_FALSE(rep.violations.empty());
    EXPECT_NE(rep.violations.front().find("pushforward"), std::string::npos);
    EXPECT_THROW(Extension{bad}, InvalidExtensionError);

    EXPECT_TRUE(validate_extension(rotation_extension(4, 2)).valid);

    // pi(x) = floor(x / 2) does not intertwine the rotations.
    auto twisted = rotation_extension(4, 2);
    twisted.factor = {0, 0, 1, 1};
    const auto tw = validate_extension(twisted);
    EXPECT_FALSE(tw.valid);
    EXPECT_NE(tw.violations.front().find("intertwining"), std::string::npos);

    ExtensionData moving{FiniteProbabilitySpace(PointSet::indexed(2), {0.75, 0.25}), {Permutation({1, 0})},
                         FiniteProbabilitySpace::uniform(1), {Permutation::identity(1)}, {0, 0}};
    EXPECT_NE(validate_extension(moving).violations.front().find("measure preservation"), std::string::npos);
}

TEST(Koopman, Examples) {
    const auto ext = z4_over_z2();
    ASSERT_EQ(ext.group_size(), 4u);
    const auto delta0 = ext.point_indicator(0);
    EXPECT_TRUE(close(ext.koopman(0, delta0), delta0));
    // BFS order: identity, then the generator.
    ASSERT_EQ(ext.upstairs_element(1), Permutation::rotation(4, 1));
    EXPECT_TRUE(close(ext.koopman(1, delta0), ext.point_indicator(1)));
    EXPECT_THROW(ext.koopman(4, delta0), UnknownElementError);
}

TEST(Koopman, HomomorphismIsometryLattice) {
    random::Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto& X = ext.X();
        const auto f = random::function(rng, X.size());
        const auto g = random::function(rng, X.size());
        for (std::size_t t = 0; t < ext.group_size(); ++t) {
            EXPECT_NEAR(X.norm(ext.koopman(t, f)), X.norm(f), 1e-12);
            EXPECT_NEAR(std::abs(X.integrate(ext.koopman(t, f)) - X.integrate(f)), 0.0, 1e-12);
            const Function re_f = f.real().cast<Complex>(), re_g = g.real().cast<Complex>();
            const Function join = re_f.real().cwiseMax(re_g.real()).cast<Complex>();
            const Function lhs = ext.koopman(t, join);
            const Function rhs =
                ext.koopman(t, re_f).real().cwiseMax(ext.koopman(t, re_g).real()).cast<Complex>();
            EXPECT_TRUE(close(lhs, rhs));
            for (std::size_t s = 0; s < ext.group_size(); ++s) {
                const auto st = ext.upstairs_element(s) * ext.upstairs_element(t);
                // T_s T_t = T_{st}
                std::size_t u = ext.group_size();
                for (std::size_t k = 0; k < ext.group_size(); ++k)
                    if (ext.upstairs_element(k) == st && ext.downstairs_element(k) ==
                                                             ext.downstairs_element(s) * ext.downstairs_element(t))
                        u = k;
                ASSERT_LT(u, ext.group_size());
                EXPECT_TRUE(close(ext.koopman(s, ext.koopman(t, f)), ext.koopman(u, f)));
            }
        }
    }
}

TEST(CondExpectation, Examples) {
    const auto X = FiniteProbabilitySpace::uniform(4);
    const auto Y = FiniteProbabilitySpace::uniform(2);
    const Extension ext(ExtensionData{X, {Permutation::identity(4)}, Y, {Permutation::identity(2)}, {0, 0, 1, 1}});
    EXPECT_TRUE(close(ext.cond_expectation(fn({1, 3, 2, 4})), fn({2, 3})));
    EXPECT_TRUE(close(ext.cond_expectation(Function::Constant(4, 2.5)), Function::Constant(2, 2.5)));
    const auto g = fn({Complex(1, 2), -3});
    EXPECT_TRUE(close(ext.cond_expectation(ext.embed(g)), g));
    EXPECT_TRUE(close(embed_J(Function::Ones(2), ext), Function::Ones(4)));

    const auto r = ext.rel_norm(ext.point_indicator(0));
    EXPECT_NEAR(r[0], std::sqrt(0.5), 1e-15);
    EXPECT_EQ(r[1], 0.0);
    EXPECT_TRUE(approx_equal(ext.rel_norm(Function::Ones(4)), StoneElement{1, 1}));
}

TEST(CondExpectation, AdjointTowerRelativeIsometry) {
    random::Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto& X = ext.X();
        const auto& Y = ext.Y();
        const auto f = random::function(rng, X.size());
        const auto h = random::function(rng, X.size());
        const auto g = random::function(rng, Y.size());
        EXPECT_LE(std::abs(X.inner(ext.embed(g), f) - Y.inner(g, ext.cond_expectation(f))), 1e-9);
        EXPECT_LE(std::abs(Y.integrate(ext.cond_expectation(f)) - X.integrate(f)), 1e-9);
        const auto n = ext.rel_norm(f);
        double sq = 0;
        for (std::size_t y = 0; y < Y.size(); ++y) sq += Y.weight(y) * n[y] * n[y];
        EXPECT_NEAR(sq, X.norm(f) * X.norm(f), 1e-9);
        EXPECT_TRUE(close(ext.embed(g.cwiseProduct(g)), ext.embed(g).cwiseProduct(ext.embed(g))));
        for (std::size_t t = 0; t < ext.group_size(); ++t) {
            const auto lhs = ext.rel_inner(ext.koopman(t, f), ext.koopman(t, h));
            const auto rhs = ext.koopman_base(t, ext.rel_inner(f, h));
            EXPECT_TRUE(close(lhs, rhs));
            EXPECT_TRUE(close(ext.koopman(t, ext.embed(g)), ext.embed(ext.koopman_base(t, g))));
        }
        // reverse triangle | |f| - |h| |_Y <= |f - h|_Y
        const Function af = f.cwiseAbs().cast<Complex>(), ah = h.cwiseAbs().cast<Complex>();
        EXPECT_TRUE(leq(ext.rel_norm(af - ah), ext.rel_norm(f - h)));
    }
}

TEST(RelModule, EncodeDecode) {
    random::Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const Extension ext(random::extension(rng, 12));
        const auto f = random::function(rng, ext.X().size());
        const auto g = random::function(rng, ext.Y().size());
        const auto e = ext.encode(f);
        EXPECT_TRUE(close(ext.decode(e), f));
        EXPECT_TRUE(approx_equal(lattice_norm(e), ext.rel_norm(f)));
        EXPECT_TRUE(approx_equal(lattice_norm(ext.encode(Function::Ones(static_cast<Eigen::Index>(ext.X().size())))),
                                 StoneElement::constant(ext.Y().size(), 1.0)));
        EXPECT_TRUE(approx_equal(ext.encode(ext.embed(g).cwiseProduct(f)), Extension::coefficient(g) * e));
        const auto ip = inner(e, ext.encode(ext.embed(g)));
        const auto ref = ext.rel_inner(f, ext.embed(g));
        for (std::size_t y = 0; y < ext.Y().size(); ++y)
            EXPECT_LE(std::abs(ip[y] - ref(static_cast<Eigen::Index>(y))), 1e-9);
    }
}

TEST(Extension, RandomGeneratorIsValid) {
    random::Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto data = random::extension(rng, 12);
        EXPECT_LE(data.upstairs.size(), 12u);
        const auto rep = validate_extension(data);
        EXPECT_TRUE(rep.valid) << (rep.violations.empty() ? "" : rep.violations.front());
    }
}
