#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "tob/lns.hpp"
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

ModuleVector fiber_vector(std::vector<std::vector<Complex>> fibers) {
    std::vector<std::size_t> dims;
    std::vector<Fiber> f;
    for (auto& v : fibers) {
        dims.push_back(v.size());
        Fiber x(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
        f.push_back(x);
    }
    return ModuleVector(FiberSpace(dims), std::move(f));
}

// Suborthonormal basis of a uniform space: random unitary columns per point,
// some switched off so that ranks vary between points.
FiniteSet random_basis(random::Rng& rng, std::size_t points, std::size_t dim, std::size_t d) {
    const auto space = FiberSpace::uniform(points, dim);
    std::vector<ModuleVector> basis(d, ModuleVector::zero(space));
    for (std::size_t w = 0; w < points; ++w) {
        Eigen::MatrixXcd A(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < A.size(); ++i) A(i) = random::gaussian_complex(rng);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
        const Eigen::MatrixXcd Q = qr.householderQ();
        for (std::size_t j = 0; j < d; ++j)
            if (j == 0 || random::uniform_real(rng, 0, 1) < 0.8)
                basis[j].fiber(w) = Q.col(static_cast<Eigen::Index>(j));
    }
    return FiniteSet(space, basis);
}

}  // namespace

TEST(LatticeNorm, Examples) {
    const auto space = FiberSpace({2, 3});
    EXPECT_EQ(lattice_norm(ModuleVector::zero(space)), StoneElement::zero(2));
    EXPECT_DOUBLE_EQ(lattice_norm(fiber_vector({{3, 4}}))[0], 5.0);
    const auto x = fiber_vector({{1, 0}, {0, Complex(0, 1)}});
    EXPECT_TRUE(approx_equal(lattice_norm(x), StoneElement{1, 1}));
    EXPECT_TRUE(approx_equal(lattice_norm(ComplexCoefficient{2, 0} * x), StoneElement{2, 0}));
}

TEST(LatticeNorm, AxiomsOnRandomVectors) {
    random::Rng rng(3);
    for (int t = 0; t < 300; ++t) {
        const auto s = random::fiber_space(rng, 6, 4);
        const auto x = random::vector(rng, s);
        const auto y = random::vector(rng, s);
        const auto l = random::coefficient(rng, s.points());
        EXPECT_TRUE(leq(lattice_norm(x + y), lattice_norm(x) + lattice_norm(y), 1e-12));
        EXPECT_TRUE(approx_equal(lattice_norm(l * x), l.modulus() * lattice_norm(x), 1e-12));
    }
}

TEST(ModuleVector, DimensionChecks) {
    EXPECT_THROW(ModuleVector(FiberSpace({1, 2}), {Fiber::Zero(1)}), DimensionError);
    EXPECT_THROW(ModuleVector(FiberSpace({1, 2}), {Fiber::Zero(1), Fiber::Zero(1)}), DimensionError);
    EXPECT_THROW(FiberSpace({1, 0}), ArgumentError);
    EXPECT_THROW(ModuleVector::zero(FiberSpace({1})) + ModuleVector::zero(FiberSpace({2})), DimensionError);
}

TEST(Defect, Examples) {
    random::Rng rng(5);
    const auto s = random::fiber_space(rng, 5, 3);
    const auto M = random::finite_set(rng, s, 4);
    EXPECT_EQ(sup_norm(defect(M, M).value), 0.0);

    const FiniteSet one({scalar_vector({3.0})});
    const FiniteSet other({scalar_vector({1.0})});
    EXPECT_DOUBLE_EQ(defect(one, other).value[0], 2.0);
}

TEST(Defect, MatchesExhaustiveDoubleLoop) {
    random::Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        const auto s = random::fiber_space(rng, 3, 3);
        const auto M = random::finite_set(rng, s, 4);
        const auto F = random::finite_set(rng, s, 2);
        const auto got = defect(M, F);
        const auto want = oracle::defect(M, F);
        for (std::size_t w = 0; w < s.points(); ++w) EXPECT_NEAR(got.value[w], want[w], 1e-12);
        // argmin / attained_by are consistent with the value
        for (std::size_t w = 0; w < s.points(); ++w) {
            const auto i = got.attained_by[w];
            const auto j = got.argmin[i][w];
            EXPECT_NEAR(distance(M[i], F[j])[w], got.value[w], 1e-12);
        }
    }
}

TEST(Defect, EmptyArgumentsThrow) {
    const auto s = FiberSpace::uniform(2, 1);
    const FiniteSet empty(s);
    const FiniteSet some(s, {ModuleVector::zero(s)});
    EXPECT_THROW(defect(empty, some), ArgumentError);
    EXPECT_THROW(defect(some, empty), ArgumentError);
}

TEST(IsUtob, EveryFiniteSetIsUtob) {
    random::Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const auto s = random::fiber_space(rng, 4, 3);
        const auto M = random::finite_set(rng, s, random::uniform_size(rng, 1, 6));
        for (double eps : {2.0, 0.5, 1e-3}) {
            const auto rep = is_utob(M, eps);
            EXPECT_TRUE(rep.verdict);
            EXPECT_LE(rep.witness.size(), M.size());
            // recompute independently
            const auto d = oracle::defect(M, rep.witness);
            for (double v : d) EXPECT_LE(v, eps + 1e-9);
        }
    }
}

TEST(IsUtob, LargeEpsNeedsOneCentre) {
    random::Rng rng(29);
    const auto s = FiberSpace::uniform(3, 2);
    FiniteSet M(s);
    for (int i = 0; i < 10; ++i) M.push_back(random::bounded_vector(rng, s, 1.0));
    EXPECT_EQ(is_utob(M, 2.5).witness.size(), 1u);
    EXPECT_THROW(is_utob(M, 0.0), ArgumentError);
}

TEST(DiscNet, CoversTheDisc) {
    random::Rng rng(31);
    for (double radius : {0.3, 1.0, 2.5}) {
        for (double rho : {0.7, 0.25, 0.1}) {
            const auto grid = disc_net(radius, rho);
            for (int t = 0; t < 2000; ++t) {
                const Complex z = radius * random::unit_disc(rng);
                double best = 1e9;
                for (auto g : grid) best = std::min(best, std::abs(z - g));
                ASSERT_LE(best, rho + 1e-12) << radius << " " << rho;
            }
            // worst case on the boundary circle
            for (int a = 0; a < 3600; ++a) {
                const Complex z = std::polar(radius, 2 * std::numbers::pi * a / 3600.0);
                double best = 1e9;
                for (auto g : grid) best = std::min(best, std::abs(z - g));
                ASSERT_LE(best, rho + 1e-12);
            }
        }
    }
}

TEST(HeineBorel, Examples) {
    random::Rng rng(37);
    const auto basis1 = random_basis(rng, 3, 2, 1);
    const auto zero_net = heine_borel_net(basis1, 0.0, 0.1);
    ASSERT_EQ(zero_net.size(), 1u);
    EXPECT_EQ(sup_norm(lattice_norm(zero_net[0])), 0.0);

    EXPECT_EQ(heine_borel_net(basis1, 1.0, 2.0).size(), 1u);

    const auto basis2 = random_basis(rng, 3, 3, 2);
    const auto net = heine_borel_net(basis2, 1.0, 0.5);
    for (int t = 0; t < 1000; ++t) {
        // x = sum lambda_j e_j with |x| <= 1: sample the coefficient vector in the unit ball
        ModuleVector x = ModuleVector::zero(basis2.space());
        for (std::size_t w = 0; w < 3; ++w) {
            Eigen::Vector2cd c(random::gaussian_complex(rng), random::gaussian_complex(rng));
            c *= random::uniform_real(rng, 0, 1) / c.norm();
            x.fiber(w) = c(0) * basis2[0].fiber(w) + c(1) * basis2[1].fiber(w);
        }
        ASSERT_TRUE(leq(lattice_norm(x), StoneElement::one(3), 1e-12));
        const auto d = oracle::defect(FiniteSet({x}), net);
        for (double v : d) ASSERT_LE(v, 0.5 + 1e-9);
    }
}

TEST(HeineBorel, Errors) {
    random::Rng rng(41);
    const auto basis = random_basis(rng, 2, 4, 4);
    EXPECT_THROW(heine_borel_net(basis, 1.0, 0.01, 1000), SizeCapError);
    FiniteSet bad(FiberSpace::uniform(1, 2), {fiber_vector({std::vector<Complex>{1, 1}})});
    EXPECT_THROW(heine_borel_net(bad, 1.0, 0.5), PreconditionError);
}

TEST(ZonotopeDistance, Examples) {
    const FiniteSet F({scalar_vector({1.0})});
    const auto d = zonotope_distance(scalar_vector({2.0}), Zonotope{F});
    EXPECT_NEAR(d.value[0], 1.0, 1e-7);

    random::Rng rng(43);
    for (int t = 0; t < 100; ++t) {
        const auto s = random::fiber_space(rng, 6, 4);
        const auto G = random::finite_set(rng, s, random::uniform_size(rng, 1, 3));
        std::vector<ComplexCoefficient> lambda;
        for (std::size_t j = 0; j < G.size(); ++j) lambda.push_back(random::disc_coefficient(rng, s.points()));
        const auto x = combine(lambda, G);
        const auto r = zonotope_distance(x, Zonotope{G});
        EXPECT_LE(sup_norm(r.value), 1e-6);
    }
}

TEST(ZonotopeDistance, AgreesWithGridBruteForce) {
    random::Rng rng(47);
    for (int t = 0; t < 20; ++t) {
        const std::size_t dim = random::uniform_size(rng, 1, 3);
        const auto s = FiberSpace::uniform(1, dim);
        const auto G = random::finite_set(rng, s, 2, 0.7);
        const auto x = random::vector(rng, s, 1.5);
        const auto got = zonotope_distance(x, Zonotope{G}).value[0];
        const auto want = oracle::two_generator_grid(oracle::raw(x)[0], oracle::raw(G[0])[0],
                                                     oracle::raw(G[1])[0], 0.01);
        EXPECT_NEAR(got, want, 0.02);
        EXPECT_LE(got, want + 1e-6);  // solver is an optimum, grid only an upper bound
    }
}

TEST(ZonotopeDistance, IterationLimitCarriesBestValue) {
    random::Rng rng(53);
    const auto s = FiberSpace::uniform(2, 3);
    const auto G = random::finite_set(rng, s, 3);
    const auto x = random::vector(rng, s, 4.0);
    try {
        zonotope_distance(x, Zonotope{G}, SolverOptions{1e-14, 1});
        FAIL() << "expected IterationLimitError";
    } catch (const IterationLimitError& e) {
        EXPECT_EQ(e.best().size(), 2u);
        for (double v : e.best()) EXPECT_GE(v, 0.0);
    }
    EXPECT_THROW(zonotope_distance(x, Zonotope{G}, SolverOptions{0.0, 10}), ArgumentError);
}

TEST(CpCheck, Examples) {
    random::Rng rng(59);
    const auto s = random::fiber_space(rng, 4, 3);
    const auto F = random::finite_set(rng, s, 3);
    // idempotent selections from F are points of Z_F
    FiniteSet M(s);
    for (int i = 0; i < 5; ++i) M.push_back(selected_point(random::partition(rng, s.points(), 3), F));
    for (double eps : {1.0, 1e-3}) EXPECT_TRUE(cp_check(M, F, eps).passed);

    const FiniteSet two({scalar_vector({2.0})});
    const FiniteSet e1({scalar_vector({1.0})});
    const auto rep = cp_check(two, e1, 0.5);
    EXPECT_FALSE(rep.passed);
    EXPECT_EQ(rep.first_violation, 0u);
}

TEST(CpCheck, MixingsPlusSmallNoisePass) {
    random::Rng rng(61);
    for (int t = 0; t < 30; ++t) {
        const auto s = random::fiber_space(rng, 5, 3);
        const auto F = random::finite_set(rng, s, 2);
        const double eps = 0.2;
        FiniteSet M(s);
        for (int i = 0; i < 4; ++i)
            M.push_back(selected_point(random::partition(rng, s.points(), 2), F) +
                        random::bounded_vector(rng, s, eps / 2));
        EXPECT_TRUE(cp_check(M, F, eps).passed);
    }
}

TEST(CpWitness, SelectionsCertifyMembership) {
    random::Rng rng(67);
    for (int t = 0; t < 50; ++t) {
        const auto s = random::fiber_space(rng, 5, 3);
        const auto M = random::finite_set(rng, s, random::uniform_size(rng, 1, 6));
        const double eps = random::uniform_real(rng, 0.1, 2.0);
        const auto w = cp_witness_from_utob(M, eps);
        ASSERT_EQ(w.selections.size(), M.size());
        for (std::size_t i = 0; i < M.size(); ++i) {
            const auto& p = w.selections[i];
            for (std::size_t y = 0; y < w.generators.size(); ++y)
                EXPECT_TRUE(leq(p.part(y).apply(distance(M[i], w.generators[y])),
                                StoneElement::constant(s.points(), eps)));
            EXPECT_TRUE(leq(distance(M[i], selected_point(p, w.generators)),
                            StoneElement::constant(s.points(), eps)));
        }
    }
}

TEST(CpWitness, KroneckerSelectionsWhenWitnessIsM) {
    random::Rng rng(71);
    const auto s = random::fiber_space(rng, 4, 2);
    const auto M = random::finite_set(rng, s, 3);
    const auto w = cp_witness(M, M, 0.1);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(w.selections[i].part(i).is_one());
    // one point: nearest neighbour selection
    const FiniteSet F({scalar_vector({0.0}), scalar_vector({1.0})});
    const FiniteSet x({scalar_vector({0.8})});
    EXPECT_TRUE(cp_witness(x, F, 0.5).selections[0].part(1).is_one());
    EXPECT_THROW(cp_witness(x, F, 0.1), PreconditionError);
}

TEST(TruncateToBall, Examples) {
    random::Rng rng(73);
    const auto s = random::fiber_space(rng, 4, 3);
    FiniteSet F(s);
    for (int i = 0; i < 3; ++i) F.push_back(random::bounded_vector(rng, s, 2.0));
    const auto T = truncate_to_ball(F, 1.0);
    for (std::size_t i = 0; i < F.size(); ++i) EXPECT_TRUE(approx_equal(T[i], F[i], 0.0));

    const FiniteSet five({scalar_vector({5.0})});
    EXPECT_EQ(sup_norm(lattice_norm(truncate_to_ball(five, 1.0)[0])), 0.0);
    EXPECT_THROW(truncate_to_ball(five, 0.0), ArgumentError);
}

TEST(TruncateToBall, NeverIncreasesDefectOnTheBall) {
    random::Rng rng(79);
    for (int t = 0; t < 200; ++t) {
        const auto s = random::fiber_space(rng, 5, 3);
        const double r = random::uniform_real(rng, 0.2, 2.0);
        FiniteSet M(s);
        for (int i = 0; i < 4; ++i) M.push_back(random::bounded_vector(rng, s, r));
        const auto F = random::finite_set(rng, s, 3, 2.0 * r);
        const auto T = truncate_to_ball(F, r);
        EXPECT_TRUE(leq(sup_lattice_norm(T), StoneElement::constant(s.points(), 2 * r), 1e-12));
        const auto before = oracle::defect(M, F);
        const auto after = oracle::defect(M, T);
        for (std::size_t w = 0; w < s.points(); ++w) EXPECT_LE(after[w], before[w] + 1e-12);
    }
}

TEST(SetOps, Examples) {
    random::Rng rng(83);
    const auto s = random::fiber_space(rng, 4, 3);
    const auto M = random::finite_set(rng, s, 3);
    const auto S = set_sum(M, FiniteSet(s, {ModuleVector::zero(s)}));
    ASSERT_EQ(S.size(), M.size());
    for (std::size_t i = 0; i < M.size(); ++i) EXPECT_TRUE(approx_equal(S[i], M[i], 0.0));

    const auto I = set_image(FiberwiseMap::identity(s), M);
    for (std::size_t i = 0; i < M.size(); ++i) EXPECT_TRUE(approx_equal(I[i], M[i], 0.0));

    EXPECT_THROW(set_sum(M, random::finite_set(rng, FiberSpace({9}), 1)), DimensionError);
}

TEST(SetOps, MultiplicationScalesDefect) {
    random::Rng rng(89);
    for (int t = 0; t < 100; ++t) {
        const auto s = random::fiber_space(rng, 5, 3);
        const auto M = random::finite_set(rng, s, 4);
        const auto F = random::finite_set(rng, s, 2);
        const auto l = random::coefficient(rng, s.points());
        const auto lhs = defect(set_scale(l, M), set_scale(l, F)).value;
        const auto rhs = l.modulus() * defect(M, F).value;
        EXPECT_TRUE(leq(lhs, rhs, 1e-9));
    }
}
