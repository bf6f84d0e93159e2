#ifndef TOB_SELFTEST_HPP
#define TOB_SELFTEST_HPP

// Randomized property suite covering the eight acceptance criteria.  Shared
// by `tobcheck selftest` and the acceptance test binary.  Every criterion
// reports the number of individual checks, the first failure, and its
// runtime against a budget.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tob/errors.hpp"
#include "tob/lns.hpp"
#include "tob/mixing.hpp"
#include "tob/mps.hpp"
#include "tob/random.hpp"
#include "tob/relstruct.hpp"
#include "tob/seqmodel.hpp"
#include "tob/stone.hpp"

namespace tob::selftest {

// min over |l1|, |l2| <= 1 of |x - l1 a - l2 b| for one fiber at the given mesh.
using GridOracle = std::function<double(const std::vector<Complex>&, const std::vector<Complex>&,
                                        const std::vector<Complex>&, double)>;

struct Options {
    std::uint64_t seed = 20240601;
    double tol = 1e-9;
    bool inject_fault = false;  // replace one extension by a broken one
    GridOracle zonotope_grid;   // empty: the grid comparison is skipped
};

struct Result {
    int id = 0;
    std::string name;
    bool passed = true;
    double seconds = 0.0;
    double budget = 0.0;
    std::size_t checks = 0;
    std::string detail;  // first failure, or a summary
};

namespace detail {

class Tally {
public:
    void expect(bool ok, const std::function<std::string()>& why) {
        ++checks_;
        if (!ok && failure_.empty()) failure_ = why();
    }
    std::size_t checks() const noexcept { return checks_; }
    bool ok() const noexcept { return failure_.empty(); }
    const std::string& failure() const noexcept { return failure_; }

private:
    std::size_t checks_ = 0;
    std::string failure_;
};

template <class Body>
Result run(int id, std::string name, double budget, Body&& body) {
    Result r;
    r.id = id;
    r.name = std::move(name);
    r.budget = budget;
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    std::string summary;
    try {
        summary = body(t);
    } catch (const std::exception& e) {
        t.expect(false, [&] { return std::string("exception: ") + e.what(); });
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.checks = t.checks();
    r.passed = t.ok() && r.seconds < budget;
    if (!t.ok())
        r.detail = t.failure();
    else if (r.seconds >= budget)
        r.detail = "runtime " + std::to_string(r.seconds) + " s exceeds budget " + std::to_string(budget) + " s";
    else
        r.detail = summary;
    return r;
}

inline std::string str(const StoneElement& a) {
    std::ostringstream os;
    os.precision(12);
    os << "(";
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? ", " : "") << a[i];
    os << ")";
    return os.str();
}

inline std::vector<Complex> raw(const Fiber& f) { return std::vector<Complex>(f.data(), f.data() + f.size()); }

}  // namespace detail

// Small named extensions used as fixtures.
inline std::vector<std::pair<std::string, ExtensionData>> fixtures() {
    std::vector<std::pair<std::string, ExtensionData>> out;
    out.emplace_back("identity_z5", identity_extension(FiniteProbabilitySpace::uniform(5), {Permutation::rotation(5, 1)}));
    out.emplace_back("trivial_action",
                     identity_extension(FiniteProbabilitySpace(PointSet::indexed(3), {0.5, 0.3, 0.2}),
                                        {Permutation::identity(3)}));
    out.emplace_back("z4_over_z2", rotation_extension(4, 2));
    out.emplace_back("z6_over_z3", rotation_extension(6, 3));
    out.emplace_back("s3_over_point", ExtensionData{FiniteProbabilitySpace::uniform(3),
                                                    {Permutation({1, 0, 2}), Permutation({1, 2, 0})},
                                                    FiniteProbabilitySpace::uniform(1),
                                                    {Permutation::identity(1), Permutation::identity(1)},
                                                    {0, 0, 0}});
    // Skew product on Z3 x Z2: (a, b) -> (a + 1, b + [a = 2]), points 2a + b.
    std::vector<std::size_t> skew(6), factor(6);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            skew[2 * a + b] = 2 * ((a + 1) % 3) + (b + (a == 2 ? 1 : 0)) % 2;
            factor[2 * a + b] = a;
        }
    out.emplace_back("skew_z3_z2", ExtensionData{FiniteProbabilitySpace::uniform(6), {Permutation(skew)},
                                                 FiniteProbabilitySpace::uniform(3), {Permutation::rotation(3, 1)},
                                                 factor});
    return out;
}

// Z4 over Z2 with a factor map that does not intertwine the rotations.
inline ExtensionData broken_extension() {
    auto e = rotation_extension(4, 2);
    e.factor = {0, 0, 1, 1};
    return e;
}

inline Result counterexample_bounds(const Options& opt) {
    return detail::run(1, "counterexample bounds", 5.0, [&](detail::Tally& t) {
        const std::size_t N = 16;
        const auto c = seq::build_counterexample(N);
        for (std::size_t n = 1; n < N; ++n) {
            const auto b = seq::verify_tob_bound(c, n, opt.tol);
            t.expect(b.passed(), [&] { return "defect(M, F_" + std::to_string(n) + ") = " + detail::str(b.defect); });
        }
        random::Rng rng(opt.seed);
        const auto& model = c.model;
        auto check = [&](const FiniteSet& F, const std::string& kind, std::size_t d) {
            const auto w = seq::verify_not_utob(model, F);
            const auto x = model.indicator(w.coordinate, w.basis);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& g : F) best = std::min(best, distance(x, g)[w.coordinate - 1]);
            if (F.empty()) best = 1.0;
            t.expect(w.coordinate > d && std::abs(best - w.distance) <= 1e-12 && best >= seq::sqrt2 / 2 - 1e-9, [&] {
                return kind + " set of size " + std::to_string(d) + ": witness distance " + std::to_string(best);
            });
        };
        std::size_t sets = 0;
        for (std::size_t d = 1; d <= 8; ++d) {
            check(c.nets[d], "net", d);
            FiniteSet consts(model.space()), mids(model.space());
            for (std::size_t l = 1; l <= d; ++l) {
                consts.push_back(model.constant(l));
                auto m = ModuleVector::zero(model.space());
                for (std::size_t k = 0; k < N; ++k) {
                    m.fiber(k)(static_cast<Eigen::Index>((2 * l - 2) % N)) = seq::sqrt2 / 2;
                    m.fiber(k)(static_cast<Eigen::Index>((2 * l - 1) % N)) = seq::sqrt2 / 2;
                }
                mids.push_back(std::move(m));
            }
            check(consts, "constant", d);
            check(mids, "midpoint", d);
            sets += 3;
            for (int trial = 0; trial < 20; ++trial) {
                FiniteSet gauss = random::finite_set(rng, model.space(), d, 0.4);
                FiniteSet units(model.space());
                for (std::size_t j = 0; j < d; ++j) {
                    auto u = random::vector(rng, model.space());
                    for (std::size_t k = 0; k <= N; ++k) u.fiber(k).normalize();
                    units.push_back(std::move(u));
                }
                check(gauss, "gaussian", d);
                check(units, "unit", d);
                sets += 2;
            }
        }
        return std::to_string(N - 1) + " nets bounded; " + std::to_string(sets) + " adversarial sets refuted";
    });
}

inline Result zonotope_equivalence(const Options& opt) {
    return detail::run(2, "zonotope equivalence", 60.0, [&](detail::Tally& t) {
        random::Rng rng(opt.seed + 2);
        std::size_t grid = 0;
        double worst_member = 0.0, worst_grid = 0.0;
        for (int inst = 0; inst < 200; ++inst) {
            const auto space = random::fiber_space(rng, 6, 4);
            const std::size_t n = space.points();
            const auto M = random::finite_set(rng, space, random::uniform_size(rng, 1, 3));
            const double eps = random::uniform_real(rng, 0.05, 1.0);
            const auto u = is_utob(M, eps, opt.tol);
            t.expect(u.verdict, [&] { return "instance " + std::to_string(inst) + ": UTOB failed"; });
            const auto w = cp_witness(M, u.witness, eps, opt.tol);
            for (std::size_t i = 0; i < M.size(); ++i)
                t.expect(leq(distance(M[i], selected_point(w.selections[i], w.generators)),
                             StoneElement::constant(n, eps), opt.tol),
                         [&] { return "instance " + std::to_string(inst) + ": selection exceeds eps"; });
            const auto cp = cp_check(M, w.generators, eps);
            t.expect(cp.passed, [&] { return "instance " + std::to_string(inst) + ": cp_check failed at eps"; });

            const auto F = random::finite_set(rng, space, random::uniform_size(rng, 1, 3));
            std::vector<ComplexCoefficient> lambda;
            for (std::size_t j = 0; j < F.size(); ++j) lambda.push_back(random::disc_coefficient(rng, n));
            const double member = sup_norm(zonotope_distance(combine(lambda, F), Zonotope{F}).value);
            worst_member = std::max(worst_member, member);
            t.expect(member <= 1e-6, [&] {
                return "instance " + std::to_string(inst) + ": member at distance " + std::to_string(member);
            });

            if (opt.zonotope_grid && inst < 50) {
                const auto G = random::finite_set(rng, space, 2);
                const auto x = random::vector(rng, space, 1.5);
                const auto d = zonotope_distance(x, Zonotope{G});
                for (std::size_t p = 0; p < n; ++p) {
                    const double ref = opt.zonotope_grid(detail::raw(x.fiber(p)), detail::raw(G[0].fiber(p)),
                                                         detail::raw(G[1].fiber(p)), 0.01);
                    worst_grid = std::max(worst_grid, std::abs(ref - d.value[p]));
                    t.expect(std::abs(ref - d.value[p]) <= 0.02, [&] {
                        return "instance " + std::to_string(inst) + ": solver " + std::to_string(d.value[p]) +
                               " vs grid " + std::to_string(ref);
                    });
                }
                ++grid;
            }
        }
        std::ostringstream s;
        s.precision(3);
        s << "200 instances; worst member distance " << worst_member;
        if (grid)
            s << "; grid agreement on " << grid << " instances, worst gap " << worst_grid;
        else
            s << "; grid comparison skipped (no oracle)";
        return s.str();
    });
}

inline Result heine_borel(const Options& opt) {
    return detail::run(3, "heine-borel nets", 30.0, [&](detail::Tally& t) {
        random::Rng rng(opt.seed + 3);
        std::size_t samples = 0;
        for (std::size_t d = 1; d <= 2; ++d) {
            for (double eps : {0.5, 0.25}) {
                for (int b = 0; b < 10; ++b) {
                    const auto basis = random::suborthonormal_basis(rng, random::uniform_size(rng, 1, 4),
                                                                    random::uniform_size(rng, d, 4), d);
                    const auto net = heine_borel_net(basis, 1.0, eps);
                    const auto bound = StoneElement::constant(basis.space().points(), eps);
                    for (int s = 0; s < 100; ++s) {
                        const auto x = random::ball_combination(rng, basis, 1.0);
                        const auto v = nearest(x, net).value;
                        ++samples;
                        t.expect(leq(v, bound, opt.tol), [&] {
                            return "d = " + std::to_string(d) + ", eps = " + std::to_string(eps) + ": defect " +
                                   detail::str(v);
                        });
                    }
                }
            }
        }
        return std::to_string(samples) + " samples within eps";
    });
}

inline Result defect_properties(const Options& opt) {
    return detail::run(4, "defect properties", 30.0, [&](detail::Tally& t) {
        random::Rng rng(opt.seed + 4);
        const double tol = opt.tol;
        auto size = [&] { return random::uniform_size(rng, 1, 4); };
        for (int i = 0; i < 500; ++i) {
            const auto s = random::fiber_space(rng, 5, 3);
            const auto M = random::finite_set(rng, s, size()), N = random::finite_set(rng, s, size());
            const auto G = random::finite_set(rng, s, size()), H = random::finite_set(rng, s, size());
            const auto lhs = defect(set_sum(M, N), set_sum(G, H)).value;
            const auto rhs = defect(M, G).value + defect(N, H).value;
            t.expect(leq(lhs, rhs, tol), [&] { return "sum: " + detail::str(lhs) + " > " + detail::str(rhs); });
        }
        for (int i = 0; i < 500; ++i) {
            const std::size_t n = random::uniform_size(rng, 1, 4);
            std::vector<std::size_t> d1(n), d2(n);
            for (auto& v : d1) v = random::uniform_size(rng, 1, 3);
            for (auto& v : d2) v = random::uniform_size(rng, 1, 3);
            const FiberSpace s1(d1), s2(d2);
            const auto M = random::finite_set(rng, s1, size()), G = random::finite_set(rng, s1, size());
            const auto N = random::finite_set(rng, s2, size()), H = random::finite_set(rng, s2, size());
            const auto dM = defect(M, G).value, dN = defect(N, H).value;
            const auto lhs = defect(set_tensor(M, N), set_tensor(G, H)).value;
            const auto rhs = sup_lattice_norm(M) * dN + dM * dN + sup_lattice_norm(N) * dM;
            t.expect(leq(lhs, rhs, tol), [&] { return "product: " + detail::str(lhs) + " > " + detail::str(rhs); });
        }
        for (int i = 0; i < 500; ++i) {
            const auto s = random::fiber_space(rng, 5, 3);
            const double r = random::uniform_real(rng, 0.01, 1.0);
            const auto Mt = random::finite_set(rng, s, size());
            FiniteSet M(s);
            for (const auto& x : Mt) M.push_back(x + random::bounded_vector(rng, s, r));
            const auto F = random::finite_set(rng, s, size());
            const auto lhs = defect(M, F).value;
            const auto rhs = StoneElement::constant(s.points(), r) + defect(Mt, F).value;
            t.expect(leq(lhs, rhs, tol), [&] { return "approximation: " + detail::str(lhs) + " > " + detail::str(rhs); });
        }
        for (int i = 0; i < 500; ++i) {
            const auto s = random::fiber_space(rng, 5, 3);
            const auto T = random::fiberwise_map(rng, s, 3);
            const auto M = random::finite_set(rng, s, size()), F = random::finite_set(rng, s, size());
            const auto lhs = defect(set_image(T, M), set_image(T, F)).value;
            const auto rhs = T.bound() * defect(M, F).value;
            t.expect(leq(lhs, rhs, tol), [&] { return "bounded map: " + detail::str(lhs) + " > " + detail::str(rhs); });
        }
        for (int i = 0; i < 500; ++i) {
            const auto s = random::fiber_space(rng, 5, 3);
            const double r = random::uniform_real(rng, 0.3, 2.0);
            FiniteSet M(s);
            for (std::size_t k = size(); k > 0; --k) M.push_back(random::bounded_vector(rng, s, r));
            const auto F = random::finite_set(rng, s, size(), 1.5 * r);
            const auto Ft = truncate_to_ball(F, r);
            for (const auto& y : Ft)
                t.expect(leq(lattice_norm(y), StoneElement::constant(s.points(), 2 * r), tol),
                         [&] { return std::string("truncation leaves the ball"); });
            const auto lhs = defect(M, Ft).value, rhs = defect(M, F).value;
            t.expect(leq(lhs, rhs, tol), [&] { return "truncation: " + detail::str(lhs) + " > " + detail::str(rhs); });
        }
        for (int i = 0; i < 500; ++i) {
            const auto s = random::fiber_space(rng, 5, 3);
            const auto M = random::finite_set(rng, s, size()), F = random::finite_set(rng, s, size());
            FiniteSet Fp(s);
            StoneElement move = StoneElement::zero(s.points());
            for (const auto& y : F) {
                auto yp = y + random::vector(rng, s, 0.3);
                move = tob::sup(move, distance(y, yp));
                Fp.push_back(std::move(yp));
            }
            const auto gap = abs(defect(M, F).value - defect(M, Fp).value);
            t.expect(leq(gap, move, tol), [&] { return "lipschitz: " + detail::str(gap) + " > " + detail::str(move); });
        }
        return std::string("6 properties x 500 instances");
    });
}

inline Result cyclic_compactness(const Options& opt) {
    return detail::run(5, "mixing and cyclic compactness", 30.0, [&](detail::Tally& t) {
        random::Rng rng(opt.seed + 5);
        for (double eps : {0.5, 0.1}) {
            for (int i = 0; i < 100; ++i) {
                const auto s = random::fiber_space(rng, 6, 3);
                const auto M = random::finite_set(rng, s, random::uniform_size(rng, 1, 6));
                const double r = sup_norm(sup_lattice_norm(M)) + 1e-3;
                const auto w = cyclic_witness(M, eps, r, opt.tol);
                const auto v = verify_cyclic(M, eps, w, opt.tol);
                t.expect(v.passed, [&] { return "eps " + std::to_string(eps) + ": " + v.failure; });
                for (const auto& part : w.parts)
                    for (const auto& y : part.generators)
                        t.expect(leq(lattice_norm(y), StoneElement::constant(s.points(), 2 * r), opt.tol),
                                 [&] { return std::string("mixed generator leaves B[0; 2r]"); });
            }
        }
        for (int i = 0; i < 500; ++i) {
            const auto s = random::fiber_space(rng, 6, 3);
            const auto n = s.points();
            const auto x = random::vector(rng, s);
            const auto y = mix(random::partition(rng, n, 2), std::vector<ModuleVector>{x, random::vector(rng, s)});
            const auto z = mix(random::partition(rng, n, 2), std::vector<ModuleVector>{y, random::vector(rng, s)});
            const auto xy = eq_idempotent(x, y, opt.tol), yz = eq_idempotent(y, z, opt.tol);
            const auto xz = eq_idempotent(x, z, opt.tol);
            t.expect(xy == eq_idempotent(y, x, opt.tol), [] { return std::string("B-set symmetry"); });
            t.expect(leq(xy & yz, xz), [] { return std::string("B-set transitivity"); });
            t.expect(eq_idempotent(x, x, opt.tol).is_one(), [] { return std::string("B-set reflexivity"); });
            t.expect(xy.is_one() == approx_equal(x, y, opt.tol), [] { return std::string("B-set separation"); });

            const std::size_t k = random::uniform_size(rng, 1, 4);
            const auto family = random::finite_set(rng, s, k);
            const auto p = random::partition(rng, n, k);
            std::vector<StoneElement> dist;
            for (const auto& f : family) dist.push_back(distance(z, f));
            t.expect(approx_equal(distance(z, mix(p, family)), mix(p, dist), opt.tol),
                     [] { return std::string("B-set map law"); });
            t.expect(mix_membership(mix(p, family), family, opt.tol).has_value(),
                     [] { return std::string("mixing not recognised as a member of the mix-closure"); });
        }
        return std::string("cyclic round trips at eps 0.5 and 0.1; 500 B-set triples");
    });
}

inline Result extension_layer(const Options& opt) {
    return detail::run(6, "extension layer identities", 60.0, [&](detail::Tally& t) {
        random::Rng rng(opt.seed + 6);
        const double tol = opt.tol;
        for (int i = 0; i < 200; ++i) {
            const auto data = (opt.inject_fault && i == 0) ? broken_extension() : random::extension(rng, 12);
            const auto rep = validate_extension(data, tol);
            t.expect(rep.valid, [&] {
                return "extension " + std::to_string(i) + ": invariant violated: " +
                       (rep.violations.empty() ? std::string("?") : rep.violations.front());
            });
            if (!rep.valid) continue;
            const Extension ext(data);
            const auto& X = ext.X();
            const auto& Y = ext.Y();
            const auto f = random::function(rng, X.size()), h = random::function(rng, X.size());
            const auto g = random::function(rng, Y.size());
            const double adj = std::abs(X.inner(ext.embed(g), f) - Y.inner(g, ext.cond_expectation(f)));
            t.expect(adj <= tol, [&] { return "adjointness gap " + std::to_string(adj); });
            const double tower = std::abs(Y.integrate(ext.cond_expectation(f)) - X.integrate(f));
            t.expect(tower <= tol, [&] { return "tower identity gap " + std::to_string(tower); });
            for (std::size_t s = 0; s < ext.group_size(); ++s) {
                const Function lhs = ext.rel_inner(ext.koopman(s, f), ext.koopman(s, h));
                const Function rhs = ext.koopman_base(s, ext.rel_inner(f, h));
                const double gap = (lhs - rhs).cwiseAbs().maxCoeff();
                t.expect(gap <= tol, [&] { return "relative isometry gap " + std::to_string(gap); });
                const double iso = std::abs(X.norm(ext.koopman(s, f)) - X.norm(f));
                t.expect(iso <= tol, [&] { return "Koopman isometry gap " + std::to_string(iso); });
            }
        }
        return std::string("200 random extensions");
    });
}

inline Result cross_check(const Options& opt) {
    return detail::run(7, "kronecker cross-check", 120.0, [&](detail::Tally& t) {
        random::Rng rng(opt.seed + 7);
        CrossCheckOptions co;
        co.tol = opt.tol;
        auto check = [&](const Extension& ext, const std::string& name) {
            const auto rep = theorem_cross_check(ext, co);
            t.expect(rep.passed(co.subspace_tol) && rep.corollary_agrees(), [&] {
                std::ostringstream os;
                os << name << ": distances " << rep.fm_ap << ", " << rep.fm_tob << ", " << rep.ap_tob << "; dims "
                   << rep.fm_dim << "/" << rep.ap_dim << "/" << rep.tob_dim << " of " << rep.points
                   << "; ap-module " << rep.ap_module << ", heine-borel " << rep.heine_borel << ", localization "
                   << rep.localization;
                return os.str();
            });
            t.expect(rep.weakly_mixing_dim == 0 && !rep.note.empty(),
                     [&] { return name + ": weakly mixing part not reported as zero"; });
        };
        const auto fx = fixtures();
        for (const auto& [name, data] : fx) check(Extension(data), name);
        for (int i = 0; i < 50; ++i) check(Extension(random::extension(rng, 12)), "random extension " + std::to_string(i));
        return std::to_string(fx.size()) + " fixtures and 50 random extensions agree";
    });
}

inline Result egoroff(const Options& opt) {
    return detail::run(8, "egoroff localization", 30.0, [&](detail::Tally& t) {
        std::ostringstream summary;
        for (double delta : {0.25, 0.05}) {
            const auto d = seq::egoroff_demo(16, delta, opt.tol);
            const double tail = std::ldexp(1.0, -static_cast<int>(d.m));
            t.expect(tail <= delta && 2 * tail > delta, [&] {
                return "delta " + std::to_string(delta) + ": m = " + std::to_string(d.m) + " is not minimal";
            });
            bool prefix = true;
            for (std::size_t k = 0; k <= 16; ++k) prefix = prefix && d.A[k] == (k < d.m);
            t.expect(prefix, [&] { return "delta " + std::to_string(delta) + ": A is not {1..m}"; });
            t.expect(d.removed_mass <= delta + opt.tol && d.utob && d.uniform,
                     [&] { return "delta " + std::to_string(delta) + ": localized family is not UTOB"; });
            summary << (delta == 0.25 ? "" : "; ") << "delta " << delta << " -> m = " << d.m;
        }
        return summary.str();
    });
}

inline std::vector<Result> run_all(const Options& opt) {
    return {counterexample_bounds(opt), zonotope_equivalence(opt), heine_borel(opt), defect_properties(opt),
            cyclic_compactness(opt),    extension_layer(opt),      cross_check(opt), egoroff(opt)};
}

inline std::string format(const Result& r) {
    std::ostringstream os;
    os.precision(3);
    os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << "  (" << r.checks << " checks, "
       << std::fixed << r.seconds << " s / " << r.budget << " s)  " << r.detail;
    return os.str();
}

}  // namespace tob::selftest

#endif  // TOB_SELFTEST_HPP
