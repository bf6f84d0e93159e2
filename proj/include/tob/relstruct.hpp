#ifndef TOB_RELSTRUCT_HPP
#define TOB_RELSTRUCT_HPP

// Relative structure of a finite extension X|Y: orbits in L^2(X|Y),
// conditionally almost periodic functions, finitely generated invariant
// submodules, the relative Kronecker subspace, Egoroff localization, and a
// cross-check of the three descriptions of the Kronecker subspace.
//
// Subspaces of L^2(X) are held in unitary coordinates: f is represented by
// (sqrt(mu(x)) f(x))_x, so the L^2 inner product becomes the Euclidean one
// and every Koopman operator becomes a permutation matrix.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tob/errors.hpp"
#include "tob/lns.hpp"
#include "tob/mps.hpp"
#include "tob/stone.hpp"

namespace tob {

inline constexpr std::size_t never = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Orbits and conditional almost periodicity
// ---------------------------------------------------------------------------

// {T_t f : t in G}, in enumeration order, with near-duplicates (sup distance
// <= tol) removed.
inline std::vector<Function> orbit_functions(const Function& f, const Extension& ext, double tol = default_tol) {
    std::vector<Function> out;
    for (std::size_t t = 0; t < ext.group_size(); ++t) {
        Function g = ext.koopman(t, f);
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Function& h) {
            return (h - g).cwiseAbs().maxCoeff() <= tol;
        });
        if (!seen) out.push_back(std::move(g));
    }
    return out;
}

inline FiniteSet encode_all(const std::vector<Function>& fs, const Extension& ext) {
    FiniteSet out(ext.rel_space());
    for (const auto& f : fs) out.push_back(ext.encode(f));
    return out;
}

// The orbit as a finite subset of L^2(X|Y).
inline FiniteSet orbit(const Function& f, const Extension& ext, double tol = default_tol) {
    return encode_all(orbit_functions(f, ext, tol), ext);
}

// The full orbit indexed by group element (no deduplication).
inline FiniteSet orbit_by_element(const Function& f, const Extension& ext) {
    FiniteSet out(ext.rel_space());
    for (std::size_t t = 0; t < ext.group_size(); ++t) out.push_back(ext.encode(ext.koopman(t, f)));
    return out;
}

struct APReport {
    std::vector<double> eps;
    std::vector<bool> verdicts;
    std::vector<FiniteSet> witnesses;
    std::vector<StoneElement> defects;  // recomputed defect of the orbit against each witness

    bool all() const { return std::all_of(verdicts.begin(), verdicts.end(), [](bool b) { return b; }); }
};

inline APReport is_conditionally_ap(const Function& f, const Extension& ext, const std::vector<double>& eps_grid,
                                    double tol = default_tol) {
    APReport rep;
    const auto orb = orbit(f, ext, tol);
    for (double eps : eps_grid) {
        if (!(eps > 0)) throw ArgumentError("is_conditionally_ap: eps must be positive");
        const auto u = is_utob(orb, eps, tol);
        const auto d = defect(orb, u.witness).value;
        rep.eps.push_back(eps);
        rep.verdicts.push_back(u.verdict && leq(d, StoneElement::constant(d.size(), eps), tol));
        rep.witnesses.push_back(u.witness);
        rep.defects.push_back(d);
    }
    return rep;
}

// Total order-boundedness of the orbit through the increasing greedy chain:
// the defects decrease pointwise and must reach zero.
struct OrbitTobReport {
    bool verdict = false;
    std::vector<StoneElement> defects;  // defect against the n-th chain member
};

inline OrbitTobReport is_orbit_tob(const Function& f, const Extension& ext, double tol = default_tol) {
    OrbitTobReport rep;
    const auto orb = orbit(f, ext, tol);
    rep.defects = greedy_chain_defects(orb);
    bool decreasing = true;
    for (std::size_t n = 1; n < rep.defects.size(); ++n)
        decreasing = decreasing && leq(rep.defects[n], rep.defects[n - 1], tol);
    rep.verdict = decreasing && !rep.defects.empty() && sup_norm(rep.defects.back()) <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Generated submodules
// ---------------------------------------------------------------------------

struct SubmoduleBasis {
    FiniteSet basis;                // suborthonormal e_1..e_d over Y
    std::vector<std::size_t> rank;  // number of nonzero e_j per fiber
};

// Fiberwise orthonormalisation of the span of the given module elements.
// Singular values below tol * (fiber dimension) are dropped; each kept
// vector is phase-normalised so that its largest entry is real positive.
inline SubmoduleBasis span_submodule(const FiniteSet& gens, double tol = default_tol) {
    const auto& space = gens.space();
    const std::size_t ny = space.points();
    std::vector<Eigen::MatrixXcd> kept(ny);
    std::size_t d = 0;
    SubmoduleBasis out;
    out.rank.assign(ny, 0);
    for (std::size_t y = 0; y < ny; ++y) {
        const auto dim = static_cast<Eigen::Index>(space.dim(y));
        Eigen::MatrixXcd A(dim, static_cast<Eigen::Index>(gens.size()));
        for (std::size_t i = 0; i < gens.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = gens[i].fiber(y);
        std::size_t r = 0;
        if (A.cols() > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU);
            const auto& s = svd.singularValues();
            while (r < static_cast<std::size_t>(s.size()) && s(static_cast<Eigen::Index>(r)) >= tol * static_cast<double>(dim)) ++r;
            kept[y] = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
            for (Eigen::Index j = 0; j < kept[y].cols(); ++j) {
                Eigen::Index at = 0;
                kept[y].col(j).cwiseAbs().maxCoeff(&at);
                const Complex z = kept[y](at, j);
                kept[y].col(j) *= std::conj(z) / std::abs(z);
            }
        }
        out.rank[y] = r;
        d = std::max(d, r);
    }
    out.basis = FiniteSet(space);
    for (std::size_t j = 0; j < d; ++j) {
        ModuleVector e = ModuleVector::zero(space);
        for (std::size_t y = 0; y < ny; ++y)
            if (j < out.rank[y]) e.fiber(y) = kept[y].col(static_cast<Eigen::Index>(j));
        out.basis.push_back(std::move(e));
    }
    return out;
}

// The L^infty(Y)-submodule generated by the orbit of f.
inline SubmoduleBasis generated_submodule(const Function& f, const Extension& ext, double tol = default_tol) {
    return span_submodule(orbit(f, ext, tol), tol);
}

// Fiberwise orthogonal projection onto a submodule.
inline ModuleVector project(const ModuleVector& v, const SubmoduleBasis& b) {
    ModuleVector out = ModuleVector::zero(v.space());
    for (const auto& e : b.basis) out += inner(v, e) * e;
    return out;
}

// max over t, j of sup_y |T_t e_j - P T_t e_j|: zero iff the submodule is
// invariant.
inline double invariance_residual(const SubmoduleBasis& b, const Extension& ext) {
    double worst = 0.0;
    for (const auto& e : b.basis) {
        const Function fe = ext.decode(e);
        for (std::size_t t = 0; t < ext.group_size(); ++t) {
            const auto te = ext.encode(ext.koopman(t, fe));
            worst = std::max(worst, sup_norm(distance(te, project(te, b))));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Subspaces of L^2(X)
// ---------------------------------------------------------------------------

class Subspace {
public:
    Subspace() = default;
    // basis: orthonormal columns in unitary coordinates.
    Subspace(Eigen::VectorXd sqrt_weights, Eigen::MatrixXcd basis)
        : sqrt_weights_(std::move(sqrt_weights)), basis_(std::move(basis)) {}

    std::size_t ambient() const noexcept { return static_cast<std::size_t>(sqrt_weights_.size()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
    const Eigen::MatrixXcd& coordinates() const noexcept { return basis_; }
    Eigen::MatrixXcd projector() const { return basis_ * basis_.adjoint(); }

    // L^2(X)-orthonormal basis as functions on X.
    std::vector<Function> functions() const {
        std::vector<Function> out;
        for (Eigen::Index j = 0; j < basis_.cols(); ++j)
            out.push_back(basis_.col(j).cwiseQuotient(sqrt_weights_.cast<Complex>()));
        return out;
    }

    // distance of f from the subspace in L^2(X)
    double residual(const Function& f) const {
        const Eigen::VectorXcd c = f.cwiseProduct(sqrt_weights_.cast<Complex>());
        return (c - basis_ * (basis_.adjoint() * c)).norm();
    }

private:
    Eigen::VectorXd sqrt_weights_;
    Eigen::MatrixXcd basis_;
};

// Orthonormal basis of the column span (unitary coordinates); singular values
// below tol * n * max(1, largest) count as zero.
inline Subspace span_coordinates(const Eigen::VectorXd& sqrt_weights, const Eigen::MatrixXcd& cols,
                                 double tol = default_tol) {
    const Eigen::Index n = sqrt_weights.size();
    if (cols.cols() == 0) return Subspace(sqrt_weights, Eigen::MatrixXcd(n, 0));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cols, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cut = tol * static_cast<double>(n) * std::max(1.0, s(0));
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return Subspace(sqrt_weights, svd.matrixU().leftCols(r));
}

inline Subspace span_functions(const std::vector<Function>& fs, const FiniteProbabilitySpace& X,
                               double tol = default_tol) {
    const auto sw = X.sqrt_weights();
    Eigen::MatrixXcd cols(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(fs.size()));
    for (std::size_t j = 0; j < fs.size(); ++j) {
        if (static_cast<std::size_t>(fs[j].size()) != X.size()) throw DimensionError("span_functions: wrong length");
        cols.col(static_cast<Eigen::Index>(j)) = fs[j].cwiseProduct(sw.cast<Complex>());
    }
    return span_coordinates(sw, cols, tol);
}

// The L^2(X) subspace underlying a submodule: every e_j cut down to a
// single fiber.  In unitary coordinates fiber y of e_j sits on pi^{-1}(y)
// scaled by sqrt(mu_Y(y)); dividing that out leaves an orthonormal family.
inline Eigen::MatrixXcd module_columns(const SubmoduleBasis& b, const Extension& ext) {
    const auto n = static_cast<Eigen::Index>(ext.X().size());
    std::vector<Eigen::VectorXcd> cols;
    for (std::size_t y = 0; y < ext.Y().size(); ++y) {
        const auto& fib = ext.fiber(y);
        for (std::size_t j = 0; j < b.rank[y]; ++j) {
            Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
            for (std::size_t s = 0; s < fib.size(); ++s)
                c(static_cast<Eigen::Index>(fib[s])) = b.basis[j].fiber(y)(static_cast<Eigen::Index>(s));
            cols.push_back(std::move(c));
        }
    }
    Eigen::MatrixXcd out(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = cols[j];
    return out;
}

inline Subspace module_subspace(const SubmoduleBasis& b, const Extension& ext, double tol = default_tol) {
    return span_coordinates(ext.X().sqrt_weights(), module_columns(b, ext), tol);
}

// Operator norm of a Hermitian matrix.
inline double hermitian_norm(const Eigen::MatrixXcd& H) {
    if (H.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double operator_norm(const Eigen::MatrixXcd& A) {
    if (A.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
}

// || P_A - P_B ||
inline double projector_distance(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw DimensionError("projector_distance: different ambient spaces");
    return hermitian_norm(a.projector() - b.projector());
}

// || (I - P_B) P_A ||: zero iff A is contained in B.
inline double inclusion_residual(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient()) throw DimensionError("inclusion_residual: different ambient spaces");
    const Eigen::MatrixXcd& U = a.coordinates();
    return operator_norm(U - b.coordinates() * (b.coordinates().adjoint() * U));
}

// Koopman operator T_t in unitary coordinates.
inline Eigen::MatrixXcd koopman_matrix(std::size_t t, const Extension& ext) {
    const auto n = static_cast<Eigen::Index>(ext.X().size());
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);
    const auto& tau = ext.upstairs_element(t);
    for (std::size_t z = 0; z < ext.X().size(); ++z) K(static_cast<Eigen::Index>(tau(z)), static_cast<Eigen::Index>(z)) = 1.0;
    return K;
}

// max over t of || P T_t - T_t P ||
inline double group_commutator(const Subspace& s, const Extension& ext) {
    const Eigen::MatrixXcd P = s.projector();
    double worst = 0.0;
    for (std::size_t t = 0; t < ext.group_size(); ++t) {
        const auto K = koopman_matrix(t, ext);
        worst = std::max(worst, operator_norm(P * K - K * P));
    }
    return worst;
}

// max over base points y of || P J(1_y) - J(1_y) P ||
inline double module_commutator(const Subspace& s, const Extension& ext) {
    const Eigen::MatrixXcd P = s.projector();
    double worst = 0.0;
    for (std::size_t y = 0; y < ext.Y().size(); ++y) {
        Eigen::VectorXcd d = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ext.X().size()));
        for (auto x : ext.fiber(y)) d(static_cast<Eigen::Index>(x)) = 1.0;
        worst = std::max(worst, operator_norm(P * d.asDiagonal() - d.asDiagonal() * P));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Kronecker subspace
// ---------------------------------------------------------------------------

// Sum of the submodules generated by the point indicators.
inline Subspace kronecker_subspace(const Extension& ext, double tol = default_tol) {
    std::vector<Eigen::MatrixXcd> blocks;
    Eigen::Index total = 0;
    for (std::size_t x = 0; x < ext.X().size(); ++x) {
        blocks.push_back(module_columns(generated_submodule(ext.point_indicator(x), ext, tol), ext));
        total += blocks.back().cols();
    }
    Eigen::MatrixXcd cols(static_cast<Eigen::Index>(ext.X().size()), total);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        cols.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    return span_coordinates(ext.X().sqrt_weights(), cols, tol);
}

inline bool has_discrete_spectrum(const Extension& ext, double tol = default_tol) {
    return kronecker_subspace(ext, tol).dim() == ext.X().size();
}

// ---------------------------------------------------------------------------
// Egoroff localization
// ---------------------------------------------------------------------------

struct EgoroffReport {
    Idempotent keep;                                  // the set A
    double removed_mass = 0.0;                        // mass of the complement of A
    std::vector<std::size_t> convergence_index;       // per point; `never` if u_n(w) stays above tol
    std::vector<double> eps;
    std::vector<std::size_t> thresholds;              // first n with sup_A u_n <= eps, or `never`
    bool uniform = false;                             // sup_A u_n reaches zero within the horizon
};

// u: a pointwise non-increasing sequence u_0, u_1, ... on a weighted point
// set.  Points are removed in order of decreasing convergence index (ties:
// higher point index first) as long as the removed mass stays <= delta.
inline EgoroffReport egoroff_localize(const std::vector<StoneElement>& u, const std::vector<double>& weights,
                                      double delta, const std::vector<double>& eps_grid = {},
                                      double tol = default_tol) {
    if (u.empty()) throw ArgumentError("egoroff_localize: empty sequence");
    if (!(delta > 0)) throw ArgumentError("egoroff_localize: delta must be positive");
    const std::size_t n = u.front().size();
    if (weights.size() != n) throw DimensionError("egoroff_localize: weights do not match the point set");
    for (std::size_t k = 1; k < u.size(); ++k) {
        if (u[k].size() != n) throw DimensionError("egoroff_localize: sequence members differ in size");
        for (std::size_t w = 0; w < n; ++w)
            if (u[k][w] > u[k - 1][w] + tol)
                throw ArgumentError("egoroff_localize: sequence increases at step " + std::to_string(k) +
                                    ", point " + std::to_string(w));
    }

    EgoroffReport rep;
    rep.convergence_index.assign(n, never);
    for (std::size_t w = 0; w < n; ++w) {
        std::size_t s = u.size();
        while (s > 0 && u[s - 1][w] <= tol) --s;
        if (s < u.size()) rep.convergence_index[w] = s;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto sa = rep.convergence_index[a], sb = rep.convergence_index[b];
        return sa != sb ? sa > sb : a > b;
    });
    std::vector<bool> keep(n, true);
    for (auto w : order) {
        if (rep.convergence_index[w] == 0) break;  // converged from the start
        if (rep.removed_mass + weights[w] > delta + tol) break;
        rep.removed_mass += weights[w];
        keep[w] = false;
    }
    rep.keep = Idempotent(keep);

    auto sup_on_keep = [&](const StoneElement& v) {
        double m = 0.0;
        for (std::size_t w = 0; w < n; ++w)
            if (keep[w]) m = std::max(m, std::abs(v[w]));
        return m;
    };
    rep.uniform = sup_on_keep(u.back()) <= tol;
    for (double e : eps_grid) {
        std::size_t th = never;
        for (std::size_t k = 0; k < u.size(); ++k)
            if (sup_on_keep(u[k]) <= e + tol) {
                th = k;
                break;
            }
        rep.eps.push_back(e);
        rep.thresholds.push_back(th);
    }
    return rep;
}

// Localization of f: the set E from the Egoroff procedure applied to the
// greedy-chain defects of the orbit, and an AP recheck of 1_E f.
struct LocalizationReport {
    Idempotent E;
    double removed_mass = 0.0;
    Function localized;
    APReport ap;

    bool passed(double delta, double tol = default_tol) const { return removed_mass <= delta + tol && ap.all(); }
};

inline LocalizationReport localize_ap(const Function& f, const Extension& ext, double delta,
                                      const std::vector<double>& eps_grid, double tol = default_tol) {
    const auto orb = orbit(f, ext, tol);
    const auto u = greedy_chain_defects(orb);
    const auto eg = egoroff_localize(u, ext.Y().weights(), delta, eps_grid, tol);
    LocalizationReport rep;
    rep.E = eg.keep;
    rep.removed_mass = eg.removed_mass;
    Function indicator(static_cast<Eigen::Index>(ext.Y().size()));
    for (std::size_t y = 0; y < ext.Y().size(); ++y) indicator(static_cast<Eigen::Index>(y)) = eg.keep[y] ? 1.0 : 0.0;
    rep.localized = ext.embed(indicator).cwiseProduct(f);
    rep.ap = is_conditionally_ap(rep.localized, ext, eps_grid, tol);
    return rep;
}

// ---------------------------------------------------------------------------
// Closure properties of the AP functions
// ---------------------------------------------------------------------------

struct ApModuleReport {
    bool sum = true;          // f + g at 2 eps with witness F_f + F_g
    bool multiple = true;     // Jh f at |h|_inf eps with witness {J(S_s h) w}
    bool conjugate = true;    // conj f at eps with witness conj F_f
    bool modulus = true;      // |f| at eps with witness |F_f|
    bool translate = true;    // T_s f at eps with witness F_f
    bool reverse_triangle = true;  // | |f| - |g| |_Y <= |f - g|_Y

    bool all() const { return sum && multiple && conjugate && modulus && translate && reverse_triangle; }
};

inline ApModuleReport ap_module_checks(const Function& f, const Function& g, const Function& h, const Extension& ext,
                                       double eps, double tol = default_tol) {
    ApModuleReport rep;
    const std::size_t ny = ext.Y().size();
    auto bounded = [&](const FiniteSet& M, const FiniteSet& F, double level) {
        return leq(defect(M, F).value, StoneElement::constant(ny, level), tol);
    };
    const auto of = orbit_by_element(f, ext);
    const auto og = orbit_by_element(g, ext);
    const auto Ff = is_utob(of, eps, tol).witness;
    const auto Fg = is_utob(og, eps, tol).witness;

    rep.sum = bounded(orbit_by_element(f + g, ext), set_sum(Ff, Fg), 2 * eps);

    const double hmax = h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
    FiniteSet hw(ext.rel_space());
    for (std::size_t s = 0; s < ext.group_size(); ++s) {
        const auto lambda = Extension::coefficient(ext.koopman_base(s, h));
        for (const auto& w : Ff) hw.push_back(lambda * w);
    }
    rep.multiple = bounded(orbit_by_element(ext.embed(h).cwiseProduct(f), ext), hw, hmax * eps);

    FiniteSet cf(ext.rel_space());
    for (const auto& w : Ff) cf.push_back(w.conj());
    rep.conjugate = bounded(orbit_by_element(f.conjugate(), ext), cf, eps);

    FiniteSet mf(ext.rel_space());
    for (const auto& w : Ff) mf.push_back(ext.encode(ext.decode(w).cwiseAbs().cast<Complex>()));
    rep.modulus = bounded(orbit_by_element(f.cwiseAbs().cast<Complex>(), ext), mf, eps);

    for (std::size_t s = 0; s < ext.group_size() && rep.translate; ++s)
        rep.translate = bounded(orbit_by_element(ext.koopman(s, f), ext), Ff, eps);

    const Function df = f.cwiseAbs().cast<Complex>() - g.cwiseAbs().cast<Complex>();
    rep.reverse_triangle = leq(ext.rel_norm(df), ext.rel_norm(f - g), tol);
    return rep;
}

// Orbit of f inside its generated submodule, certified UTOB at eps by the
// Heine-Borel net of that submodule.
struct HeineBorelCertificate {
    double containment = 0.0;  // sup over the orbit of the distance to the submodule
    double radius = 0.0;       // c = sup |f|_Y
    std::size_t net_size = 0;
    StoneElement defect;
    bool passed = false;
};

inline HeineBorelCertificate heine_borel_certificate(const Function& f, const Extension& ext, double eps,
                                                     std::size_t cap = default_net_cap, double tol = default_tol) {
    HeineBorelCertificate c;
    const auto sub = generated_submodule(f, ext, tol);
    const auto orb = orbit(f, ext, tol);
    for (const auto& v : orb) c.containment = std::max(c.containment, sup_norm(distance(v, project(v, sub))));
    c.radius = sup_norm(ext.rel_norm(f));
    const auto net = heine_borel_net(sub.basis, c.radius, eps, cap);
    c.net_size = net.size();
    c.defect = defect(orb, net).value;
    c.passed = c.containment <= 1e-8 && leq(c.defect, StoneElement::constant(c.defect.size(), eps), 1e-8);
    return c;
}

// ---------------------------------------------------------------------------
// Cross-check of the three descriptions of the Kronecker subspace
// ---------------------------------------------------------------------------

struct CrossCheckOptions {
    double tol = default_tol;
    double subspace_tol = 1e-7;
    std::vector<double> eps{0.5, 0.1};
    std::vector<double> delta{0.5, 0.1, 0.01};
    std::size_t net_cap = 200'000;
    bool heine_borel = true;
};

struct CrossCheckReport {
    std::size_t points = 0;
    std::size_t base_points = 0;
    std::size_t group_order = 0;

    std::size_t kronecker_dim = 0;
    std::size_t fm_dim = 0;
    std::size_t ap_dim = 0;
    std::size_t tob_dim = 0;

    double fm_ap = 0.0;   // projector distances
    double fm_tob = 0.0;
    double ap_tob = 0.0;
    double fm_in_ap = 0.0;  // inclusion residuals
    double ap_in_tob = 0.0;
    double group_commutator = 0.0;
    double module_commutator = 0.0;
    double submodule_invariance = 0.0;

    std::vector<bool> ap_verdicts;  // per point indicator
    std::size_t heine_borel_checked = 0;
    std::size_t heine_borel_skipped = 0;
    bool heine_borel = true;
    bool ap_module = true;
    bool localization = true;

    // discrete spectrum, AP dense, TOB-orbit dense, localization
    bool discrete_spectrum = false;
    bool ap_dense = false;
    bool tob_dense = false;
    bool localizable = false;

    std::size_t weakly_mixing_dim = 0;
    std::string note;

    bool corollary_agrees() const {
        return discrete_spectrum == ap_dense && ap_dense == tob_dense && tob_dense == localizable;
    }
    bool passed(double subspace_tol) const {
        return fm_ap <= subspace_tol && fm_tob <= subspace_tol && ap_tob <= subspace_tol &&
               fm_in_ap <= subspace_tol && ap_in_tob <= subspace_tol && group_commutator <= subspace_tol &&
               module_commutator <= subspace_tol && submodule_invariance <= subspace_tol && heine_borel &&
               ap_module && localization && discrete_spectrum && ap_dense && tob_dense && localizable;
    }
};

inline CrossCheckReport theorem_cross_check(const Extension& ext, const CrossCheckOptions& opt = {}) {
    CrossCheckReport rep;
    const auto& X = ext.X();
    const std::size_t n = X.size();
    rep.points = n;
    rep.base_points = ext.Y().size();
    rep.group_order = ext.group_size();

    // (1) finite-rank invariant submodules generated by the point indicators
    const Subspace fm = kronecker_subspace(ext, opt.tol);
    rep.kronecker_dim = rep.fm_dim = fm.dim();
    for (std::size_t x = 0; x < n; ++x)
        rep.submodule_invariance = std::max(
            rep.submodule_invariance, invariance_residual(generated_submodule(ext.point_indicator(x), ext, opt.tol), ext));
    rep.group_commutator = group_commutator(fm, ext);
    rep.module_commutator = module_commutator(fm, ext);

    // (2) conditionally almost periodic point indicators
    std::vector<Function> ap_funcs;
    for (std::size_t x = 0; x < n; ++x) {
        const auto f = ext.point_indicator(x);
        const bool ok = is_conditionally_ap(f, ext, opt.eps, opt.tol).all();
        rep.ap_verdicts.push_back(ok);
        if (ok) ap_funcs.push_back(f);
    }
    const Subspace ap = span_functions(ap_funcs, X, opt.tol);
    rep.ap_dim = ap.dim();

    // (3) functions with totally order-bounded orbit: orbits of the point
    // indicators and their restrictions to single fibers
    std::vector<Function> tob_funcs;
    for (std::size_t x = 0; x < n; ++x) {
        const auto f = ext.point_indicator(x);
        if (!is_orbit_tob(f, ext, opt.tol).verdict) continue;
        for (const auto& g : orbit_functions(f, ext, opt.tol)) {
            tob_funcs.push_back(g);
            for (std::size_t y = 0; y < ext.Y().size(); ++y) {
                Function loc = Function::Zero(static_cast<Eigen::Index>(n));
                for (auto z : ext.fiber(y)) loc(static_cast<Eigen::Index>(z)) = g(static_cast<Eigen::Index>(z));
                if (loc.cwiseAbs().maxCoeff() > 0) tob_funcs.push_back(std::move(loc));
            }
        }
    }
    const Subspace tob = span_functions(tob_funcs, X, opt.tol);
    rep.tob_dim = tob.dim();

    rep.fm_ap = projector_distance(fm, ap);
    rep.fm_tob = projector_distance(fm, tob);
    rep.ap_tob = projector_distance(ap, tob);
    rep.fm_in_ap = inclusion_residual(fm, ap);
    rep.ap_in_tob = inclusion_residual(ap, tob);

    // Heine-Borel certificates and closure properties on the point indicators
    for (std::size_t x = 0; x < n && opt.heine_borel; ++x) {
        const auto f = ext.point_indicator(x);
        const double c = sup_norm(ext.rel_norm(f));
        try {
            const auto hb = heine_borel_certificate(f, ext, c, opt.net_cap, opt.tol);
            rep.heine_borel = rep.heine_borel && hb.passed;
            ++rep.heine_borel_checked;
        } catch (const SizeCapError&) {
            ++rep.heine_borel_skipped;
        }
    }
    for (std::size_t x = 0; x < n; ++x) {
        const auto f = ext.point_indicator(x);
        const auto g = ext.point_indicator((x + 1) % n) - 0.5 * f;
        Function h(static_cast<Eigen::Index>(ext.Y().size()));
        for (Eigen::Index y = 0; y < h.size(); ++y) h(y) = Complex(1.0 + 0.5 * static_cast<double>(y), -0.25);
        for (double e : opt.eps) rep.ap_module = rep.ap_module && ap_module_checks(f, g, h, ext, e, opt.tol).all();
    }

    // Localization of every basis function of L^2(X) and of their sum
    std::vector<Function> probes;
    for (std::size_t x = 0; x < n; ++x) probes.push_back(ext.point_indicator(x));
    probes.push_back(Function::Ones(static_cast<Eigen::Index>(n)));
    for (const auto& f : probes)
        for (double d : opt.delta) rep.localization = rep.localization && localize_ap(f, ext, d, opt.eps, opt.tol).passed(d, opt.tol);

    rep.discrete_spectrum = fm.dim() == n;
    rep.ap_dense = ap.dim() == n;
    rep.tob_dense = tob.dim() == n;
    rep.localizable = rep.localization;
    rep.weakly_mixing_dim = n - fm.dim();
    rep.note = "finite model: every orbit is finite, so the weakly mixing part is zero (dimension " +
               std::to_string(rep.weakly_mixing_dim) + ") and all four characterizations hold";
    return rep;
}

}  // namespace tob

#endif  // TOB_RELSTRUCT_HPP
