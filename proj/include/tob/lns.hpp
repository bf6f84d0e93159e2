#ifndef TOB_LNS_HPP
#define TOB_LNS_HPP

// Fiberwise lattice-normed modules over a finite Stone algebra.
//
// A module E over A = C(Omega) is modelled as the direct product of the
// Hilbert fibers C^{d_w}, w in Omega.  The lattice norm |x| is the pointwise
// Euclidean fiber norm and A acts by pointwise scalar multiplication.
// Everything that involves an infimum over a finite set F is evaluated
// pointwise: in C(Omega) the infimum of finitely many elements is the
// pointwise minimum.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "tob/errors.hpp"
#include "tob/stone.hpp"

namespace tob {

using Complex = std::complex<double>;
using Fiber = Eigen::VectorXcd;

class FiberSpace {
public:
    FiberSpace() = default;
    explicit FiberSpace(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw ArgumentError("fiber space needs at least one point");
        for (auto d : dims_)
            if (d == 0) throw ArgumentError("fiber dimensions must be positive");
    }
    static FiberSpace uniform(std::size_t points, std::size_t dim) {
        return FiberSpace(std::vector<std::size_t>(points, dim));
    }

    std::size_t points() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t w) const { return dims_.at(w); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t max_dim() const { return *std::max_element(dims_.begin(), dims_.end()); }

    friend bool operator==(const FiberSpace&, const FiberSpace&) = default;

private:
    std::vector<std::size_t> dims_;
};

namespace detail {

inline void require_same_space(const FiberSpace& a, const FiberSpace& b, const char* what) {
    if (!(a == b)) throw DimensionError(std::string(what) + ": fiber spaces differ");
}

}  // namespace detail

class ModuleVector {
public:
    ModuleVector() = default;
    ModuleVector(FiberSpace space, std::vector<Fiber> fibers)
        : space_(std::move(space)), fibers_(std::move(fibers)) {
        if (fibers_.size() != space_.points())
            throw DimensionError("module vector: wrong number of fibers");
        for (std::size_t w = 0; w < fibers_.size(); ++w)
            if (static_cast<std::size_t>(fibers_[w].size()) != space_.dim(w))
                throw DimensionError("module vector: fiber " + std::to_string(w) +
                                     " has wrong dimension");
    }

    static ModuleVector zero(const FiberSpace& space) {
        std::vector<Fiber> f;
        f.reserve(space.points());
        for (auto d : space.dims()) f.push_back(Fiber::Zero(static_cast<Eigen::Index>(d)));
        return ModuleVector(space, std::move(f));
    }

    // Fiber w set to the j-th unit vector, all other fibers zero.
    static ModuleVector unit(const FiberSpace& space, std::size_t w, std::size_t j) {
        ModuleVector x = zero(space);
        x.fibers_.at(w)(static_cast<Eigen::Index>(j)) = 1.0;
        return x;
    }

    const FiberSpace& space() const noexcept { return space_; }
    std::size_t points() const noexcept { return fibers_.size(); }
    const Fiber& fiber(std::size_t w) const { return fibers_.at(w); }
    Fiber& fiber(std::size_t w) { return fibers_.at(w); }

    ModuleVector& operator+=(const ModuleVector& o) {
        detail::require_same_space(space_, o.space_, "add");
        for (std::size_t w = 0; w < fibers_.size(); ++w) fibers_[w] += o.fibers_[w];
        return *this;
    }
    ModuleVector& operator-=(const ModuleVector& o) {
        detail::require_same_space(space_, o.space_, "subtract");
        for (std::size_t w = 0; w < fibers_.size(); ++w) fibers_[w] -= o.fibers_[w];
        return *this;
    }
    ModuleVector& operator*=(Complex s) {
        for (auto& f : fibers_) f *= s;
        return *this;
    }

    friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
    friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
    friend ModuleVector operator*(Complex s, ModuleVector a) { return a *= s; }

    // Module action of A.
    friend ModuleVector operator*(const ComplexCoefficient& l, ModuleVector x) {
        detail::require_same_size(l.size(), x.points(), "module action");
        for (std::size_t w = 0; w < x.points(); ++w) x.fibers_[w] *= l[w];
        return x;
    }
    friend ModuleVector operator*(const StoneElement& l, ModuleVector x) {
        detail::require_same_size(l.size(), x.points(), "module action");
        for (std::size_t w = 0; w < x.points(); ++w) x.fibers_[w] *= l[w];
        return x;
    }
    friend ModuleVector operator*(const Idempotent& p, ModuleVector x) {
        detail::require_same_size(p.size(), x.points(), "module action");
        for (std::size_t w = 0; w < x.points(); ++w)
            if (!p[w]) x.fibers_[w].setZero();
        return x;
    }

    ModuleVector conj() const {
        ModuleVector r = *this;
        for (auto& f : r.fibers_) f = f.conjugate().eval();
        return r;
    }

private:
    FiberSpace space_;
    std::vector<Fiber> fibers_;
};

inline StoneElement lattice_norm(const ModuleVector& x) {
    std::vector<double> v(x.points());
    for (std::size_t w = 0; w < x.points(); ++w) v[w] = x.fiber(w).norm();
    return StoneElement(std::move(v));
}

// |x - y| without materialising the difference.
inline StoneElement distance(const ModuleVector& x, const ModuleVector& y) {
    detail::require_same_space(x.space(), y.space(), "distance");
    std::vector<double> v(x.points());
    for (std::size_t w = 0; w < x.points(); ++w) v[w] = (x.fiber(w) - y.fiber(w)).norm();
    return StoneElement(std::move(v));
}

// Fiberwise Hermitian product <x, y>(w) = y(w)^H x(w).
inline ComplexCoefficient inner(const ModuleVector& x, const ModuleVector& y) {
    detail::require_same_space(x.space(), y.space(), "inner");
    std::vector<Complex> v(x.points());
    for (std::size_t w = 0; w < x.points(); ++w) v[w] = y.fiber(w).dot(x.fiber(w));
    return ComplexCoefficient(std::move(v));
}

inline bool approx_equal(const ModuleVector& x, const ModuleVector& y, double tol = default_tol) {
    return sup_norm(distance(x, y)) <= tol;
}

// Fiberwise tensor product; a bilinear map with |x (x) y| = |x| |y|.
inline ModuleVector tensor(const ModuleVector& x, const ModuleVector& y) {
    detail::require_same_size(x.points(), y.points(), "tensor");
    std::vector<std::size_t> dims(x.points());
    std::vector<Fiber> fibers(x.points());
    for (std::size_t w = 0; w < x.points(); ++w) {
        const auto& a = x.fiber(w);
        const auto& b = y.fiber(w);
        dims[w] = static_cast<std::size_t>(a.size() * b.size());
        Fiber f(a.size() * b.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) f.segment(i * b.size(), b.size()) = a(i) * b;
        fibers[w] = std::move(f);
    }
    return ModuleVector(FiberSpace(std::move(dims)), std::move(fibers));
}

class FiniteSet {
public:
    FiniteSet() = default;
    explicit FiniteSet(FiberSpace space, std::vector<ModuleVector> elements = {})
        : space_(std::move(space)), elements_(std::move(elements)) {
        for (const auto& x : elements_) detail::require_same_space(space_, x.space(), "finite set");
    }
    // Space taken from the first element.
    explicit FiniteSet(std::vector<ModuleVector> elements) {
        if (elements.empty()) throw ArgumentError("finite set: cannot infer space from an empty list");
        space_ = elements.front().space();
        for (const auto& x : elements) detail::require_same_space(space_, x.space(), "finite set");
        elements_ = std::move(elements);
    }

    const FiberSpace& space() const noexcept { return space_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    const ModuleVector& operator[](std::size_t i) const { return elements_.at(i); }
    const std::vector<ModuleVector>& elements() const noexcept { return elements_; }
    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }

    void push_back(ModuleVector x) {
        detail::require_same_space(space_, x.space(), "finite set");
        elements_.push_back(std::move(x));
    }

    FiniteSet prefix(std::size_t k) const {
        return FiniteSet(space_, std::vector<ModuleVector>(elements_.begin(),
                                                          elements_.begin() + std::min(k, size())));
    }

private:
    FiberSpace space_;
    std::vector<ModuleVector> elements_;
};

// Pointwise sup_{x in M} |x|.
inline StoneElement sup_lattice_norm(const FiniteSet& M) {
    StoneElement s = StoneElement::zero(M.space().points());
    for (const auto& x : M) s = tob::sup(s, lattice_norm(x));
    return s;
}

// ---------------------------------------------------------------------------
// Defect functional  F -> sup_{x in M} inf_{y in F} |x - y|
// ---------------------------------------------------------------------------

struct NearestReport {
    StoneElement value;              // inf_{y in F} |x - y|
    std::vector<std::size_t> argmin;  // per point, lowest index attaining the minimum
};

inline NearestReport nearest(const ModuleVector& x, const FiniteSet& F) {
    if (F.empty()) throw ArgumentError("nearest: empty candidate set");
    detail::require_same_space(x.space(), F.space(), "nearest");
    const std::size_t n = x.points();
    NearestReport r{StoneElement::constant(n, std::numeric_limits<double>::infinity()),
                    std::vector<std::size_t>(n, 0)};
    for (std::size_t j = 0; j < F.size(); ++j) {
        for (std::size_t w = 0; w < n; ++w) {
            const double d = (x.fiber(w) - F[j].fiber(w)).norm();
            if (d < r.value[w]) {
                r.value[w] = d;
                r.argmin[w] = j;
            }
        }
    }
    return r;
}

struct DefectReport {
    StoneElement value;
    FiniteSet witness;
    // argmin[i][w]: index in witness nearest to M[i] at point w.
    std::vector<std::vector<std::size_t>> argmin;
    // attained_by[w]: index in M attaining the supremum at point w.
    std::vector<std::size_t> attained_by;
};

inline DefectReport defect(const FiniteSet& M, const FiniteSet& F) {
    if (M.empty()) throw ArgumentError("defect: M is empty");
    if (F.empty()) throw ArgumentError("defect: F is empty");
    detail::require_same_space(M.space(), F.space(), "defect");
    const std::size_t n = M.space().points();
    DefectReport rep{StoneElement::constant(n, -1.0), F, {}, std::vector<std::size_t>(n, 0)};
    rep.argmin.reserve(M.size());
    for (std::size_t i = 0; i < M.size(); ++i) {
        auto near = nearest(M[i], F);
        for (std::size_t w = 0; w < n; ++w) {
            if (near.value[w] > rep.value[w]) {
                rep.value[w] = near.value[w];
                rep.attained_by[w] = i;
            }
        }
        rep.argmin.push_back(std::move(near.argmin));
    }
    return rep;
}

// Farthest-point insertion order over M, seeded by the element of largest
// lattice sup-norm.  Ties go to the lowest index.
inline std::vector<std::size_t> greedy_order(const FiniteSet& M) {
    const std::size_t m = M.size();
    std::vector<std::size_t> order;
    if (m == 0) return order;
    order.reserve(m);
    std::vector<bool> used(m, false);

    std::size_t seed = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = sup_norm(lattice_norm(M[i]));
        if (s > best) {
            best = s;
            seed = i;
        }
    }
    order.push_back(seed);
    used[seed] = true;
    std::vector<StoneElement> gap(m);
    for (std::size_t i = 0; i < m; ++i) gap[i] = distance(M[i], M[seed]);

    while (order.size() < m) {
        std::size_t next = m;
        double far = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            const double s = sup_norm(gap[i]);
            if (s > far) {
                far = s;
                next = i;
            }
        }
        order.push_back(next);
        used[next] = true;
        for (std::size_t i = 0; i < m; ++i)
            if (!used[i]) gap[i] = tob::inf(gap[i], distance(M[i], M[next]));
    }
    return order;
}

// The chain of greedy witnesses of sizes 1..|M|.
inline std::vector<FiniteSet> greedy_chain(const FiniteSet& M) {
    std::vector<FiniteSet> chain;
    FiniteSet current(M.space());
    for (auto i : greedy_order(M)) {
        current.push_back(M[i]);
        chain.push_back(current);
    }
    return chain;
}

// defect(M, first k+1 elements of order) for every k, computed
// incrementally.
inline std::vector<StoneElement> greedy_chain_defects(const FiniteSet& M, const std::vector<std::size_t>& order) {
    const std::size_t n = M.space().points();
    std::vector<StoneElement> best(M.size(), StoneElement::constant(n, std::numeric_limits<double>::infinity()));
    std::vector<StoneElement> out;
    out.reserve(order.size());
    for (auto j : order) {
        StoneElement u = StoneElement::zero(n);
        for (std::size_t i = 0; i < M.size(); ++i) {
            best[i] = tob::inf(best[i], distance(M[i], M[j]));
            u = tob::sup(u, best[i]);
        }
        out.push_back(std::move(u));
    }
    return out;
}

inline std::vector<StoneElement> greedy_chain_defects(const FiniteSet& M) {
    return greedy_chain_defects(M, greedy_order(M));
}

struct UtobReport {
    bool verdict = false;
    FiniteSet witness;      // smallest greedy prefix achieving the bound
    DefectReport defect;    // defect(M, witness)
};

// Uniform total order-boundedness of an explicit finite M at level eps.
// F = M always works; the report carries the smallest greedy prefix that
// already achieves defect <= eps * 1.
inline UtobReport is_utob(const FiniteSet& M, double eps, double tol = default_tol) {
    if (!(eps > 0)) throw ArgumentError("is_utob: eps must be positive");
    if (M.empty()) throw ArgumentError("is_utob: M is empty");
    const auto order = greedy_order(M);
    const auto bound = StoneElement::constant(M.space().points(), eps);
    const auto u = greedy_chain_defects(M, order);
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!leq(u[k], bound, tol)) continue;
        FiniteSet prefix(M.space());
        for (std::size_t j = 0; j <= k; ++j) prefix.push_back(M[order[j]]);
        auto rep = defect(M, prefix);
        return UtobReport{true, prefix, std::move(rep)};
    }
    throw InternalError("is_utob: defect(M, M) exceeded eps");
}

// ---------------------------------------------------------------------------
// Heine-Borel nets
// ---------------------------------------------------------------------------

// Points of the closed disc of the given radius such that every z with
// |z| <= radius lies within rho of one of them.  Rings at radii min(k h, R),
// h = rho / sqrt 2; ring r carries m points with 2 r sin(pi / 2m) <= h.
// Rounding |z| up to the next ring moves at most h radially; the angular
// error then adds at most 4 r^2 sin^2(pi / 2m) <= h^2 to the square.
inline std::vector<Complex> disc_net(double radius, double rho) {
    if (!(rho > 0)) throw ArgumentError("disc_net: covering radius must be positive");
    if (radius < 0) throw ArgumentError("disc_net: negative radius");
    if (radius <= rho) return {Complex(0.0, 0.0)};
    const double h = rho / std::numbers::sqrt2;
    const auto rings = static_cast<std::size_t>(std::ceil(radius / h));
    std::vector<Complex> pts{Complex(0.0, 0.0)};
    for (std::size_t k = 1; k <= rings; ++k) {
        const double r = std::min(static_cast<double>(k) * h, radius);
        std::size_t m = 1;
        while (2.0 * r * std::sin(std::numbers::pi / (2.0 * static_cast<double>(m))) > h) ++m;
        for (std::size_t a = 0; a < m; ++a) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(m);
            pts.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    return pts;
}

inline constexpr std::size_t default_net_cap = 2'000'000;

namespace detail {

// All combinations sum_j z_j g_j with z_j from the grid, in mixed-radix order.
inline FiniteSet grid_combinations(const FiniteSet& gens, const std::vector<Complex>& grid,
                                   std::size_t cap, const char* what) {
    const std::size_t d = gens.size();
    const double count = std::pow(static_cast<double>(grid.size()), static_cast<double>(d));
    if (static_cast<double>(d) * count > static_cast<double>(cap))
        throw SizeCapError(std::string(what) + ": net of " + std::to_string(count) +
                           " elements exceeds cap " + std::to_string(cap));
    FiniteSet net(gens.space());
    std::vector<std::size_t> digit(d, 0);
    const auto total = static_cast<std::size_t>(count);
    for (std::size_t c = 0; c < total; ++c) {
        ModuleVector y = ModuleVector::zero(gens.space());
        for (std::size_t j = 0; j < d; ++j) {
            const Complex z = grid[digit[j]];
            if (z != Complex(0.0, 0.0)) y += z * gens[j];
        }
        net.push_back(std::move(y));
        for (std::size_t j = 0; j < d; ++j) {
            if (++digit[j] < grid.size()) break;
            digit[j] = 0;
        }
    }
    return net;
}

}  // namespace detail

// Checks <e_i, e_j> = 0 (i != j) and |e_j| in {0, 1} pointwise, within tol.
inline bool is_suborthonormal(const FiniteSet& basis, double tol = 1e-8) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto norm = lattice_norm(basis[i]);
        for (double v : norm.values())
            if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (sup_norm(inner(basis[i], basis[j]).modulus()) > tol) return false;
    }
    return true;
}

// Finite eps-net of {x in span(basis) : |x| <= c 1}:
// F = { sum_j z_j e_j : z_j in disc_net(c, eps / sqrt d) }.
inline FiniteSet heine_borel_net(const FiniteSet& basis, double c, double eps,
                                 std::size_t cap = default_net_cap) {
    if (basis.empty()) throw ArgumentError("heine_borel_net: empty basis");
    if (c < 0) throw ArgumentError("heine_borel_net: c must be nonnegative");
    if (!(eps > 0)) throw ArgumentError("heine_borel_net: eps must be positive");
    if (!is_suborthonormal(basis)) throw PreconditionError("heine_borel_net: basis is not suborthonormal");
    const double rho = eps / std::sqrt(static_cast<double>(basis.size()));
    const auto grid = disc_net(c, rho);
    if (grid.size() == 1) return FiniteSet(basis.space(), {ModuleVector::zero(basis.space())});
    return detail::grid_combinations(basis, grid, cap, "heine_borel_net");
}

// ---------------------------------------------------------------------------
// Zonotopes
// ---------------------------------------------------------------------------

// Z_F = { sum_y lambda_y y : lambda in A^F, |lambda_y| <= 1 }.
struct Zonotope {
    FiniteSet generators;
};

// sum_j lambda_j y_j.
inline ModuleVector combine(const std::vector<ComplexCoefficient>& lambda, const FiniteSet& F) {
    if (lambda.size() != F.size()) throw ArgumentError("combine: coefficient count mismatch");
    ModuleVector x = ModuleVector::zero(F.space());
    for (std::size_t j = 0; j < F.size(); ++j) x += lambda[j] * F[j];
    return x;
}

struct SolverOptions {
    double tol = 1e-7;
    std::size_t max_iter = 10'000;
};

struct ZonotopeDistance {
    StoneElement value;                        // upper bound on the distance, within tol of it
    StoneElement error_bound;                  // certified value - optimum
    std::vector<ComplexCoefficient> lambda;    // minimising coefficients, one per generator
    std::vector<std::size_t> iterations;       // per point
};

namespace detail {

inline Complex project_disc(Complex z) {
    const double a = std::abs(z);
    return a > 1.0 ? z / a : z;
}

struct FiberSolve {
    double value;
    double bound;
    Eigen::VectorXcd lambda;
    std::size_t iterations;
    bool converged;
};

// min over |lambda_j| <= 1 of |x - Y lambda| by projected gradient on
// f = 1/2 |Y lambda - x|^2 with step 1/L, with Nesterov momentum and
// gradient-based adaptive restart.  The Frank-Wolfe gap
// g = Re<grad, lambda> + sum_j |grad_j| bounds f - f*, which gives the
// certified distance error sqrt(2 f) - sqrt(2 (f - g)).
inline FiberSolve solve_fiber(const Eigen::MatrixXcd& Y, const Fiber& x, const SolverOptions& opt) {
    const Eigen::Index k = Y.cols();
    FiberSolve out{x.norm(), 0.0, Eigen::VectorXcd::Zero(k), 0, true};
    if (k == 0) return out;
    const Eigen::MatrixXcd G = Y.adjoint() * Y;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    const double L = es.eigenvalues().maxCoeff();
    if (L <= 0.0) return out;
    const Eigen::VectorXcd b = Y.adjoint() * x;

    auto project = [k](Eigen::VectorXcd& v) {
        for (Eigen::Index j = 0; j < k; ++j) v(j) = project_disc(v(j));
    };

    Eigen::VectorXcd lam = Eigen::VectorXcd::Zero(k);
    Eigen::VectorXcd prev = lam;
    Eigen::VectorXcd look = lam;
    double t = 1.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it <= opt.max_iter; ++it) {
        // certificate at the current iterate
        const Eigen::VectorXcd g = G * lam - b;
        const double f = 0.5 * (Y * lam - x).squaredNorm();
        double gap = g.dot(lam).real();
        for (Eigen::Index j = 0; j < k; ++j) gap += std::abs(g(j));
        gap = std::max(gap, 0.0);
        const double up = std::sqrt(2.0 * f);
        const double err = up - std::sqrt(std::max(0.0, 2.0 * (f - gap)));
        if (err < best_err) {
            best_err = err;
            out.value = up;
            out.bound = err;
            out.lambda = lam;
            out.iterations = it;
        }
        if (err <= opt.tol) return out;

        // accelerated projected step from the look-ahead point
        Eigen::VectorXcd next = look - (G * look - b) / L;
        project(next);
        if ((look - next).dot(next - lam).real() > 0.0) {
            // momentum points uphill: restart from a plain projected step
            t = 1.0;
            next = lam - g / L;
            project(next);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        prev = lam;
        lam = next;
        look = lam + ((t - 1.0) / t_next) * (lam - prev);
        t = t_next;
    }
    out.converged = false;
    return out;
}

}  // namespace detail

inline ZonotopeDistance zonotope_distance(const ModuleVector& x, const Zonotope& Z,
                                          const SolverOptions& opt = {}) {
    if (!(opt.tol > 0)) throw ArgumentError("zonotope_distance: tol must be positive");
    const auto& F = Z.generators;
    detail::require_same_space(x.space(), F.space(), "zonotope_distance");
    const std::size_t n = x.points();
    const std::size_t k = F.size();
    ZonotopeDistance res{StoneElement::zero(n), StoneElement::zero(n),
                         std::vector<ComplexCoefficient>(k, ComplexCoefficient::constant(n, 0.0)),
                         std::vector<std::size_t>(n, 0)};
    bool ok = true;
    for (std::size_t w = 0; w < n; ++w) {
        Eigen::MatrixXcd Y(static_cast<Eigen::Index>(x.space().dim(w)), static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < k; ++j) Y.col(static_cast<Eigen::Index>(j)) = F[j].fiber(w);
        const auto s = detail::solve_fiber(Y, x.fiber(w), opt);
        res.value[w] = s.value;
        res.error_bound[w] = s.bound;
        res.iterations[w] = s.iterations;
        for (std::size_t j = 0; j < k; ++j) res.lambda[j][w] = s.lambda(static_cast<Eigen::Index>(j));
        ok = ok && s.converged;
    }
    if (!ok) {
        auto vals = res.value.values();
        auto bnd = res.error_bound.values();
        throw IterationLimitError("zonotope_distance: no certified solution within " +
                                      std::to_string(opt.max_iter) + " iterations",
                                  std::vector<double>(vals.begin(), vals.end()),
                                  std::vector<double>(bnd.begin(), bnd.end()));
    }
    return res;
}

struct CpCheckReport {
    bool passed = true;
    std::vector<StoneElement> distances;  // one per element of M
    std::optional<std::size_t> first_violation;
};

// M subset of Z_F + B[0; eps], checked element by element.
inline CpCheckReport cp_check(const FiniteSet& M, const FiniteSet& F, double eps,
                              const SolverOptions& opt = {}) {
    if (!(eps > 0)) throw ArgumentError("cp_check: eps must be positive");
    CpCheckReport rep;
    const Zonotope Z{F};
    const auto bound = StoneElement::constant(M.space().points(), eps);
    for (std::size_t i = 0; i < M.size(); ++i) {
        auto d = zonotope_distance(M[i], Z, opt);
        if (!leq(d.value, bound, opt.tol) && !rep.first_violation) {
            rep.passed = false;
            rep.first_violation = i;
        }
        rep.distances.push_back(std::move(d.value));
    }
    return rep;
}

struct CpWitness {
    FiniteSet generators;
    // selections[i]: partition (p_y)_y with p_y |M[i] - y| <= eps.
    std::vector<PartitionOfUnity> selections;
};

// Idempotent selections from the fiberwise argmin: M[i] lies within eps of
// sum_y p_y y, which is a point of Z_F.
inline CpWitness cp_witness(const FiniteSet& M, const FiniteSet& F0, double eps,
                            double tol = default_tol) {
    if (!(eps > 0)) throw ArgumentError("cp_witness: eps must be positive");
    const auto rep = defect(M, F0);
    if (!leq(rep.value, StoneElement::constant(M.space().points(), eps), tol))
        throw PreconditionError("cp_witness: defect(M, F) exceeds eps");
    CpWitness w{F0, {}};
    for (const auto& owner : rep.argmin) w.selections.push_back(PartitionOfUnity::from_owner(owner, F0.size()));
    return w;
}

inline CpWitness cp_witness_from_utob(const FiniteSet& M, double eps, double tol = default_tol) {
    return cp_witness(M, is_utob(M, eps, tol).witness, eps, tol);
}

// The zonotope point sum_y p_y y selected for one element.
inline ModuleVector selected_point(const PartitionOfUnity& p, const FiniteSet& F) {
    std::vector<ComplexCoefficient> lambda;
    for (const auto& part : p.parts()) lambda.emplace_back(part.as_element());
    return combine(lambda, F);
}

// Net of Z_F with coefficients drawn from a disc grid of covering radius rho;
// every point of Z_F lies within rho * sup|sum_y |y|| of it.
inline FiniteSet zonotope_net(const FiniteSet& F, double rho, std::size_t cap = default_net_cap) {
    if (F.empty()) return FiniteSet(F.space(), {ModuleVector::zero(F.space())});
    return detail::grid_combinations(F, disc_net(1.0, rho), cap, "zonotope_net");
}

struct CpToUtob {
    bool cp_holds = false;
    bool verdict = false;   // defect(M, net) <= (eps + delta + tol) 1
    double delta = 0.0;
    FiniteSet net;
    StoneElement defect;
};

// (CP) => UTOB: if M lies in Z_F + B[0; eps] then the zonotope net witnesses
// uniform total order-boundedness at level eps + delta.
inline CpToUtob utob_from_cp(const FiniteSet& M, const FiniteSet& F, double eps, double rho,
                             const SolverOptions& opt = {}, std::size_t cap = default_net_cap) {
    CpToUtob out;
    out.cp_holds = cp_check(M, F, eps, opt).passed;
    StoneElement total = StoneElement::zero(M.space().points());
    for (const auto& y : F) total += lattice_norm(y);
    out.delta = rho * sup_norm(total);
    out.net = zonotope_net(F, rho, cap);
    out.defect = tob::defect(M, out.net).value;
    out.verdict = leq(out.defect, StoneElement::constant(M.space().points(), eps + out.delta), opt.tol);
    return out;
}

// ---------------------------------------------------------------------------
// Set operations
// ---------------------------------------------------------------------------

// Replaces each y by [|y| <= 2r] y.
inline FiniteSet truncate_to_ball(const FiniteSet& F, double r) {
    if (!(r > 0)) throw ArgumentError("truncate_to_ball: r must be positive");
    FiniteSet out(F.space());
    for (const auto& y : F) out.push_back(level_leq(lattice_norm(y), 2.0 * r) * y);
    return out;
}

inline FiniteSet set_sum(const FiniteSet& M, const FiniteSet& N) {
    detail::require_same_space(M.space(), N.space(), "set_sum");
    FiniteSet out(M.space());
    for (const auto& x : M)
        for (const auto& y : N) out.push_back(x + y);
    return out;
}

inline FiniteSet set_union(const FiniteSet& M, const FiniteSet& N) {
    FiniteSet out = M;
    for (const auto& y : N) out.push_back(y);
    return out;
}

inline FiniteSet set_tensor(const FiniteSet& M, const FiniteSet& N) {
    std::vector<ModuleVector> out;
    for (const auto& x : M)
        for (const auto& y : N) out.push_back(tensor(x, y));
    if (out.empty()) throw ArgumentError("set_tensor: empty factor");
    return FiniteSet(std::move(out));
}

inline FiniteSet set_scale(const ComplexCoefficient& l, const FiniteSet& M) {
    FiniteSet out(M.space());
    for (const auto& x : M) out.push_back(l * x);
    return out;
}

// A module map given by one matrix per point.
class FiberwiseMap {
public:
    FiberwiseMap(FiberSpace domain, std::vector<Eigen::MatrixXcd> blocks)
        : domain_(std::move(domain)), blocks_(std::move(blocks)) {
        if (blocks_.size() != domain_.points()) throw DimensionError("fiberwise map: block count mismatch");
        std::vector<std::size_t> out(blocks_.size());
        for (std::size_t w = 0; w < blocks_.size(); ++w) {
            if (static_cast<std::size_t>(blocks_[w].cols()) != domain_.dim(w))
                throw DimensionError("fiberwise map: block " + std::to_string(w) + " has wrong width");
            out[w] = static_cast<std::size_t>(blocks_[w].rows());
        }
        codomain_ = FiberSpace(std::move(out));
    }

    static FiberwiseMap identity(const FiberSpace& s) {
        std::vector<Eigen::MatrixXcd> b;
        for (auto d : s.dims()) b.push_back(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
        return FiberwiseMap(s, std::move(b));
    }

    const FiberSpace& domain() const noexcept { return domain_; }
    const FiberSpace& codomain() const noexcept { return codomain_; }
    const Eigen::MatrixXcd& block(std::size_t w) const { return blocks_.at(w); }

    ModuleVector operator()(const ModuleVector& x) const {
        detail::require_same_space(domain_, x.space(), "fiberwise map");
        std::vector<Fiber> f;
        for (std::size_t w = 0; w < blocks_.size(); ++w) f.push_back(blocks_[w] * x.fiber(w));
        return ModuleVector(codomain_, std::move(f));
    }

    // Pointwise operator norm c with |T x| <= c |x|.
    StoneElement bound() const {
        std::vector<double> c(blocks_.size());
        for (std::size_t w = 0; w < blocks_.size(); ++w) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blocks_[w]);
            c[w] = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        }
        return StoneElement(std::move(c));
    }

private:
    FiberSpace domain_;
    FiberSpace codomain_;
    std::vector<Eigen::MatrixXcd> blocks_;
};

inline FiniteSet set_image(const FiberwiseMap& T, const FiniteSet& M) {
    FiniteSet out(T.codomain());
    for (const auto& x : M) out.push_back(T(x));
    return out;
}

}  // namespace tob

#endif  // TOB_LNS_HPP
