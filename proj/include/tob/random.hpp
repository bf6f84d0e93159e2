#ifndef TOB_RANDOM_HPP
#define TOB_RANDOM_HPP

// Random instance generators shared by the property suites and `selftest`.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "tob/lns.hpp"
#include "tob/mps.hpp"
#include "tob/stone.hpp"

namespace tob::random {

using Rng = std::mt19937_64;

inline std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex gaussian_complex(Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    return {n(rng), n(rng)};
}

// Uniform in the closed unit disc.
inline Complex unit_disc(Rng& rng) {
    const double r = std::sqrt(uniform_real(rng, 0.0, 1.0));
    const double th = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
    return std::polar(r, th);
}

inline FiberSpace fiber_space(Rng& rng, std::size_t max_points, std::size_t max_dim) {
    const std::size_t n = uniform_size(rng, 1, max_points);
    std::vector<std::size_t> dims(n);
    for (auto& d : dims) d = uniform_size(rng, 1, max_dim);
    return FiberSpace(std::move(dims));
}

inline ModuleVector vector(Rng& rng, const FiberSpace& s, double scale = 1.0) {
    std::vector<Fiber> f;
    for (auto d : s.dims()) {
        Fiber v(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gaussian_complex(rng, scale);
        f.push_back(std::move(v));
    }
    return ModuleVector(s, std::move(f));
}

// A vector whose lattice norm is at most bound pointwise (uniform radius in
// [0, bound] per fiber).
inline ModuleVector bounded_vector(Rng& rng, const FiberSpace& s, double bound) {
    ModuleVector x = vector(rng, s);
    for (std::size_t w = 0; w < s.points(); ++w) {
        const double n = x.fiber(w).norm();
        const double r = bound * uniform_real(rng, 0.0, 1.0);
        if (n > 0) x.fiber(w) *= r / n;
    }
    return x;
}

inline FiniteSet finite_set(Rng& rng, const FiberSpace& s, std::size_t count, double scale = 1.0) {
    FiniteSet M(s);
    for (std::size_t i = 0; i < count; ++i) M.push_back(vector(rng, s, scale));
    return M;
}

inline ComplexCoefficient coefficient(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<Complex> v(n);
    for (auto& z : v) z = gaussian_complex(rng, scale);
    return ComplexCoefficient(std::move(v));
}

// |lambda| <= 1 pointwise.
inline ComplexCoefficient disc_coefficient(Rng& rng, std::size_t n) {
    std::vector<Complex> v(n);
    for (auto& z : v) z = unit_disc(rng);
    return ComplexCoefficient(std::move(v));
}

inline Idempotent idempotent(Rng& rng, std::size_t n) {
    std::vector<bool> m(n);
    std::bernoulli_distribution b(0.5);
    for (std::size_t i = 0; i < n; ++i) m[i] = b(rng);
    return Idempotent(std::move(m));
}

inline PartitionOfUnity partition(Rng& rng, std::size_t n, std::size_t parts) {
    std::vector<std::size_t> owner(n);
    for (auto& o : owner) o = uniform_size(rng, 0, parts - 1);
    return PartitionOfUnity::from_owner(owner, parts);
}

// Suborthonormal basis of a uniform space: random unitary columns per point,
// some switched off so that ranks vary between points.
inline FiniteSet suborthonormal_basis(Rng& rng, std::size_t points, std::size_t dim, std::size_t d) {
    const auto space = FiberSpace::uniform(points, dim);
    std::vector<ModuleVector> basis(d, ModuleVector::zero(space));
    for (std::size_t w = 0; w < points; ++w) {
        Eigen::MatrixXcd A(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < A.size(); ++i) A(i) = gaussian_complex(rng);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
        const Eigen::MatrixXcd Q = qr.householderQ();
        for (std::size_t j = 0; j < d; ++j)
            if (j == 0 || uniform_real(rng, 0, 1) < 0.8) basis[j].fiber(w) = Q.col(static_cast<Eigen::Index>(j));
    }
    return FiniteSet(space, basis);
}

// sum_j lambda_j e_j with (lambda_j(w))_j uniform in the ball of radius c,
// so that |x| <= c pointwise for a suborthonormal basis.
inline ModuleVector ball_combination(Rng& rng, const FiniteSet& basis, double c) {
    const std::size_t n = basis.space().points();
    const std::size_t d = basis.size();
    std::vector<ComplexCoefficient> lambda(d, ComplexCoefficient::constant(n, 0.0));
    for (std::size_t w = 0; w < n; ++w) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(d));
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = gaussian_complex(rng);
        const double r = c * std::pow(uniform_real(rng, 0.0, 1.0), 1.0 / (2.0 * static_cast<double>(d)));
        if (v.norm() > 0) v *= r / v.norm();
        for (std::size_t j = 0; j < d; ++j) lambda[j][w] = v(static_cast<Eigen::Index>(j));
    }
    return combine(lambda, basis);
}

inline FiberwiseMap fiberwise_map(Rng& rng, const FiberSpace& domain, std::size_t max_out_dim) {
    std::vector<Eigen::MatrixXcd> blocks;
    for (auto d : domain.dims()) {
        Eigen::MatrixXcd B(static_cast<Eigen::Index>(uniform_size(rng, 1, max_out_dim)), static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < B.size(); ++i) B(i) = gaussian_complex(rng);
        blocks.push_back(std::move(B));
    }
    return FiberwiseMap(domain, std::move(blocks));
}

inline Permutation permutation(Rng& rng, std::size_t n) {
    std::vector<std::size_t> im(n);
    std::iota(im.begin(), im.end(), 0);
    std::shuffle(im.begin(), im.end(), rng);
    return Permutation(std::move(im));
}

// Random valid extension with at most max_x upstairs points.  The base
// action is a few random permutations with weights constant on their
// orbits.  Over each base orbit the fibers share a size k and a weight
// pattern; the upstairs generators move fiber y to sigma(y) by a random
// bijection that preserves the pattern's weight classes.
inline ExtensionData extension_candidate(Rng& rng, std::size_t max_x, std::size_t max_gens) {
    const std::size_t m = uniform_size(rng, 1, std::min<std::size_t>(4, max_x));
    const std::size_t g = uniform_size(rng, 1, max_gens);
    std::vector<Permutation> down;
    for (std::size_t k = 0; k < g; ++k) down.push_back(permutation(rng, m));

    std::vector<std::size_t> orbit(m);
    std::iota(orbit.begin(), orbit.end(), 0);
    auto root = [&orbit](std::size_t y) {
        while (orbit[y] != y) y = orbit[y] = orbit[orbit[y]];
        return y;
    };
    for (const auto& s : down)
        for (std::size_t y = 0; y < m; ++y) orbit[root(y)] = root(s(y));

    std::vector<double> base(m);
    std::map<std::size_t, double> orbit_weight;
    for (std::size_t y = 0; y < m; ++y) {
        auto [it, fresh] = orbit_weight.emplace(root(y), 0.0);
        if (fresh) it->second = uniform_real(rng, 0.2, 1.0);
        base[y] = it->second;
    }

    // Fiber size and weight classes per orbit.
    std::map<std::size_t, std::vector<std::size_t>> klass;  // class label per fiber slot
    std::map<std::size_t, std::vector<double>> pattern;
    std::size_t budget = max_x;
    std::size_t orbits_left = orbit_weight.size();
    for (std::size_t y = 0; y < m; ++y) {
        const auto r = root(y);
        if (klass.contains(r)) continue;
        std::size_t orbit_size = 0;
        for (std::size_t v = 0; v < m; ++v) orbit_size += root(v) == r;
        --orbits_left;
        const std::size_t room = (budget - orbits_left) / orbit_size;
        const std::size_t k = uniform_size(rng, 1, std::max<std::size_t>(1, std::min<std::size_t>(3, room)));
        budget -= k * orbit_size;
        std::vector<std::size_t> labels(k);
        for (auto& l : labels) l = uniform_size(rng, 0, 1);
        std::vector<double> class_weight{uniform_real(rng, 0.2, 1.0), uniform_real(rng, 0.2, 1.0)};
        std::vector<double> w(k);
        double total = 0;
        for (std::size_t i = 0; i < k; ++i) total += w[i] = class_weight[labels[i]];
        for (auto& v : w) v /= total;
        klass[r] = std::move(labels);
        pattern[r] = std::move(w);
    }

    double base_total = 0;
    for (auto v : base) base_total += v;
    for (auto& v : base) v /= base_total;

    std::vector<std::size_t> offset(m + 1, 0);
    for (std::size_t y = 0; y < m; ++y) offset[y + 1] = offset[y] + klass[root(y)].size();
    const std::size_t n = offset[m];
    std::vector<double> weights(n);
    std::vector<std::size_t> factor(n);
    for (std::size_t y = 0; y < m; ++y)
        for (std::size_t i = 0; i < klass[root(y)].size(); ++i) {
            weights[offset[y] + i] = base[y] * pattern[root(y)][i];
            factor[offset[y] + i] = y;
        }

    std::vector<Permutation> up;
    for (const auto& s : down) {
        std::vector<std::size_t> im(n);
        for (std::size_t y = 0; y < m; ++y) {
            const auto& labels = klass[root(y)];
            // Random bijection of slots preserving class labels.
            for (std::size_t c = 0; c < 2; ++c) {
                std::vector<std::size_t> slots;
                for (std::size_t i = 0; i < labels.size(); ++i)
                    if (labels[i] == c) slots.push_back(i);
                auto target = slots;
                std::shuffle(target.begin(), target.end(), rng);
                for (std::size_t j = 0; j < slots.size(); ++j) im[offset[y] + slots[j]] = offset[s(y)] + target[j];
            }
        }
        up.emplace_back(std::move(im));
    }
    return ExtensionData{FiniteProbabilitySpace(PointSet::indexed(n), weights), up,
                         FiniteProbabilitySpace(PointSet::indexed(m), base), down, factor};
}

// Draws candidates until the paired action closes within max_group elements.
inline ExtensionData extension(Rng& rng, std::size_t max_x, std::size_t max_group = 1000, std::size_t max_gens = 2) {
    for (;;) {
        auto data = extension_candidate(rng, max_x, max_gens);
        try {
            (void)Extension(data, max_group);
            return data;
        } catch (const CapExceededError&) {
        }
    }
}

inline Function function(Rng& rng, std::size_t n, double scale = 1.0) {
    Function f(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = gaussian_complex(rng, scale);
    return f;
}

}  // namespace tob::random

#endif  // TOB_RANDOM_HPP
