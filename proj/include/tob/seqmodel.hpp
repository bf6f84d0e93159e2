#ifndef TOB_SEQMODEL_HPP
#define TOB_SEQMODEL_HPP

// Truncated model of bounded H-valued sequences: coordinates 1..N followed
// by one tail coordinate, each carrying a vector of H = C^N.  The family
//   M = { 1_{k} (x) e_j : 1 <= j <= k <= N }
// is totally order-bounded (the increasing nets F_n = {0} u {1 (x) e_l : l <= n}
// drive the defect to zero coordinatewise) but not uniformly so: any d-point
// set misses some e_i by at least sqrt(2)/2 at every coordinate n > d.
// M and every F_n have zero tail.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tob/errors.hpp"
#include "tob/lns.hpp"
#include "tob/relstruct.hpp"
#include "tob/stone.hpp"

namespace tob::seq {

inline constexpr double sqrt2 = std::numbers::sqrt2;

class TruncatedSeqSpace {
public:
    explicit TruncatedSeqSpace(std::size_t N) : N_(N) {
        if (N < 2) throw ArgumentError("sequence model: N must be at least 2");
        std::vector<std::string> labels;
        for (std::size_t k = 1; k <= N; ++k) labels.push_back(std::to_string(k));
        labels.emplace_back("tail");
        points_ = PointSet(std::move(labels));
        space_ = FiberSpace::uniform(N + 1, N);
    }

    std::size_t length() const noexcept { return N_; }
    std::size_t tail() const noexcept { return N_; }  // point index of the tail
    const FiberSpace& space() const noexcept { return space_; }
    const PointSet& points() const noexcept { return points_; }

    // 1_{k} (x) e_j, 1-based
    ModuleVector indicator(std::size_t k, std::size_t j) const {
        check(k, "coordinate");
        check(j, "basis index");
        auto x = ModuleVector::zero(space_);
        x.fiber(k - 1)(static_cast<Eigen::Index>(j - 1)) = 1.0;
        return x;
    }

    // 1 (x) e_l on coordinates 1..N, zero tail
    ModuleVector constant(std::size_t l) const {
        check(l, "basis index");
        auto x = ModuleVector::zero(space_);
        for (std::size_t k = 0; k < N_; ++k) x.fiber(k)(static_cast<Eigen::Index>(l - 1)) = 1.0;
        return x;
    }

private:
    void check(std::size_t i, const char* what) const {
        if (i < 1 || i > N_) throw ArgumentError(std::string("sequence model: ") + what + " out of range");
    }

    std::size_t N_;
    PointSet points_{std::vector<std::string>{"0"}};
    FiberSpace space_;
};

struct Counterexample {
    TruncatedSeqSpace model;
    FiniteSet M;
    std::vector<FiniteSet> nets;  // nets[n] = F_n for n = 0..N, F_0 = {0}
};

inline Counterexample build_counterexample(std::size_t N) {
    TruncatedSeqSpace model(N);
    FiniteSet M(model.space());
    for (std::size_t k = 1; k <= N; ++k)
        for (std::size_t j = 1; j <= k; ++j) M.push_back(model.indicator(k, j));
    std::vector<FiniteSet> nets;
    FiniteSet F(model.space(), {ModuleVector::zero(model.space())});
    nets.push_back(F);
    for (std::size_t l = 1; l <= N; ++l) {
        F.push_back(model.constant(l));
        nets.push_back(F);
    }
    return Counterexample{std::move(model), std::move(M), std::move(nets)};
}

struct TobBound {
    std::size_t n = 0;
    StoneElement defect;
    bool zero_on_prefix = false;   // defect = 0 on coordinates 1..n
    bool bounded_beyond = false;   // defect <= sqrt 2 on n+1..N and the tail
    bool passed() const { return zero_on_prefix && bounded_beyond; }
};

inline TobBound verify_tob_bound(const Counterexample& c, std::size_t n, double tol = default_tol) {
    const std::size_t N = c.model.length();
    if (n < 1 || n > N) throw ArgumentError("verify_tob_bound: n must lie in 1..N");
    TobBound b;
    b.n = n;
    b.defect = defect(c.M, c.nets[n]).value;
    b.zero_on_prefix = true;
    b.bounded_beyond = true;
    for (std::size_t k = 0; k <= N; ++k) {
        if (k < n)
            b.zero_on_prefix = b.zero_on_prefix && std::abs(b.defect[k]) <= tol;
        else
            b.bounded_beyond = b.bounded_beyond && b.defect[k] <= sqrt2 + tol;
    }
    return b;
}

inline TobBound verify_tob_bound(std::size_t N, std::size_t n, double tol = default_tol) {
    return verify_tob_bound(build_counterexample(N), n, tol);
}

struct NotUtobWitness {
    std::size_t coordinate = 0;  // n, 1-based
    std::size_t basis = 0;       // i, 1-based
    double distance = 0.0;       // min_j |e_i - g_j(n)|
};

// For F with d < N nonzero members, finds n > d and i <= n with
// min_j |e_i - g_j(n)| >= sqrt(2)/2, so that 1_{n} (x) e_i in M stays
// sqrt(2)/2 away from F at coordinate n.  Zero members lie at distance 1 from
// every e_i and do not count towards d; an empty F is treated as {0}.
inline NotUtobWitness verify_not_utob(const TruncatedSeqSpace& model, const FiniteSet& F) {
    const std::size_t N = model.length();
    detail::require_same_space(model.space(), F.space(), "verify_not_utob");
    FiniteSet G = F.empty() ? FiniteSet(model.space(), {ModuleVector::zero(model.space())}) : F;
    std::size_t d = 0;
    for (const auto& g : F) d += sup_norm(lattice_norm(g)) > 0.0;
    if (d >= N) throw ArgumentError("verify_not_utob: F needs fewer than N nonzero members");
    const double level = sqrt2 / 2;
    for (std::size_t n = d + 1; n <= N; ++n) {
        for (std::size_t i = 1; i <= n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& g : G) {
                Fiber diff = -g.fiber(n - 1);
                diff(static_cast<Eigen::Index>(i - 1)) += 1.0;
                best = std::min(best, diff.norm());
            }
            if (best >= level) return NotUtobWitness{n, i, best};
        }
    }
    throw InternalError("verify_not_utob: no witness found; the sequence model is inconsistent");
}

struct EgoroffDemo {
    std::size_t m = 0;            // A = {1..m}
    Idempotent A;                 // over the N + 1 points
    double removed_mass = 0.0;    // mu(A^c)
    std::vector<double> weights;  // 2^{-k} for k = 1..N, 2^{-N} on the tail
    StoneElement localized_defect;  // defect(1_A M, 1_A F_m)
    bool uniform = false;
    bool utob = false;            // localized defect vanishes on A, hence at every eps
};

inline std::vector<double> dyadic_weights(std::size_t N) {
    std::vector<double> w;
    for (std::size_t k = 1; k <= N; ++k) w.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    w.push_back(std::ldexp(1.0, -static_cast<int>(N)));
    return w;
}

// Egoroff localization of the defect sequence u_n = defect(M, F_n), n = 0..N.
// The tail stands for the coordinates beyond the window, where the defect
// against every F_n is 1; it never converges and must be removed first.
inline EgoroffDemo egoroff_demo(std::size_t N, double delta, double tol = default_tol) {
    const auto c = build_counterexample(N);
    EgoroffDemo out;
    out.weights = dyadic_weights(N);
    if (!(delta > 0)) throw ArgumentError("egoroff_demo: delta must be positive");
    if (delta < out.weights.back())
        throw InfeasibleError("egoroff_demo: delta " + std::to_string(delta) + " is below the tail mass 2^-" +
                              std::to_string(N) + " of this truncation");
    std::vector<StoneElement> u;
    for (const auto& F : c.nets) {
        auto v = defect(c.M, F).value;
        v[c.model.tail()] = 1.0;
        u.push_back(std::move(v));
    }
    const auto eg = egoroff_localize(u, out.weights, delta, {}, tol);
    out.A = eg.keep;
    out.removed_mass = eg.removed_mass;
    out.uniform = eg.uniform;
    while (out.m < N && out.A[out.m]) ++out.m;
    for (std::size_t k = out.m; k <= N; ++k)
        if (out.A[k]) throw InternalError("egoroff_demo: localized set is not an initial segment");

    FiniteSet AM(c.model.space()), AF(c.model.space());
    for (const auto& x : c.M) AM.push_back(out.A * x);
    for (const auto& y : c.nets[out.m]) AF.push_back(out.A * y);
    out.localized_defect = defect(AM, AF).value;
    out.utob = sup_norm(out.localized_defect) <= tol;
    return out;
}

// Rows n = 1..N, columns: coordinates 1..N and the tail.
inline std::string defect_table_csv(std::size_t N) {
    const auto c = build_counterexample(N);
    std::ostringstream os;
    os.precision(17);
    os << "n";
    for (std::size_t k = 1; k <= N; ++k) os << "," << k;
    os << ",tail\n";
    for (std::size_t n = 1; n <= N; ++n) {
        const auto d = defect(c.M, c.nets[n]).value;
        os << n;
        for (std::size_t k = 0; k <= N; ++k) os << "," << d[k];
        os << "\n";
    }
    return os.str();
}

}  // namespace tob::seq

#endif  // TOB_SEQMODEL_HPP
