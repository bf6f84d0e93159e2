#ifndef TOB_STONE_HPP
#define TOB_STONE_HPP

// Finite Stone algebra A = C(Omega) for a finite point set Omega.
//
// Real-valued elements carry the lattice structure (pointwise order, sup,
// inf) and the sup-norm; complex coefficients act on modules; idempotents
// are the {0,1}-valued elements and form the Boolean algebra used for
// supports, mixings and partitions of unity.  On a finite discrete Omega
// the interior operation is the identity, so level-set idempotents such as
// [|y| <= c] are plain indicator masks.
//
// Elements are indexed 0..n-1 and identified with their base point set by
// cardinality; PointSet only carries the labels for I/O.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tob/errors.hpp"

namespace tob {

inline constexpr double default_tol = 1e-9;

class PointSet {
public:
    explicit PointSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) throw ArgumentError("point set must contain at least one point");
        std::set<std::string> seen(labels_.begin(), labels_.end());
        if (seen.size() != labels_.size()) throw ArgumentError("point labels must be unique");
    }

    // Points labelled "0", "1", ..., "n-1".
    static PointSet indexed(std::size_t n) {
        std::vector<std::string> labels;
        labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
        return PointSet(std::move(labels));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    std::optional<std::size_t> index_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - labels_.begin());
    }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::vector<std::string> labels_;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": point sets differ (" + std::to_string(a) +
                             " vs " + std::to_string(b) + " points)");
    }
}

}  // namespace detail

class StoneElement {
public:
    StoneElement() = default;
    explicit StoneElement(std::vector<double> values) : values_(std::move(values)) {}
    StoneElement(std::initializer_list<double> values) : values_(values) {}

    static StoneElement constant(std::size_t n, double c) {
        return StoneElement(std::vector<double>(n, c));
    }
    static StoneElement zero(std::size_t n) { return constant(n, 0.0); }
    static StoneElement one(std::size_t n) { return constant(n, 1.0); }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    StoneElement& operator+=(const StoneElement& o) {
        detail::require_same_size(size(), o.size(), "add");
        for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    StoneElement& operator-=(const StoneElement& o) {
        detail::require_same_size(size(), o.size(), "subtract");
        for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    StoneElement& operator*=(const StoneElement& o) {
        detail::require_same_size(size(), o.size(), "multiply");
        for (std::size_t i = 0; i < size(); ++i) values_[i] *= o.values_[i];
        return *this;
    }
    StoneElement& operator*=(double s) {
        for (auto& v : values_) v *= s;
        return *this;
    }

    friend StoneElement operator+(StoneElement a, const StoneElement& b) { return a += b; }
    friend StoneElement operator-(StoneElement a, const StoneElement& b) { return a -= b; }
    friend StoneElement operator*(StoneElement a, const StoneElement& b) { return a *= b; }
    friend StoneElement operator*(StoneElement a, double s) { return a *= s; }
    friend StoneElement operator*(double s, StoneElement a) { return a *= s; }
    friend StoneElement operator-(StoneElement a) { return a *= -1.0; }

    friend bool operator==(const StoneElement&, const StoneElement&) = default;

private:
    std::vector<double> values_;
};

// Lattice join.
inline StoneElement sup(const StoneElement& a, const StoneElement& b) {
    detail::require_same_size(a.size(), b.size(), "sup");
    StoneElement r = a;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

// Lattice meet.
inline StoneElement inf(const StoneElement& a, const StoneElement& b) {
    detail::require_same_size(a.size(), b.size(), "inf");
    StoneElement r = a;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::min(a[i], b[i]);
    return r;
}

inline StoneElement abs(const StoneElement& a) {
    StoneElement r = a;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::abs(a[i]);
    return r;
}

inline StoneElement sqrt(const StoneElement& a) {
    StoneElement r = a;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::sqrt(std::max(a[i], 0.0));
    return r;
}

inline double sup_norm(const StoneElement& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

// a <= b + tol pointwise.
inline bool leq(const StoneElement& a, const StoneElement& b, double tol = default_tol) {
    detail::require_same_size(a.size(), b.size(), "leq");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + tol) return false;
    return true;
}

inline bool approx_equal(const StoneElement& a, const StoneElement& b,
                         double tol = default_tol) {
    return leq(a, b, tol) && leq(b, a, tol);
}

inline bool is_positive(const StoneElement& a, double tol = default_tol) {
    return std::all_of(a.values().begin(), a.values().end(),
                       [tol](double v) { return v >= -tol; });
}

class ComplexCoefficient {
public:
    using value_type = std::complex<double>;

    ComplexCoefficient() = default;
    explicit ComplexCoefficient(std::vector<value_type> values) : values_(std::move(values)) {}
    ComplexCoefficient(std::initializer_list<value_type> values) : values_(values) {}
    explicit ComplexCoefficient(const StoneElement& real) {
        values_.reserve(real.size());
        for (double v : real.values()) values_.emplace_back(v, 0.0);
    }

    static ComplexCoefficient constant(std::size_t n, value_type c) {
        return ComplexCoefficient(std::vector<value_type>(n, c));
    }

    std::size_t size() const noexcept { return values_.size(); }
    value_type operator[](std::size_t i) const { return values_[i]; }
    value_type& operator[](std::size_t i) { return values_[i]; }
    std::span<const value_type> values() const noexcept { return values_; }

    // Pointwise modulus |lambda|.
    StoneElement modulus() const {
        std::vector<double> m(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) m[i] = std::abs(values_[i]);
        return StoneElement(std::move(m));
    }

    ComplexCoefficient conj() const {
        ComplexCoefficient r = *this;
        for (auto& v : r.values_) v = std::conj(v);
        return r;
    }

private:
    std::vector<value_type> values_;
};

class Idempotent {
public:
    Idempotent() = default;
    explicit Idempotent(std::vector<bool> mask) : mask_(std::move(mask)) {}
    Idempotent(std::initializer_list<bool> mask) : mask_(mask) {}

    static Idempotent zero(std::size_t n) { return Idempotent(std::vector<bool>(n, false)); }
    static Idempotent one(std::size_t n) { return Idempotent(std::vector<bool>(n, true)); }
    static Idempotent point(std::size_t n, std::size_t i) {
        Idempotent p = zero(n);
        p.mask_.at(i) = true;
        return p;
    }

    std::size_t size() const noexcept { return mask_.size(); }
    bool operator[](std::size_t i) const { return mask_[i]; }
    void set(std::size_t i, bool v) { mask_.at(i) = v; }
    const std::vector<bool>& mask() const noexcept { return mask_; }

    std::size_t count() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true)); }
    bool is_zero() const { return count() == 0; }
    bool is_one() const { return count() == size(); }

    StoneElement as_element() const {
        std::vector<double> v(mask_.size());
        for (std::size_t i = 0; i < mask_.size(); ++i) v[i] = mask_[i] ? 1.0 : 0.0;
        return StoneElement(std::move(v));
    }

    Idempotent complement() const {
        Idempotent r = *this;
        r.mask_.flip();
        return r;
    }

    // Product p*q (meet).
    friend Idempotent operator&(const Idempotent& p, const Idempotent& q) {
        detail::require_same_size(p.size(), q.size(), "idempotent meet");
        Idempotent r = p;
        for (std::size_t i = 0; i < p.size(); ++i) r.mask_[i] = p[i] && q[i];
        return r;
    }
    // Join p + q - pq.
    friend Idempotent operator|(const Idempotent& p, const Idempotent& q) {
        detail::require_same_size(p.size(), q.size(), "idempotent join");
        Idempotent r = p;
        for (std::size_t i = 0; i < p.size(); ++i) r.mask_[i] = p[i] || q[i];
        return r;
    }

    // Multiplication of an algebra element by the idempotent.
    StoneElement apply(const StoneElement& a) const {
        detail::require_same_size(size(), a.size(), "idempotent action");
        StoneElement r = a;
        for (std::size_t i = 0; i < size(); ++i)
            if (!mask_[i]) r[i] = 0.0;
        return r;
    }

    friend bool operator==(const Idempotent&, const Idempotent&) = default;

private:
    std::vector<bool> mask_;
};

// p <= q in the Boolean algebra.
inline bool leq(const Idempotent& p, const Idempotent& q) {
    detail::require_same_size(p.size(), q.size(), "idempotent order");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] && !q[i]) return false;
    return true;
}

// Support of a: the points where |a| exceeds tol.
inline Idempotent supp(const StoneElement& a, double tol = default_tol) {
    if (tol < 0) throw ArgumentError("supp: tolerance must be nonnegative");
    std::vector<bool> mask(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mask[i] = std::abs(a[i]) > tol;
    return Idempotent(std::move(mask));
}

// Level-set idempotent [a <= c].
inline Idempotent level_leq(const StoneElement& a, double c) {
    std::vector<bool> mask(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mask[i] = a[i] <= c;
    return Idempotent(std::move(mask));
}

class PartitionOfUnity {
public:
    PartitionOfUnity() = default;

    // Parts must be pairwise disjoint and sum to one. Zero parts are allowed.
    explicit PartitionOfUnity(std::vector<Idempotent> parts) : parts_(std::move(parts)) {
        if (parts_.empty()) throw ArgumentError("partition of unity needs at least one part");
        const std::size_t n = parts_.front().size();
        for (const auto& p : parts_) detail::require_same_size(n, p.size(), "partition of unity");
        owner_.assign(n, parts_.size());
        for (std::size_t a = 0; a < parts_.size(); ++a) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!parts_[a][i]) continue;
                if (owner_[i] != parts_.size())
                    throw ArgumentError("partition of unity: parts " + std::to_string(owner_[i]) +
                                        " and " + std::to_string(a) + " overlap at point " +
                                        std::to_string(i));
                owner_[i] = a;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (owner_[i] == parts_.size())
                throw IncompleteCoverError("partition of unity does not cover point " +
                                               std::to_string(i),
                                           i);
    }

    // Builds the partition from a per-point part index.
    static PartitionOfUnity from_owner(const std::vector<std::size_t>& owner, std::size_t parts) {
        std::vector<Idempotent> ps(parts, Idempotent::zero(owner.size()));
        for (std::size_t i = 0; i < owner.size(); ++i) ps.at(owner[i]).set(i, true);
        return PartitionOfUnity(std::move(ps));
    }

    static PartitionOfUnity trivial(std::size_t n) { return PartitionOfUnity({Idempotent::one(n)}); }

    std::size_t size() const noexcept { return parts_.size(); }
    std::size_t points() const noexcept { return owner_.size(); }
    const Idempotent& part(std::size_t a) const { return parts_.at(a); }
    const std::vector<Idempotent>& parts() const noexcept { return parts_; }
    // Index of the unique part containing point i.
    std::size_t owner(std::size_t i) const { return owner_.at(i); }

private:
    std::vector<Idempotent> parts_;
    std::vector<std::size_t> owner_;
};

// Exhaustion principle on a finite Boolean algebra: p_i <= cover_i, pairwise
// disjoint, summing to one.  Each point goes to the first covering idempotent
// in priority order (default: list order).  Parts keep the cover's indexing.
inline PartitionOfUnity exhaustion(const std::vector<Idempotent>& cover,
                                   std::optional<std::vector<std::size_t>> priority = std::nullopt) {
    if (cover.empty()) throw ArgumentError("exhaustion: empty cover");
    const std::size_t n = cover.front().size();
    for (const auto& c : cover) detail::require_same_size(n, c.size(), "exhaustion");

    std::vector<std::size_t> order;
    if (priority) {
        order = *priority;
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> expect(cover.size());
        std::iota(expect.begin(), expect.end(), 0);
        if (sorted != expect) throw ArgumentError("exhaustion: priority is not a permutation of the cover");
    } else {
        order.resize(cover.size());
        std::iota(order.begin(), order.end(), 0);
    }

    std::vector<std::size_t> owner(n, cover.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k : order) {
            if (cover[k][i]) {
                owner[i] = k;
                break;
            }
        }
        if (owner[i] == cover.size())
            throw IncompleteCoverError("exhaustion: cover does not reach 1 at point " + std::to_string(i), i);
    }
    return PartitionOfUnity::from_owner(owner, cover.size());
}

}  // namespace tob

#endif  // TOB_STONE_HPP
