#ifndef TOB_MPS_HPP
#define TOB_MPS_HPP

// Finite measure-preserving G-systems and their extensions.
//
// A system is a finite probability space with strictly positive weights and
// a group acting by measure-preserving permutations.  An extension X|Y is a
// pair of such systems with a factor map pi : X -> Y pushing mu_X to mu_Y
// and intertwining paired generators.  The group element t acts on
// functions by the Koopman operator (T_t f)(x) = f(tau_t^{-1}(x)), which
// makes t -> T_t a homomorphism.
//
// L^2(X|Y) is realised fiberwise: the fiber over y lists pi^{-1}(y) in point
// order, and encode(f)(y) = (sqrt(mu(x) / mu_Y(y)) f(x))_x, so that the
// Euclidean fiber norm of encode(f) is |f|_Y = sqrt(E_Y |f|^2).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tob/errors.hpp"
#include "tob/lns.hpp"
#include "tob/stone.hpp"

namespace tob {

using Function = Eigen::VectorXcd;

inline constexpr std::size_t default_group_cap = 100'000;

class FiniteProbabilitySpace {
public:
    FiniteProbabilitySpace(PointSet points, std::vector<double> weights, double tol = default_tol)
        : points_(std::move(points)), weights_(std::move(weights)) {
        if (weights_.size() != points_.size())
            throw ArgumentError("probability space: " + std::to_string(weights_.size()) + " weights for " +
                                std::to_string(points_.size()) + " points");
        double sum = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (!(weights_[i] > 0.0))
                throw ArgumentError("probability space: weight of point '" + points_.label(i) + "' is not positive");
            sum += weights_[i];
        }
        if (std::abs(sum - 1.0) > tol)
            throw ArgumentError("probability space: weights sum to " + std::to_string(sum) + ", not 1");
    }

    static FiniteProbabilitySpace uniform(std::size_t n) {
        return FiniteProbabilitySpace(PointSet::indexed(n), std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    std::size_t size() const noexcept { return weights_.size(); }
    const PointSet& points() const noexcept { return points_; }
    double weight(std::size_t i) const { return weights_.at(i); }
    const std::vector<double>& weights() const noexcept { return weights_; }

    Complex integrate(const Function& f) const {
        Complex s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * f(static_cast<Eigen::Index>(i));
        return s;
    }
    // <f, g>_{L^2} = integral of f conj(g)
    Complex inner(const Function& f, const Function& g) const {
        Complex s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            s += weights_[i] * f(k) * std::conj(g(k));
        }
        return s;
    }
    double norm(const Function& f) const { return std::sqrt(std::max(0.0, inner(f, f).real())); }

    // diag(sqrt(mu)): L^2(mu) -> C^n isometrically.
    Eigen::VectorXd sqrt_weights() const {
        Eigen::VectorXd s(static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) s(static_cast<Eigen::Index>(i)) = std::sqrt(weights_[i]);
        return s;
    }

private:
    PointSet points_;
    std::vector<double> weights_;
};

class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
        std::vector<bool> hit(image_.size(), false);
        for (auto v : image_) {
            if (v >= image_.size() || hit[v]) throw ArgumentError("permutation: image is not a bijection");
            hit[v] = true;
        }
    }
    static Permutation identity(std::size_t n) {
        std::vector<std::size_t> id(n);
        std::iota(id.begin(), id.end(), 0);
        return Permutation(std::move(id));
    }
    // Cyclic shift x -> x + k mod n.
    static Permutation rotation(std::size_t n, std::size_t k) {
        std::vector<std::size_t> im(n);
        for (std::size_t i = 0; i < n; ++i) im[i] = (i + k) % n;
        return Permutation(std::move(im));
    }

    std::size_t size() const noexcept { return image_.size(); }
    std::size_t operator()(std::size_t i) const { return image_.at(i); }
    const std::vector<std::size_t>& image() const noexcept { return image_; }

    Permutation inverse() const {
        std::vector<std::size_t> inv(image_.size());
        for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
        return Permutation(std::move(inv));
    }

    // (a * b)(i) = a(b(i))
    friend Permutation operator*(const Permutation& a, const Permutation& b) {
        if (a.size() != b.size()) throw DimensionError("permutation product: size mismatch");
        std::vector<std::size_t> im(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) im[i] = a.image_[b.image_[i]];
        return Permutation(std::move(im));
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < image_.size(); ++i)
            if (image_[i] != i) return false;
        return true;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> image_;
};

inline bool is_measure_preserving(const Permutation& tau, const FiniteProbabilitySpace& X,
                                  double tol = default_tol) {
    if (tau.size() != X.size()) return false;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (std::abs(X.weight(tau(i)) - X.weight(i)) > tol) return false;
    return true;
}

// Finite group generated by permutations, enumerated breadth first from the
// identity by left multiplication with the generators and their inverses.
class GroupAction {
public:
    GroupAction() = default;
    GroupAction(std::vector<Permutation> generators, std::vector<Permutation> elements)
        : generators_(std::move(generators)), elements_(std::move(elements)) {
        for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
    }

    const std::vector<Permutation>& generators() const noexcept { return generators_; }
    const std::vector<Permutation>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const Permutation& element(std::size_t t) const {
        if (t >= elements_.size())
            throw UnknownElementError("group element " + std::to_string(t) + " is outside the enumerated closure");
        return elements_[t];
    }
    std::optional<std::size_t> find(const Permutation& p) const {
        auto it = index_.find(p);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<Permutation> generators_;
    std::vector<Permutation> elements_;
    std::map<Permutation, std::size_t> index_;
};

inline GroupAction enumerate_group(const std::vector<Permutation>& gens, std::size_t n,
                                   std::size_t cap = default_group_cap) {
    if (cap < 1) throw ArgumentError("enumerate_group: cap must be at least 1");
    for (const auto& g : gens)
        if (g.size() != n) throw DimensionError("enumerate_group: generator acts on the wrong number of points");
    std::vector<Permutation> steps;
    for (const auto& g : gens) {
        steps.push_back(g);
        steps.push_back(g.inverse());
    }
    std::vector<Permutation> elements{Permutation::identity(n)};
    std::map<Permutation, std::size_t> seen{{elements.front(), 0}};
    for (std::size_t head = 0; head < elements.size(); ++head) {
        for (const auto& s : steps) {
            Permutation next = s * elements[head];
            if (seen.contains(next)) continue;
            if (elements.size() >= cap)
                throw CapExceededError("enumerate_group: closure exceeds cap " + std::to_string(cap), cap);
            seen.emplace(next, elements.size());
            elements.push_back(std::move(next));
        }
    }
    return GroupAction(gens, std::move(elements));
}

// Raw description of an extension; may be invalid.
struct ExtensionData {
    FiniteProbabilitySpace upstairs;
    std::vector<Permutation> upstairs_generators;
    FiniteProbabilitySpace downstairs;
    std::vector<Permutation> downstairs_generators;
    std::vector<std::size_t> factor;  // pi(x) for each point x of X
};

struct ValidationReport {
    bool valid = true;
    std::vector<std::string> violations;
};

inline ValidationReport validate_extension(const ExtensionData& e, double tol = default_tol) {
    ValidationReport rep;
    auto bad = [&rep](std::string s) {
        rep.valid = false;
        rep.violations.push_back(std::move(s));
    };
    const auto& X = e.upstairs;
    const auto& Y = e.downstairs;
    if (e.upstairs_generators.size() != e.downstairs_generators.size())
        bad("generator count mismatch: " + std::to_string(e.upstairs_generators.size()) + " upstairs vs " +
            std::to_string(e.downstairs_generators.size()) + " downstairs");
    for (std::size_t k = 0; k < e.upstairs_generators.size(); ++k) {
        const auto& g = e.upstairs_generators[k];
        if (g.size() != X.size())
            bad("upstairs generator " + std::to_string(k) + " acts on " + std::to_string(g.size()) + " points");
        else if (!is_measure_preserving(g, X, tol))
            bad("measure preservation: upstairs generator " + std::to_string(k) + " moves mass");
    }
    for (std::size_t k = 0; k < e.downstairs_generators.size(); ++k) {
        const auto& g = e.downstairs_generators[k];
        if (g.size() != Y.size())
            bad("downstairs generator " + std::to_string(k) + " acts on " + std::to_string(g.size()) + " points");
        else if (!is_measure_preserving(g, Y, tol))
            bad("measure preservation: downstairs generator " + std::to_string(k) + " moves mass");
    }
    if (e.factor.size() != X.size()) {
        bad("factor map has " + std::to_string(e.factor.size()) + " entries for " + std::to_string(X.size()) +
            " points");
        return rep;
    }
    bool in_range = true;
    for (std::size_t x = 0; x < e.factor.size(); ++x) {
        if (e.factor[x] >= Y.size()) {
            bad("factor map sends point '" + X.points().label(x) + "' outside the base space");
            in_range = false;
        }
    }
    if (!in_range) return rep;

    std::vector<double> push(Y.size(), 0.0);
    for (std::size_t x = 0; x < X.size(); ++x) push[e.factor[x]] += X.weight(x);
    for (std::size_t y = 0; y < Y.size(); ++y)
        if (std::abs(push[y] - Y.weight(y)) > tol)
            bad("pushforward: mass over base point '" + Y.points().label(y) + "' is " + std::to_string(push[y]) +
                " but its weight is " + std::to_string(Y.weight(y)));

    const std::size_t pairs = std::min(e.upstairs_generators.size(), e.downstairs_generators.size());
    for (std::size_t k = 0; k < pairs; ++k) {
        const auto& up = e.upstairs_generators[k];
        const auto& down = e.downstairs_generators[k];
        if (up.size() != X.size() || down.size() != Y.size()) continue;
        for (std::size_t x = 0; x < X.size(); ++x) {
            if (e.factor[up(x)] != down(e.factor[x])) {
                bad("intertwining: generator " + std::to_string(k) + " fails pi(tau x) = sigma(pi x) at point '" +
                    X.points().label(x) + "'");
                break;
            }
        }
    }
    return rep;
}

// A validated extension with its enumerated group and fiber structure.
class Extension {
public:
    explicit Extension(ExtensionData data, std::size_t cap = default_group_cap, double tol = default_tol)
        : data_(std::move(data)) {
        const auto rep = validate_extension(data_, tol);
        if (!rep.valid) {
            std::string msg = "invalid extension:";
            for (const auto& v : rep.violations) msg += "\n  " + v;
            throw InvalidExtensionError(msg);
        }
        const std::size_t nx = data_.upstairs.size();
        const std::size_t ny = data_.downstairs.size();

        // Enumerate the paired action on the disjoint union X + Y so that
        // every group element carries both tau_t and sigma_t.
        std::vector<Permutation> joint;
        for (std::size_t k = 0; k < data_.upstairs_generators.size(); ++k) {
            std::vector<std::size_t> im(nx + ny);
            for (std::size_t x = 0; x < nx; ++x) im[x] = data_.upstairs_generators[k](x);
            for (std::size_t y = 0; y < ny; ++y) im[nx + y] = nx + data_.downstairs_generators[k](y);
            joint.emplace_back(std::move(im));
        }
        const auto g = enumerate_group(joint, nx + ny, cap);
        for (const auto& p : g.elements()) {
            std::vector<std::size_t> up(nx), down(ny);
            for (std::size_t x = 0; x < nx; ++x) up[x] = p(x);
            for (std::size_t y = 0; y < ny; ++y) down[y] = p(nx + y) - nx;
            up_.emplace_back(std::move(up));
            down_.emplace_back(std::move(down));
        }
        up_inv_.reserve(up_.size());
        down_inv_.reserve(down_.size());
        for (const auto& p : up_) up_inv_.push_back(p.inverse());
        for (const auto& p : down_) down_inv_.push_back(p.inverse());

        fibers_.assign(ny, {});
        for (std::size_t x = 0; x < nx; ++x) fibers_[data_.factor[x]].push_back(x);
        std::vector<std::size_t> dims;
        for (std::size_t y = 0; y < ny; ++y) {
            if (fibers_[y].empty())
                throw InvalidExtensionError("base point '" + data_.downstairs.points().label(y) + "' has an empty fiber");
            dims.push_back(fibers_[y].size());
        }
        space_ = FiberSpace(std::move(dims));
        slot_.assign(nx, 0);
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t s = 0; s < fibers_[y].size(); ++s) slot_[fibers_[y][s]] = s;
    }

    const ExtensionData& data() const noexcept { return data_; }
    const FiniteProbabilitySpace& X() const noexcept { return data_.upstairs; }
    const FiniteProbabilitySpace& Y() const noexcept { return data_.downstairs; }
    std::size_t factor(std::size_t x) const { return data_.factor.at(x); }

    std::size_t group_size() const noexcept { return up_.size(); }
    const Permutation& upstairs_element(std::size_t t) const { check(t); return up_[t]; }
    const Permutation& downstairs_element(std::size_t t) const { check(t); return down_[t]; }

    // Fiber structure of L^2(X|Y).
    const FiberSpace& rel_space() const noexcept { return space_; }
    const std::vector<std::size_t>& fiber(std::size_t y) const { return fibers_.at(y); }
    double fiber_weight(std::size_t x) const { return X().weight(x) / Y().weight(factor(x)); }

    // (T_t f)(x) = f(tau_t^{-1} x)
    Function koopman(std::size_t t, const Function& f) const {
        check(t);
        require_x(f);
        Function out(f.size());
        for (std::size_t x = 0; x < X().size(); ++x)
            out(static_cast<Eigen::Index>(x)) = f(static_cast<Eigen::Index>(up_inv_[t](x)));
        return out;
    }
    // (S_t g)(y) = g(sigma_t^{-1} y)
    Function koopman_base(std::size_t t, const Function& g) const {
        check(t);
        require_y(g);
        Function out(g.size());
        for (std::size_t y = 0; y < Y().size(); ++y)
            out(static_cast<Eigen::Index>(y)) = g(static_cast<Eigen::Index>(down_inv_[t](y)));
        return out;
    }

    // (E_Y f)(y) = sum_{x in pi^{-1} y} f(x) mu(x) / mu_Y(y)
    Function cond_expectation(const Function& f) const {
        require_x(f);
        Function out = Function::Zero(static_cast<Eigen::Index>(Y().size()));
        for (std::size_t x = 0; x < X().size(); ++x)
            out(static_cast<Eigen::Index>(factor(x))) += f(static_cast<Eigen::Index>(x)) * fiber_weight(x);
        return out;
    }

    // (J g)(x) = g(pi x)
    Function embed(const Function& g) const {
        require_y(g);
        Function out(static_cast<Eigen::Index>(X().size()));
        for (std::size_t x = 0; x < X().size(); ++x)
            out(static_cast<Eigen::Index>(x)) = g(static_cast<Eigen::Index>(factor(x)));
        return out;
    }

    // <f, g>_Y = E_Y(f conj g)
    Function rel_inner(const Function& f, const Function& g) const {
        require_x(f);
        require_x(g);
        return cond_expectation(f.cwiseProduct(g.conjugate()));
    }

    // |f|_Y = sqrt(<f, f>_Y)
    StoneElement rel_norm(const Function& f) const {
        const Function ip = rel_inner(f, f);
        std::vector<double> v(static_cast<std::size_t>(ip.size()));
        for (std::size_t y = 0; y < v.size(); ++y) v[y] = std::sqrt(std::max(0.0, ip(static_cast<Eigen::Index>(y)).real()));
        return StoneElement(std::move(v));
    }

    ModuleVector encode(const Function& f) const {
        require_x(f);
        std::vector<Fiber> fibers;
        for (std::size_t y = 0; y < Y().size(); ++y) {
            Fiber v(static_cast<Eigen::Index>(fibers_[y].size()));
            for (std::size_t s = 0; s < fibers_[y].size(); ++s) {
                const auto x = fibers_[y][s];
                v(static_cast<Eigen::Index>(s)) = std::sqrt(fiber_weight(x)) * f(static_cast<Eigen::Index>(x));
            }
            fibers.push_back(std::move(v));
        }
        return ModuleVector(space_, std::move(fibers));
    }

    Function decode(const ModuleVector& v) const {
        detail::require_same_space(space_, v.space(), "decode");
        Function f(static_cast<Eigen::Index>(X().size()));
        for (std::size_t x = 0; x < X().size(); ++x)
            f(static_cast<Eigen::Index>(x)) =
                v.fiber(factor(x))(static_cast<Eigen::Index>(slot_[x])) / std::sqrt(fiber_weight(x));
        return f;
    }

    // Function on Y as an element of the Stone algebra L^infty(Y).
    static ComplexCoefficient coefficient(const Function& g) {
        return ComplexCoefficient(std::vector<Complex>(g.data(), g.data() + g.size()));
    }

    // Indicator delta_x.
    Function point_indicator(std::size_t x) const {
        Function f = Function::Zero(static_cast<Eigen::Index>(X().size()));
        f(static_cast<Eigen::Index>(x)) = 1.0;
        return f;
    }

private:
    void check(std::size_t t) const {
        if (t >= up_.size())
            throw UnknownElementError("group element " + std::to_string(t) + " is outside the enumerated closure");
    }
    void require_x(const Function& f) const {
        if (static_cast<std::size_t>(f.size()) != X().size()) throw DimensionError("function is not defined on X");
    }
    void require_y(const Function& g) const {
        if (static_cast<std::size_t>(g.size()) != Y().size()) throw DimensionError("function is not defined on Y");
    }

    ExtensionData data_;
    std::vector<Permutation> up_, down_, up_inv_, down_inv_;
    std::vector<std::vector<std::size_t>> fibers_;
    std::vector<std::size_t> slot_;
    FiberSpace space_;
};

// Free-function forms.
inline Function koopman(std::size_t t, const Function& f, const Extension& ext) { return ext.koopman(t, f); }
inline Function cond_expectation(const Function& f, const Extension& ext) { return ext.cond_expectation(f); }
inline Function embed_J(const Function& g, const Extension& ext) { return ext.embed(g); }
inline Function rel_inner(const Function& f, const Function& g, const Extension& ext) { return ext.rel_inner(f, g); }
inline StoneElement rel_norm(const Function& f, const Extension& ext) { return ext.rel_norm(f); }

// Identity extension X|X.
inline ExtensionData identity_extension(const FiniteProbabilitySpace& X, const std::vector<Permutation>& gens) {
    std::vector<std::size_t> id(X.size());
    std::iota(id.begin(), id.end(), 0);
    return ExtensionData{X, gens, X, gens, id};
}

// Rotation on Z_n over rotation on Z_m via reduction mod m (m divides n).
inline ExtensionData rotation_extension(std::size_t n, std::size_t m) {
    if (m == 0 || n % m != 0) throw ArgumentError("rotation_extension: m must divide n");
    std::vector<std::size_t> pi(n);
    for (std::size_t x = 0; x < n; ++x) pi[x] = x % m;
    return ExtensionData{FiniteProbabilitySpace::uniform(n), {Permutation::rotation(n, 1)},
                         FiniteProbabilitySpace::uniform(m), {Permutation::rotation(m, 1)}, pi};
}

}  // namespace tob

#endif  // TOB_MPS_HPP
