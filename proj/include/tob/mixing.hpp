#ifndef TOB_MIXING_HPP
#define TOB_MIXING_HPP

// Boolean-valued structure on a lattice-normed module: the B-set equality
// [x = y], mixings over partitions of unity, mix-closure membership, and
// the cyclic-compactness witnesses obtained from total order-boundedness.
//
// The mix-closure itself is never materialised.  Over a finite Omega, x is
// in mix(M) iff every fiber x(w) coincides with m(w) for some m in M.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tob/errors.hpp"
#include "tob/lns.hpp"
#include "tob/stone.hpp"

namespace tob {

// [x = y], the complement of supp |x - y|.
inline Idempotent eq_idempotent(const ModuleVector& x, const ModuleVector& y,
                                double tol = default_tol) {
    return supp(distance(x, y), tol).complement();
}

// The mixing sum_a p_a x_a: fiber w is taken from the family member whose
// part contains w.
inline ModuleVector mix(const PartitionOfUnity& p, const std::vector<ModuleVector>& family) {
    if (family.size() != p.size())
        throw ArgumentError("mix: family has " + std::to_string(family.size()) + " members but partition has " +
                            std::to_string(p.size()) + " parts");
    if (family.empty()) throw ArgumentError("mix: empty family");
    const auto& space = family.front().space();
    for (const auto& x : family) detail::require_same_space(space, x.space(), "mix");
    detail::require_same_size(p.points(), space.points(), "mix");
    ModuleVector out = ModuleVector::zero(space);
    for (std::size_t w = 0; w < space.points(); ++w) out.fiber(w) = family[p.owner(w)].fiber(w);
    return out;
}

inline ModuleVector mix(const PartitionOfUnity& p, const FiniteSet& family) {
    return mix(p, family.elements());
}

// Mixing of algebra elements (the B-set map image side).
inline StoneElement mix(const PartitionOfUnity& p, const std::vector<StoneElement>& family) {
    if (family.size() != p.size()) throw ArgumentError("mix: family/partition size mismatch");
    StoneElement out = StoneElement::zero(p.points());
    for (std::size_t w = 0; w < p.points(); ++w) out[w] = family[p.owner(w)][w];
    return out;
}

struct MixWitness {
    PartitionOfUnity partition;
    std::vector<std::size_t> assignment;  // index into M for each part
};

// x in mix(M)?  Each point is assigned to the lowest-index m with
// |x(w) - m(w)| <= tol; parts are formed per assigned index, in index order.
inline std::optional<MixWitness> mix_membership(const ModuleVector& x, const FiniteSet& M,
                                                double tol = default_tol) {
    detail::require_same_space(x.space(), M.space(), "mix_membership");
    const std::size_t n = x.points();
    std::vector<std::size_t> chosen(n, M.size());
    for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t i = 0; i < M.size(); ++i) {
            if ((x.fiber(w) - M[i].fiber(w)).norm() <= tol) {
                chosen[w] = i;
                break;
            }
        }
        if (chosen[w] == M.size()) return std::nullopt;
    }
    std::vector<std::size_t> used = chosen;
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::map<std::size_t, std::size_t> part_of;
    for (std::size_t a = 0; a < used.size(); ++a) part_of[used[a]] = a;
    std::vector<std::size_t> owner(n);
    for (std::size_t w = 0; w < n; ++w) owner[w] = part_of[chosen[w]];
    return MixWitness{PartitionOfUnity::from_owner(owner, used.size()), used};
}

// ---------------------------------------------------------------------------
// Cyclic compactness
// ---------------------------------------------------------------------------

struct CyclicPart {
    std::size_t cardinality = 0;  // n
    Idempotent q;                 // q_n
    FiniteSet generators;         // F_n = {y_1^n, ..., y_n^n}
};

struct CyclicWitness {
    double eps = 0.0;
    std::vector<CyclicPart> parts;

    PartitionOfUnity partition() const {
        std::vector<Idempotent> qs;
        for (const auto& p : parts) qs.push_back(p.q);
        return PartitionOfUnity(std::move(qs));
    }
};

// Builds the witness from an explicit candidate family of finite sets:
//  - p_F from the exhaustion principle applied to the cover
//    [sup_x inf_{y in F} |x - y| <= eps], ascending cardinality first;
//  - q_n = sup { p_F : #F = n };
//  - y_j^n = sum_{#F = n} p_F y_j^F (zero off q_n) and F_n = {y_1^n, ..., y_n^n}.
// Parts with q_n = 0 are dropped.
inline CyclicWitness cyclic_witness_from_candidates(const FiniteSet& M, double eps,
                                                    const std::vector<FiniteSet>& candidates,
                                                    double tol = default_tol) {
    if (!(eps > 0)) throw ArgumentError("cyclic_witness: eps must be positive");
    if (M.empty()) throw ArgumentError("cyclic_witness: M is empty");
    if (candidates.empty()) throw ConstructionError("cyclic_witness: no candidate sets");
    const std::size_t n = M.space().points();

    std::vector<Idempotent> cover;
    for (const auto& F : candidates) {
        if (F.empty()) throw ArgumentError("cyclic_witness: empty candidate set");
        cover.push_back(level_leq(defect(M, F).value, eps + tol));
    }
    std::vector<std::size_t> priority(candidates.size());
    std::iota(priority.begin(), priority.end(), 0);
    std::stable_sort(priority.begin(), priority.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].size() < candidates[b].size();
    });

    PartitionOfUnity p;
    try {
        p = exhaustion(cover, priority);
    } catch (const IncompleteCoverError& e) {
        throw ConstructionError("cyclic_witness: no candidate set reaches eps at point " +
                                std::to_string(e.point()) + " (M is not order-bounded at this level over the ball)");
    }

    std::map<std::size_t, std::vector<std::size_t>> by_size;
    for (std::size_t c = 0; c < candidates.size(); ++c) by_size[candidates[c].size()].push_back(c);

    CyclicWitness w;
    w.eps = eps;
    for (const auto& [card, members] : by_size) {
        Idempotent q = Idempotent::zero(n);
        for (auto c : members) q = q | p.part(c);
        if (q.is_zero()) continue;
        FiniteSet gens(M.space());
        for (std::size_t j = 0; j < card; ++j) {
            ModuleVector y = ModuleVector::zero(M.space());
            for (auto c : members) y += p.part(c) * candidates[c][j];
            gens.push_back(std::move(y));
        }
        w.parts.push_back(CyclicPart{card, std::move(q), std::move(gens)});
    }
    return w;
}

// Candidate family: the greedy witness chain of sizes 1..|M|, each truncated
// to the ball B[0; 2r].
inline CyclicWitness cyclic_witness(const FiniteSet& M, double eps, double r, double tol = default_tol) {
    if (!(r > 0)) throw ArgumentError("cyclic_witness: r must be positive");
    if (M.empty()) throw ArgumentError("cyclic_witness: M is empty");
    std::vector<FiniteSet> candidates;
    for (const auto& F : greedy_chain(M)) candidates.push_back(truncate_to_ball(F, r));
    return cyclic_witness_from_candidates(M, eps, candidates, tol);
}

struct CyclicVerification {
    bool passed = true;
    std::string failure;
    // max over n of q_n * sup_x inf_{y in F_n} |x - y|
    std::optional<StoneElement> localized_defect;
};

// For every x in M and every part n: z_n = fiberwise-nearest mixing of F_n,
// check q_n |x - z_n| <= eps 1, and q_n inf_{y in F_n} |x - y| <= eps 1.
inline CyclicVerification verify_cyclic(const FiniteSet& M, double eps, const CyclicWitness& w,
                                        double tol = default_tol) {
    CyclicVerification out;
    if (M.empty()) return out;
    const std::size_t n = M.space().points();
    auto fail = [&out](std::string why) {
        if (out.passed) out.failure = std::move(why);
        out.passed = false;
    };
    if (w.parts.empty()) {
        fail("witness has no parts");
        return out;
    }
    try {
        (void)w.partition();
    } catch (const Error& e) {
        fail(std::string("parts do not form a partition of unity: ") + e.what());
        return out;
    }

    const auto bound = StoneElement::constant(n, eps);
    StoneElement localized = StoneElement::zero(n);
    for (std::size_t k = 0; k < w.parts.size(); ++k) {
        const auto& part = w.parts[k];
        if (part.generators.empty()) {
            fail("part " + std::to_string(k) + " has no generators");
            continue;
        }
        for (std::size_t i = 0; i < M.size(); ++i) {
            const auto near = nearest(M[i], part.generators);
            const auto z = mix(PartitionOfUnity::from_owner(near.argmin, part.generators.size()), part.generators);
            if (!leq(part.q.apply(distance(M[i], z)), bound, tol))
                fail("q_" + std::to_string(part.cardinality) + " |x - z| exceeds eps for element " + std::to_string(i));
            const auto loc = part.q.apply(near.value);
            if (!leq(loc, bound, tol))
                fail("q_" + std::to_string(part.cardinality) + " inf |x - y| exceeds eps for element " +
                     std::to_string(i));
            localized = tob::sup(localized, loc);
        }
    }
    out.localized_defect = localized;
    return out;
}

}  // namespace tob

#endif  // TOB_MIXING_HPP
