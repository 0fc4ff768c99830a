#pragma once

// Deterministic generators for property tests: random probabilities,
// protocol trees with bounded brute-force cost, and feasible specs.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <coinflip/coinflip.hpp>

namespace testutil {

using namespace coinflip;

/// Deterministic test-case source, built on the library's random stream.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rs_(seed, 0) {}

    std::uint64_t bits() { return rs_.next_bits(); }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : bits() % n; }

    /// Random probability num/den with 1 <= den <= dmax, 0 <= num <= den.
    template <typename R>
    R prob(unsigned dmax = 8) {
        unsigned den = 1 + static_cast<unsigned>(below(dmax));
        unsigned num = static_cast<unsigned>(below(den + 1));
        return arith<R>::ratio(num, den);
    }

    Outcome outcome() {
        switch (below(3)) {
            case 0: return Outcome::zero;
            case 1: return Outcome::one;
            default: return Outcome::abort;
        }
    }

    Party party() { return below(2) == 0 ? Party::alice : Party::bob; }

private:
    RandomStream rs_;
};

/// Exact deterministic-strategy count for `cheater`, mirroring the
/// brute-force enumeration (choices multiply across tree positions).
template <typename R>
double count_strategies(const NodePtr<R>& n, Party cheater) {
    if (std::holds_alternative<LeafNode>(n->v)) return 1.0;
    if (const auto* w = std::get_if<WcfNode<R>>(&n->v))
        return 2.0 * count_strategies<R>(w->alice_wins, cheater) *
               count_strategies<R>(w->bob_wins, cheater);
    const auto& s = std::get<SendNode<R>>(n->v);
    double total = s.sender == cheater ? static_cast<double>(s.branches.size()) : 1.0;
    for (const auto& b : s.branches) total *= count_strategies<R>(b.child, cheater);
    return total;
}

namespace detail {

template <typename R>
NodePtr<R> random_node(Gen& g, int depth, bool allow_wcf) {
    if (depth <= 0 || g.below(100) < 30) return leaf<R>(g.outcome());
    if (allow_wcf && g.below(100) < 20) {
        Prob<R> z(g.prob<R>());
        Prob<R> eps(arith<R>::ratio(static_cast<long>(g.below(3)), 8));
        return wcf<R>(z, eps, random_node<R>(g, depth - 1, allow_wcf),
                      random_node<R>(g, depth - 1, allow_wcf));
    }
    const unsigned nb = 1 + static_cast<unsigned>(g.below(3));
    const unsigned den = 1 + static_cast<unsigned>(g.below(6));
    std::vector<unsigned> cuts{0, den};
    for (unsigned i = 0; i + 1 < nb; ++i)
        cuts.push_back(static_cast<unsigned>(g.below(den + 1)));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Branch<R>> branches;
    static const char* msgs[] = {"a", "b", "c"};
    for (unsigned i = 0; i < nb; ++i) {
        Prob<R> p(arith<R>::ratio(static_cast<long>(cuts[i + 1] - cuts[i]),
                                  static_cast<long>(den)));
        branches.push_back(
            Branch<R>{msgs[i], p, random_node<R>(g, depth - 1, allow_wcf)});
    }
    return send<R>(g.party(), std::move(branches));
}

} // namespace detail

/// Random well-formed tree whose brute-force strategy count stays within
/// `budget` for both parties (regenerates from successive sub-seeds).
template <typename R>
ProtocolTree<R> random_tree(std::uint64_t seed, int max_depth = 4, bool allow_wcf = true,
                            double budget = 2500.0) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Gen g(seed * 1000003 + attempt);
        ProtocolTree<R> t{detail::random_node<R>(g, max_depth, allow_wcf)};
        if (count_strategies<R>(t.root, Party::alice) <= budget &&
            count_strategies<R>(t.root, Party::bob) <= budget)
            return t;
    }
}

/// Random spec feasible in `setting` (rejection sampling over a rational
/// grid of caps and honest rates).
template <typename R>
CoinFlipSpec<R> random_feasible_spec(std::uint64_t seed, Setting setting) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Gen g(seed * 7368787 + attempt);
        R p0s = g.prob<R>(12), p1s = g.prob<R>(12);
        R ps0 = g.prob<R>(12), ps1 = g.prob<R>(12);
        R p00 = g.prob<R>(12), p11 = g.prob<R>(12);
        // Scale the honest rates under the caps to raise the hit rate.
        p00 = R(p00 * R(p0s * ps0));
        p11 = R(p11 * R(p1s * ps1));
        if (R(p00 + p11) > R(1)) continue;
        CoinFlipSpec<R> s{Prob<R>(p00), Prob<R>(p11), Prob<R>(p0s),
                          Prob<R>(p1s), Prob<R>(ps0), Prob<R>(ps1)};
        FeasibilityVerdict<R> v =
            setting == Setting::classical ? classical_feasible<R>(s) : quantum_feasible<R>(s);
        if (v.feasible) return s;
    }
}

/// Random feasible quantum spec whose synthesized tree really uses
/// WcfNodes (high caps, honest rates near the caps' products), found by
/// rejection against the synthesizer itself.
template <typename R>
std::pair<CoinFlipSpec<R>, ProtocolTree<R>> random_quantum_wcf_case(std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Gen g(seed * 52361 + attempt);
        auto num = [&](unsigned lo, unsigned hi) {
            return static_cast<long>(lo + g.below(hi - lo + 1));
        };
        R p0s = arith<R>::ratio(num(7, 12), 12), p1s = arith<R>::ratio(num(7, 12), 12);
        R ps0 = arith<R>::ratio(num(7, 12), 12), ps1 = arith<R>::ratio(num(7, 12), 12);
        R a = arith<R>::ratio(num(9, 12), 12), b = arith<R>::ratio(num(9, 12), 12);
        R p00 = R(R(a * p0s) * ps0), p11 = R(R(b * p1s) * ps1);
        if (R(p00 + p11) > R(1)) continue;
        CoinFlipSpec<R> spec = make_spec<R>(p00, p11, p0s, p1s, ps0, ps1);
        if (!quantum_feasible<R>(spec).feasible) continue;
        ProtocolTree<R> tree = synthesize<R>(spec, Setting::quantum);
        if (count_wcf_nodes<R>(tree) > 0) return {spec, tree};
    }
}

} // namespace testutil
