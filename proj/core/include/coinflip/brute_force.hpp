#pragma once

// Independent oracle for the backward-induction analyzer: enumerate every
// deterministic cheating strategy of one party and take the best, instead
// of propagating maxima through the tree.
//
// A deterministic strategy fixes, for every node where the cheater moves,
// one concrete action:
//   - at the cheater's own send nodes: which message to send (any listed
//     branch, including branches of honest probability 0),
//   - at every shared-resource node: which endpoint of the cheater's
//     steerable interval to pick (the objective is linear in the chosen
//     bias, so an optimal cheater only ever needs the endpoints).
//
// Strategies are keyed by position in the tree, not by subtree identity:
// a subtree shared between two positions gets independent decisions for
// each, which is exactly the freedom a real cheater has. Randomized
// strategies cannot beat the best deterministic one (the payoff is linear
// in each decision), so the maximum over this finite set is the true
// optimum. The total strategy count is guarded by `limit`.

#include <cstdint>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <coinflip/analyze.hpp>
#include <coinflip/tree.hpp>

namespace coinflip {

namespace detail {

// Tree unfolded by position: shared subtrees are duplicated so every
// position can carry its own decision slot.
template <typename R>
struct PositionNode {
    const Node<R>* node;
    std::vector<PositionNode<R>> children;  // send: per branch; wcf: {alice_wins, bob_wins}
    std::size_t decision = SIZE_MAX;        // index into the strategy vector, if the cheater moves here
};

template <typename R>
PositionNode<R> unfold(const NodePtr<R>& n) {
    PositionNode<R> p;
    p.node = n.get();
    if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
        p.children.reserve(s->branches.size());
        for (const auto& b : s->branches) p.children.push_back(unfold<R>(b.child));
    } else if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
        p.children.push_back(unfold<R>(w->alice_wins));
        p.children.push_back(unfold<R>(w->bob_wins));
    }
    return p;
}

// Assign decision slots for `cheater` in depth-first order; returns the
// number of choices available at each slot.
template <typename R>
void assign_decisions(PositionNode<R>& p, Party cheater, std::vector<std::size_t>& counts) {
    if (const auto* s = std::get_if<SendNode<R>>(&p.node->v)) {
        if (s->sender == cheater) {
            p.decision = counts.size();
            counts.push_back(s->branches.size());
        }
    } else if (std::holds_alternative<WcfNode<R>>(p.node->v)) {
        p.decision = counts.size();
        counts.push_back(2);
    }
    for (auto& c : p.children) assign_decisions(c, cheater, counts);
}

// Probability that the honest party outputs 0 / 1 when the cheater plays
// the fixed strategy `strat`.
template <typename R>
std::pair<R, R> sweep(const PositionNode<R>& p, Party cheater, const std::vector<std::size_t>& strat) {
    if (const auto* l = std::get_if<LeafNode>(&p.node->v)) {
        if (l->output == Outcome::zero) return {R(1), R(0)};
        if (l->output == Outcome::one) return {R(0), R(1)};
        return {R(0), R(0)};
    }
    if (const auto* s = std::get_if<SendNode<R>>(&p.node->v)) {
        if (s->sender == cheater) return sweep(p.children[strat[p.decision]], cheater, strat);
        std::pair<R, R> acc{R(0), R(0)};
        for (std::size_t i = 0; i < p.children.size(); ++i) {
            auto c = sweep(p.children[i], cheater, strat);
            acc.first += s->branches[i].prob.value() * c.first;
            acc.second += s->branches[i].prob.value() * c.second;
        }
        return acc;
    }
    const auto& w = std::get<WcfNode<R>>(p.node->v);
    R q;
    if (cheater == Party::alice)
        q = strat[p.decision] == 0 ? R(0) : w.spec.alice_cap();
    else
        q = strat[p.decision] == 0 ? w.spec.bob_floor() : R(1);
    auto a = sweep(p.children[0], cheater, strat);
    auto b = sweep(p.children[1], cheater, strat);
    return {R(q * a.first) + R((R(1) - q) * b.first), R(q * a.second) + R((R(1) - q) * b.second)};
}

// Honest run of the subtree: probability of common output 0 / 1.
template <typename R>
std::pair<R, R> honest_sweep(const NodePtr<R>& n) {
    if (const auto* l = std::get_if<LeafNode>(&n->v)) {
        if (l->output == Outcome::zero) return {R(1), R(0)};
        if (l->output == Outcome::one) return {R(0), R(1)};
        return {R(0), R(0)};
    }
    if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
        std::pair<R, R> acc{R(0), R(0)};
        for (const auto& b : s->branches) {
            auto c = honest_sweep<R>(b.child);
            acc.first += b.prob.value() * c.first;
            acc.second += b.prob.value() * c.second;
        }
        return acc;
    }
    const auto& w = std::get<WcfNode<R>>(n->v);
    auto a = honest_sweep<R>(w.alice_wins);
    auto b = honest_sweep<R>(w.bob_wins);
    const R& z = w.spec.z.value();
    return {R(z * a.first) + R((R(1) - z) * b.first), R(z * a.second) + R((R(1) - z) * b.second)};
}

// Best forcing probabilities for `cheater`, by exhaustive enumeration.
template <typename R>
std::pair<R, R> best_forcing(const ProtocolTree<R>& tree, Party cheater, std::uint64_t limit) {
    PositionNode<R> root = unfold<R>(tree.root);
    std::vector<std::size_t> counts;
    assign_decisions(root, cheater, counts);

    std::uint64_t total = 1;
    for (std::size_t k : counts) {
        if (k == 0) return {R(0), R(0)};  // unreachable: validation rejects empty send nodes
        if (total > limit / k) throw ExplosionGuard("strategy count exceeds limit of " + std::to_string(limit));
        total *= k;
        if (total > limit) throw ExplosionGuard("strategy count exceeds limit of " + std::to_string(limit));
    }

    std::vector<std::size_t> strat(counts.size(), 0);
    std::pair<R, R> best{R(0), R(0)};
    for (std::uint64_t s = 0; s < total; ++s) {
        auto v = sweep(root, cheater, strat);
        if (v.first > best.first) best.first = v.first;
        if (v.second > best.second) best.second = v.second;
        // odometer increment
        for (std::size_t i = 0; i < strat.size(); ++i) {
            if (++strat[i] < counts[i]) break;
            strat[i] = 0;
        }
    }
    return best;
}

} // namespace detail

/// Analyze a tree by exhaustive strategy enumeration. Same contract and
/// result as analyze(), but computed without backward induction; throws
/// ExplosionGuard when a party has more than `limit` deterministic
/// strategies.
template <typename R>
AnalysisResult<R> brute_force_analyze(const ProtocolTree<R>& tree, std::uint64_t limit = 100000) {
    detail::require_well_formed(tree);
    auto honest = detail::honest_sweep<R>(tree.root);
    auto alice = detail::best_forcing(tree, Party::alice, limit);
    auto bob = detail::best_forcing(tree, Party::bob, limit);
    Prob<R> p00(honest.first);
    Prob<R> p11(honest.second);
    Prob<R> ab(R(R(1) - p00.value()) - p11.value());
    return AnalysisResult<R>{p00,          p11,         ab,           Prob<R>(alice.first),
                             Prob<R>(alice.second), Prob<R>(bob.first), Prob<R>(bob.second)};
}

} // namespace coinflip
