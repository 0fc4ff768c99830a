#pragma once

// Exact backward induction over protocol trees. A single post-order pass
// computes six quantities per node:
//
//   p00, p11          honest run: probability of common output 0 / 1
//   force_a0/force_a1 best Pr[honest Bob outputs 0 / 1] over dishonest Alices
//   force_b0/force_b1 best Pr[honest Alice outputs 0 / 1] over dishonest Bobs
//
// Combination rules:
//   leaf with output i: honest mass 1 on i; both forcing values toward i are
//     1, toward the other value 0; an abort leaf is 0 everywhere.
//   send node: honest values and the receiver's forcing values average over
//     the honest branch distribution; the sender's forcing values take the
//     maximum over all listed branches (a cheating sender may send any legal
//     message, including ones of honest probability 0).
//   resource node (z, eps): honest values mix with weights (z, 1-z). The
//     cheater picks Pr[Alice wins] = q anywhere in their steerable interval
//     and the objective is linear in q, so only the endpoints matter:
//     a cheating Alice has q in {0, min(1, z+eps)} (she may always lose
//     deliberately), a cheating Bob has q in {max(0, z-eps), 1}.
//
// Values are memoized per node, so shared subtrees are evaluated once.
// Evaluation order cannot change results; in floating mode maxima use a
// small tie slack and resolve ties toward the first branch so that reported
// optima are deterministic.

#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <coinflip/tree.hpp>

namespace coinflip {

template <typename R>
struct NodeValues {
    R p00{0}, p11{0};
    R force_a0{0}, force_a1{0};
    R force_b0{0}, force_b1{0};
};

template <typename R>
using ValueMap = std::unordered_map<const Node<R>*, NodeValues<R>>;

namespace detail {

// a < b with the mode's tie slack; used so maxima prefer earlier branches.
template <typename R>
bool improves(const R& best, const R& candidate) {
    return candidate > best + arith<R>::tie_slack();
}

template <typename R>
NodeValues<R> node_values(const NodePtr<R>& n, ValueMap<R>& memo) {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;

    NodeValues<R> out;
    if (const auto* l = std::get_if<LeafNode>(&n->v)) {
        if (l->output == Outcome::zero) {
            out.p00 = R(1);
            out.force_a0 = R(1);
            out.force_b0 = R(1);
        } else if (l->output == Outcome::one) {
            out.p11 = R(1);
            out.force_a1 = R(1);
            out.force_b1 = R(1);
        }
    } else if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
        std::vector<NodeValues<R>> child;
        child.reserve(s->branches.size());
        for (const auto& b : s->branches) child.push_back(node_values(b.child, memo));
        for (std::size_t i = 0; i < child.size(); ++i) {
            const R& r = s->branches[i].prob.value();
            out.p00 += r * child[i].p00;
            out.p11 += r * child[i].p11;
        }
        auto weighted = [&](R NodeValues<R>::*field) {
            R acc(0);
            for (std::size_t i = 0; i < child.size(); ++i)
                acc += s->branches[i].prob.value() * (child[i].*field);
            return acc;
        };
        auto best = [&](R NodeValues<R>::*field) {
            R acc = child[0].*field;
            for (std::size_t i = 1; i < child.size(); ++i)
                if (improves(acc, child[i].*field)) acc = child[i].*field;
            return acc;
        };
        if (s->sender == Party::alice) {
            out.force_a0 = best(&NodeValues<R>::force_a0);
            out.force_a1 = best(&NodeValues<R>::force_a1);
            out.force_b0 = weighted(&NodeValues<R>::force_b0);
            out.force_b1 = weighted(&NodeValues<R>::force_b1);
        } else {
            out.force_a0 = weighted(&NodeValues<R>::force_a0);
            out.force_a1 = weighted(&NodeValues<R>::force_a1);
            out.force_b0 = best(&NodeValues<R>::force_b0);
            out.force_b1 = best(&NodeValues<R>::force_b1);
        }
    } else {
        const auto& w = std::get<WcfNode<R>>(n->v);
        NodeValues<R> a = node_values(w.alice_wins, memo);
        NodeValues<R> b = node_values(w.bob_wins, memo);
        const R& z = w.spec.z.value();
        out.p00 = R(z * a.p00) + R((R(1) - z) * b.p00);
        out.p11 = R(z * a.p11) + R((R(1) - z) * b.p11);
        auto pick = [&](const R& q_lo, const R& q_hi, const R& va, const R& vb) {
            R lo = R(q_lo * va) + R((R(1) - q_lo) * vb);
            R hi = R(q_hi * va) + R((R(1) - q_hi) * vb);
            return improves(lo, hi) ? hi : lo;
        };
        const R a_cap = w.spec.alice_cap();
        const R b_floor = w.spec.bob_floor();
        out.force_a0 = pick(R(0), a_cap, a.force_a0, b.force_a0);
        out.force_a1 = pick(R(0), a_cap, a.force_a1, b.force_a1);
        out.force_b0 = pick(b_floor, R(1), a.force_b0, b.force_b0);
        out.force_b1 = pick(b_floor, R(1), a.force_b1, b.force_b1);
    }
    memo.emplace(n.get(), out);
    return out;
}

template <typename R>
void require_well_formed(const ProtocolTree<R>& tree) {
    TreeReport report = validate_tree(tree);
    if (report.ok()) return;
    std::string msg = "malformed tree:";
    for (const auto& d : report.defects) msg += " " + d + ";";
    throw MalformedTree(msg);
}

template <typename R>
AnalysisResult<R> to_result(const NodeValues<R>& v) {
    Prob<R> p00(v.p00);
    Prob<R> p11(v.p11);
    Prob<R> ab(R(R(1) - p00.value()) - p11.value());
    return AnalysisResult<R>{p00,
                             p11,
                             ab,
                             Prob<R>(v.force_a0),
                             Prob<R>(v.force_a1),
                             Prob<R>(v.force_b0),
                             Prob<R>(v.force_b1)};
}

} // namespace detail

/// Exact analysis of a protocol tree. Throws MalformedTree if the tree
/// fails validate_tree.
template <typename R>
AnalysisResult<R> analyze(const ProtocolTree<R>& tree) {
    detail::require_well_formed(tree);
    ValueMap<R> memo;
    return detail::to_result(detail::node_values(tree.root, memo));
}

/// Analysis values for every node of the tree, keyed by node identity.
/// Used to extract optimal adversary strategies.
template <typename R>
ValueMap<R> analyze_all(const ProtocolTree<R>& tree) {
    detail::require_well_formed(tree);
    ValueMap<R> memo;
    detail::node_values(tree.root, memo);
    return memo;
}

/// One checked condition of an implementation report.
template <typename R>
struct ImplementsCheck {
    std::string name;
    R actual;
    R bound;
    bool equality;  // honest rates must match; forcing values must stay below
    bool ok;
};

template <typename R>
struct ImplementsReport {
    bool pass = false;
    std::vector<ImplementsCheck<R>> checks;
};

/// Does the tree implement the spec? Honest rates must equal the spec's
/// within tol; each forcing value must stay below its cap plus tol.
template <typename R>
ImplementsReport<R> verify_implements(const ProtocolTree<R>& tree, const CoinFlipSpec<R>& spec,
                                      const R& tol) {
    AnalysisResult<R> r = analyze(tree);
    ImplementsReport<R> report;
    auto eq = [&](const char* name, const R& actual, const R& want) {
        R d = actual - want;
        if (d < R(0)) d = -d;
        report.checks.push_back(ImplementsCheck<R>{name, actual, want, true, d <= tol});
    };
    auto le = [&](const char* name, const R& actual, const R& cap) {
        report.checks.push_back(ImplementsCheck<R>{name, actual, cap, false, actual <= cap + tol});
    };
    eq("p00", r.p00, spec.p00);
    eq("p11", r.p11, spec.p11);
    le("force_a0 <= ps0", r.force_a0, spec.ps0);
    le("force_a1 <= ps1", r.force_a1, spec.ps1);
    le("force_b0 <= p0s", r.force_b0, spec.p0s);
    le("force_b1 <= p1s", r.force_b1, spec.p1s);
    report.pass = true;
    for (const auto& c : report.checks) report.pass = report.pass && c.ok;
    return report;
}

} // namespace coinflip
