#pragma once

// Finite extensive-form protocol trees. Three node kinds:
//
//   SendNode  - one party announces a message drawn from a finite alphabet;
//               every listed branch is a legal message, so a cheating sender
//               may pick any of them regardless of the honest probabilities.
//   WcfNode   - an ideal unbalanced weak coin flip resource; the alice_wins
//               child is taken when the resource outputs 0.
//   LeafNode  - the protocol ends with a common output.
//
// Nodes are immutable and held by shared_ptr, so subtrees may be shared;
// rewrites preserve sharing. All construction goes bottom-up, which keeps
// every tree finite.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <coinflip/types.hpp>

namespace coinflip {

template <typename R>
struct Node;

template <typename R>
using NodePtr = std::shared_ptr<const Node<R>>;

template <typename R>
struct Branch {
    std::string msg;  // message label, unique among siblings
    Prob<R> prob;     // honest probability of sending msg
    NodePtr<R> child;
};

template <typename R>
struct SendNode {
    Party sender;
    std::vector<Branch<R>> branches;
};

template <typename R>
struct WcfNode {
    WcfSpec<R> spec;
    NodePtr<R> alice_wins;
    NodePtr<R> bob_wins;
};

struct LeafNode {
    Outcome output;
};

template <typename R>
struct Node {
    std::variant<SendNode<R>, WcfNode<R>, LeafNode> v;
};

template <typename R>
struct ProtocolTree {
    NodePtr<R> root;
};

// ---- construction helpers ----

template <typename R>
NodePtr<R> leaf(Outcome o) {
    return std::make_shared<const Node<R>>(Node<R>{LeafNode{o}});
}

template <typename R>
NodePtr<R> send(Party sender, std::vector<Branch<R>> branches) {
    return std::make_shared<const Node<R>>(Node<R>{SendNode<R>{sender, std::move(branches)}});
}

template <typename R>
NodePtr<R> wcf(Prob<R> z, Prob<R> eps, NodePtr<R> alice_wins, NodePtr<R> bob_wins) {
    return std::make_shared<const Node<R>>(
        Node<R>{WcfNode<R>{WcfSpec<R>{z, eps}, std::move(alice_wins), std::move(bob_wins)}});
}

// ---- well-formedness ----

inline std::string path_to_string(const std::vector<int>& path) {
    std::string s = "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(path[i]);
    }
    return s + "]";
}

struct TreeReport {
    std::vector<std::string> defects;
    bool ok() const { return defects.empty(); }
};

/// Checks per-node probability sums, label uniqueness, and arity. Shared
/// subtrees are checked once, at their first-seen path.
template <typename R>
TreeReport validate_tree(const ProtocolTree<R>& tree) {
    TreeReport report;
    if (!tree.root) {
        report.defects.push_back("tree has no root");
        return report;
    }
    std::set<const Node<R>*> seen;
    std::vector<int> path;
    auto visit = [&](auto&& self, const NodePtr<R>& n) -> void {
        if (!n) {
            report.defects.push_back("missing child at node path " + path_to_string(path));
            return;
        }
        if (!seen.insert(n.get()).second) return;
        if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
            if (s->branches.empty()) {
                report.defects.push_back("send node with no branches at node path " +
                                         path_to_string(path));
                return;
            }
            R sum(0);
            std::set<std::string> labels;
            for (const auto& b : s->branches) {
                sum += b.prob.value();
                if (!labels.insert(b.msg).second)
                    report.defects.push_back("duplicate message label '" + b.msg +
                                             "' at node path " + path_to_string(path));
            }
            if (!approx_eq<R>(sum, R(1)))
                report.defects.push_back("branch sum " + arith<R>::str(sum) +
                                         " at node path " + path_to_string(path));
            for (std::size_t i = 0; i < s->branches.size(); ++i) {
                path.push_back(static_cast<int>(i));
                self(self, s->branches[i].child);
                path.pop_back();
            }
        } else if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            path.push_back(0);
            self(self, w->alice_wins);
            path.pop_back();
            path.push_back(1);
            self(self, w->bob_wins);
            path.pop_back();
        }
    };
    visit(visit, tree.root);
    return report;
}

// ---- structural utilities ----

template <typename R>
std::size_t count_nodes(const ProtocolTree<R>& tree) {
    std::set<const Node<R>*> seen;
    auto visit = [&](auto&& self, const NodePtr<R>& n) -> void {
        if (!n || !seen.insert(n.get()).second) return;
        if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
            for (const auto& b : s->branches) self(self, b.child);
        } else if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            self(self, w->alice_wins);
            self(self, w->bob_wins);
        }
    };
    visit(visit, tree.root);
    return seen.size();
}

template <typename R>
std::size_t count_wcf_nodes(const ProtocolTree<R>& tree) {
    std::set<const Node<R>*> seen;
    std::size_t count = 0;
    auto visit = [&](auto&& self, const NodePtr<R>& n) -> void {
        if (!n || !seen.insert(n.get()).second) return;
        if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
            for (const auto& b : s->branches) self(self, b.child);
        } else if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            ++count;
            self(self, w->alice_wins);
            self(self, w->bob_wins);
        }
    };
    visit(visit, tree.root);
    return count;
}

template <typename R>
bool structurally_equal(const NodePtr<R>& a, const NodePtr<R>& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->v.index() != b->v.index()) return false;
    if (const auto* sa = std::get_if<SendNode<R>>(&a->v)) {
        const auto& sb = std::get<SendNode<R>>(b->v);
        if (sa->sender != sb.sender || sa->branches.size() != sb.branches.size()) return false;
        for (std::size_t i = 0; i < sa->branches.size(); ++i) {
            const auto& ba = sa->branches[i];
            const auto& bb = sb.branches[i];
            if (ba.msg != bb.msg || !(ba.prob.value() == bb.prob.value())) return false;
            if (!structurally_equal(ba.child, bb.child)) return false;
        }
        return true;
    }
    if (const auto* wa = std::get_if<WcfNode<R>>(&a->v)) {
        const auto& wb = std::get<WcfNode<R>>(b->v);
        if (!(wa->spec.z.value() == wb.spec.z.value())) return false;
        if (!(wa->spec.eps.value() == wb.spec.eps.value())) return false;
        return structurally_equal(wa->alice_wins, wb.alice_wins) &&
               structurally_equal(wa->bob_wins, wb.bob_wins);
    }
    return std::get<LeafNode>(a->v).output == std::get<LeafNode>(b->v).output;
}

template <typename R>
bool structurally_equal(const ProtocolTree<R>& a, const ProtocolTree<R>& b) {
    return structurally_equal(a.root, b.root);
}

/// Rebuilds a tree through a node-level transform, preserving subtree
/// sharing. The transform receives the already-rewritten node and may
/// return it unchanged.
template <typename R, typename F>
NodePtr<R> rewrite(const NodePtr<R>& root, F&& transform) {
    std::unordered_map<const Node<R>*, NodePtr<R>> memo;
    auto visit = [&](auto&& self, const NodePtr<R>& n) -> NodePtr<R> {
        auto it = memo.find(n.get());
        if (it != memo.end()) return it->second;
        NodePtr<R> rebuilt;
        if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
            std::vector<Branch<R>> branches;
            branches.reserve(s->branches.size());
            bool changed = false;
            for (const auto& b : s->branches) {
                NodePtr<R> c = self(self, b.child);
                changed = changed || c.get() != b.child.get();
                branches.push_back(Branch<R>{b.msg, b.prob, std::move(c)});
            }
            rebuilt = changed ? send<R>(s->sender, std::move(branches)) : n;
        } else if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            NodePtr<R> aw = self(self, w->alice_wins);
            NodePtr<R> bw = self(self, w->bob_wins);
            rebuilt = (aw.get() != w->alice_wins.get() || bw.get() != w->bob_wins.get())
                          ? wcf<R>(w->spec.z, w->spec.eps, std::move(aw), std::move(bw))
                          : n;
        } else {
            rebuilt = n;
        }
        NodePtr<R> out = transform(rebuilt);
        memo.emplace(n.get(), out);
        return out;
    };
    return visit(visit, root);
}

/// Party relabeling (Alice <-> Bob). Senders flip; a resource in which the
/// relabeled Alice wins with probability z becomes one in which she wins
/// with probability 1 - z, with the win children swapped. Leaf outputs are
/// untouched.
template <typename R>
ProtocolTree<R> swap_parties(const ProtocolTree<R>& tree) {
    NodePtr<R> root = rewrite<R>(tree.root, [](const NodePtr<R>& n) -> NodePtr<R> {
        if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
            auto branches = s->branches;
            return send<R>(other(s->sender), std::move(branches));
        }
        if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            Prob<R> z(R(1) - w->spec.z.value());
            return wcf<R>(z, w->spec.eps, w->bob_wins, w->alice_wins);
        }
        return n;
    });
    return ProtocolTree<R>{root};
}

/// Output relabeling (0 <-> 1) on leaves; node structure is untouched.
template <typename R>
ProtocolTree<R> flip_outputs(const ProtocolTree<R>& tree) {
    NodePtr<R> root = rewrite<R>(tree.root, [](const NodePtr<R>& n) -> NodePtr<R> {
        if (const auto* l = std::get_if<LeafNode>(&n->v)) {
            if (l->output == Outcome::zero) return leaf<R>(Outcome::one);
            if (l->output == Outcome::one) return leaf<R>(Outcome::zero);
        }
        return n;
    });
    return ProtocolTree<R>{root};
}

} // namespace coinflip
