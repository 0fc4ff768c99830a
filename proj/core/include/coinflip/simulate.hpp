#pragma once

// Seeded Monte-Carlo execution of protocol trees, honest or scripted, for
// statistical cross-checks of the exact analyzer.
//
// Randomness is a counter-based splitmix64 stream: trial t of master seed
// s starts from state mix64(s ^ mix64(t + GAMMA)) and each draw advances
// the state by the splitmix64 increment GAMMA = 0x9E3779B97F4A7C15 before
// mixing. Results are therefore bit-reproducible across platforms and
// independent of trial execution order. Branch sampling compares the
// draw's unit-interval value against cumulative branch probabilities --
// exactly in rational mode (u / 2^64 as a rational), with 53-bit
// resolution in floating mode.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <coinflip/analyze.hpp>
#include <coinflip/tree.hpp>

namespace coinflip {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

} // namespace detail

/// Deterministic 64-bit random stream for one trial of one master seed.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t trial)
        : state_(detail::mix64(seed ^ detail::mix64(trial + detail::kGamma))) {}

    std::uint64_t next_bits() {
        state_ += detail::kGamma;
        return detail::mix64(state_);
    }

private:
    std::uint64_t state_;
};

namespace detail {

template <typename R>
struct unit_draw;

template <>
struct unit_draw<mpq_class> {
    // bits / 2^64, exact.
    static mpq_class get(std::uint64_t bits) {
        mpq_class q(mpz_class(static_cast<unsigned long>(bits)), mpz_class(1) << 64);
        q.canonicalize();
        return q;
    }
};

template <>
struct unit_draw<double> {
    static double get(std::uint64_t bits) {
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
};

// One honest run; the returned leaf output is the common output.
template <typename R>
Outcome walk_honest(const NodePtr<R>& root, RandomStream& rng) {
    const Node<R>* cur = root.get();
    for (;;) {
        if (const auto* l = std::get_if<LeafNode>(&cur->v)) return l->output;
        if (const auto* s = std::get_if<SendNode<R>>(&cur->v)) {
            R u = unit_draw<R>::get(rng.next_bits());
            // Cumulative inversion; the last branch absorbs any floating
            // shortfall of the branch sum.
            const Node<R>* next = s->branches.back().child.get();
            R acc(0);
            for (const auto& b : s->branches) {
                acc += b.prob.value();
                if (u < acc) {
                    next = b.child.get();
                    break;
                }
            }
            cur = next;
            continue;
        }
        const auto& w = std::get<WcfNode<R>>(cur->v);
        R u = unit_draw<R>::get(rng.next_bits());
        cur = u < w.spec.z.value() ? w.alice_wins.get() : w.bob_wins.get();
    }
}

} // namespace detail

/// One honest protocol run. Both parties sample their send nodes by the
/// honest probabilities and every resource node falls per (z, 1-z).
/// Deterministic given the seed. Throws MalformedTree on an invalid tree.
template <typename R>
Outcome run_honest(const ProtocolTree<R>& tree, std::uint64_t seed) {
    detail::require_well_formed(tree);
    RandomStream rng(seed, 0);
    return detail::walk_honest<R>(tree.root, rng);
}

/// Outcome counts of a batch of runs.
struct EmpiricalDistribution {
    std::uint64_t zero = 0;
    std::uint64_t one = 0;
    std::uint64_t abort = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

/// Honest outcome counts over `trials` independent runs with per-trial
/// streams derived from `seed`.
template <typename R>
EmpiricalDistribution estimate_honest(const ProtocolTree<R>& tree, std::uint64_t trials,
                                      std::uint64_t seed) {
    if (trials < 1) throw PreconditionViolation("estimate_honest needs trials >= 1");
    detail::require_well_formed(tree);
    EmpiricalDistribution d;
    d.trials = trials;
    d.seed = seed;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomStream rng(seed, t);
        switch (detail::walk_honest<R>(tree.root, rng)) {
            case Outcome::zero: ++d.zero; break;
            case Outcome::one: ++d.one; break;
            default: ++d.abort; break;
        }
    }
    return d;
}

/// Deterministic cheating strategy, keyed by tree position. Paths are the
/// branch-index sequences from the root that validate_tree reports (a
/// WcfNode's children are 0 = alice_wins, 1 = bob_wins).
///
/// At the scripted party's own send nodes, `sends` names the message to
/// send; a reachable own send node without an entry is a script mismatch.
/// At resource nodes, `wcf_bias` fixes Pr[Alice wins] within the party's
/// steerable interval; a resource node without an entry is played honestly
/// (bias z). The other party's send nodes are always sampled honestly.
template <typename R>
struct AdversaryScript {
    Party party = Party::alice;
    std::map<std::vector<int>, std::string> sends;
    std::map<std::vector<int>, Prob<R>> wcf_bias;
};

namespace detail {

template <typename R>
Outcome walk_scripted(const NodePtr<R>& root, const AdversaryScript<R>& script,
                      RandomStream& rng) {
    const Node<R>* cur = root.get();
    std::vector<int> path;
    for (;;) {
        if (const auto* l = std::get_if<LeafNode>(&cur->v)) return l->output;
        if (const auto* s = std::get_if<SendNode<R>>(&cur->v)) {
            std::size_t pick;
            if (s->sender == script.party) {
                auto it = script.sends.find(path);
                if (it == script.sends.end())
                    throw ScriptMismatch("script has no message choice at node path " +
                                         path_to_string(path));
                pick = s->branches.size();
                for (std::size_t i = 0; i < s->branches.size(); ++i)
                    if (s->branches[i].msg == it->second) {
                        pick = i;
                        break;
                    }
                if (pick == s->branches.size())
                    throw ScriptMismatch("script message '" + it->second +
                                         "' is not a branch at node path " +
                                         path_to_string(path));
            } else {
                R u = unit_draw<R>::get(rng.next_bits());
                pick = s->branches.size() - 1;
                R acc(0);
                for (std::size_t i = 0; i < s->branches.size(); ++i) {
                    acc += s->branches[i].prob.value();
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
            }
            path.push_back(static_cast<int>(pick));
            cur = s->branches[pick].child.get();
            continue;
        }
        const auto& w = std::get<WcfNode<R>>(cur->v);
        R q = w.spec.z.value();
        auto it = script.wcf_bias.find(path);
        if (it != script.wcf_bias.end()) {
            q = it->second.value();
            R lo = script.party == Party::alice ? R(0) : w.spec.bob_floor();
            R hi = script.party == Party::alice ? w.spec.alice_cap() : R(1);
            if (!geq<R>(q, lo) || !leq<R>(q, hi))
                throw ScriptMismatch("scripted bias " + arith<R>::str(q) +
                                     " is outside the steerable interval at node path " +
                                     path_to_string(path));
        }
        R u = unit_draw<R>::get(rng.next_bits());
        int side = u < q ? 0 : 1;
        path.push_back(side);
        cur = side == 0 ? w.alice_wins.get() : w.bob_wins.get();
    }
}

} // namespace detail

/// Outcome counts of the honest party's output over `trials` runs against
/// the scripted adversary. Throws ScriptMismatch when a reachable send
/// node of the scripted party has no decision (or a decision that is not
/// a branch, or an out-of-interval bias).
template <typename R>
EmpiricalDistribution run_adversarial(const ProtocolTree<R>& tree, const AdversaryScript<R>& script,
                                      std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw PreconditionViolation("run_adversarial needs trials >= 1");
    detail::require_well_formed(tree);
    EmpiricalDistribution d;
    d.trials = trials;
    d.seed = seed;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomStream rng(seed, t);
        switch (detail::walk_scripted<R>(tree.root, script, rng)) {
            case Outcome::zero: ++d.zero; break;
            case Outcome::one: ++d.one; break;
            default: ++d.abort; break;
        }
    }
    return d;
}

/// Optimal deterministic script for forcing `value`, read off the
/// analyzer's argmax choices. Running it reproduces the analyzer's
/// forcing probability in expectation.
template <typename R>
AdversaryScript<R> extract_optimal_script(const ProtocolTree<R>& tree, Party party,
                                          Outcome value) {
    if (value == Outcome::abort)
        throw PreconditionViolation("extract_optimal_script targets an output value, not abort");
    ValueMap<R> values = analyze_all(tree);
    R NodeValues<R>::*field =
        party == Party::alice
            ? (value == Outcome::zero ? &NodeValues<R>::force_a0 : &NodeValues<R>::force_a1)
            : (value == Outcome::zero ? &NodeValues<R>::force_b0 : &NodeValues<R>::force_b1);
    AdversaryScript<R> script;
    script.party = party;
    std::vector<int> path;
    auto visit = [&](auto&& self, const NodePtr<R>& n) -> void {
        if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
            if (s->sender == party) {
                std::size_t best = 0;
                for (std::size_t i = 1; i < s->branches.size(); ++i)
                    if (detail::improves(values.at(s->branches[best].child.get()).*field,
                                         values.at(s->branches[i].child.get()).*field))
                        best = i;
                script.sends[path] = s->branches[best].msg;
                path.push_back(static_cast<int>(best));
                self(self, s->branches[best].child);
                path.pop_back();
            } else {
                for (std::size_t i = 0; i < s->branches.size(); ++i) {
                    path.push_back(static_cast<int>(i));
                    self(self, s->branches[i].child);
                    path.pop_back();
                }
            }
            return;
        }
        if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            const R& va = values.at(w->alice_wins.get()).*field;
            const R& vb = values.at(w->bob_wins.get()).*field;
            R lo = party == Party::alice ? R(0) : w->spec.bob_floor();
            R hi = party == Party::alice ? w->spec.alice_cap() : R(1);
            R at_lo = R(lo * va) + R((R(1) - lo) * vb);
            R at_hi = R(hi * va) + R((R(1) - hi) * vb);
            script.wcf_bias.emplace(path, Prob<R>(detail::improves(at_lo, at_hi) ? hi : lo));
            path.push_back(0);
            self(self, w->alice_wins);
            path.pop_back();
            path.push_back(1);
            self(self, w->bob_wins);
            path.pop_back();
        }
    };
    visit(visit, tree.root);
    return script;
}

} // namespace coinflip
