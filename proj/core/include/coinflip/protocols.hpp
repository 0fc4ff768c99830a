#pragma once

// Protocol constructions: explicit game trees realizing any feasible
// coin-flip spec.
//
// Classical setting: when one party's two cheating caps sum to at most 1,
// a two-round announce-and-echo protocol (build_coinflip1) reaches the
// product rates and dilution lowers them to the target. Otherwise the
// three-round protocol (build_coinflip2) realizes any spec whose honest
// rates sit exactly on the classical trade-off boundary; synthesis raises
// the targets to the boundary, builds, and dilutes back down.
//
// Quantum-resource setting: protocols may consume ideal unbalanced weak
// coin flips (WcfNode). build_qcoinflip1 realizes specs with
// p0s*ps0 + p1s*ps1 = 1 and no aborts; build_qcoinflip2 wraps it with
// veto rounds to cover p0s*ps0 + p1s*ps1 < 1. build_unbalanced_wcf and
// shift_wcf realize the resource itself from balanced eps-biased flips.
//
// All builders are pure and safe for concurrent use.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <coinflip/analyze.hpp>
#include <coinflip/bounds.hpp>
#include <coinflip/tree.hpp>

namespace coinflip {

/// Two-round protocol for caps with p0s + p1s <= 1: Alice draws
/// a in {0, 1, abort} with probabilities (p0s, p1s, rest) and announces it;
/// Bob keeps an announced value with probability ps_a and otherwise aborts.
/// Implements CF(p0s*ps0, p1s*ps1, p0s, p1s, ps0, ps1). All three of
/// Alice's messages stay in the tree even at probability 0 -- they remain
/// legal messages for a cheating Alice.
template <typename R>
ProtocolTree<R> build_coinflip1(const R& p0s, const R& p1s, const R& ps0, const R& ps1) {
    Prob<R> a0(p0s), a1(p1s), b0(ps0), b1(ps1);
    if (!leq<R>(R(a0.value() + a1.value()), R(1)))
        throw PreconditionViolation("build_coinflip1 needs p0s + p1s <= 1, got " +
                                    arith<R>::str(a0.value()) + " + " +
                                    arith<R>::str(a1.value()));
    auto echo = [](Outcome a, const Prob<R>& keep) {
        return send<R>(Party::bob,
                       {Branch<R>{to_string(a), keep, leaf<R>(a)},
                        Branch<R>{"abort", Prob<R>(R(R(1) - keep.value())),
                                  leaf<R>(Outcome::abort)}});
    };
    Prob<R> rest(R(R(R(1) - a0.value()) - a1.value()));
    return ProtocolTree<R>{send<R>(Party::alice,
                                   {Branch<R>{"0", a0, echo(Outcome::zero, b0)},
                                    Branch<R>{"1", a1, echo(Outcome::one, b1)},
                                    Branch<R>{"abort", rest, leaf<R>(Outcome::abort)}})};
}

/// Parameters of the three-round boundary protocol.
///
/// y0 is undefined exactly when p = 1 (Alice never opens with 1, so no
/// disagreement at 0 can arise); y1 is undefined exactly when p = 0.
template <typename R>
struct CoinFlip2Params {
    Prob<R> p;                      // Pr[Alice's opening message is 0]
    Prob<R> x0, x1;                 // Pr[Bob repeats Alice's value a] = x_a
    std::optional<Prob<R>> y0, y1;  // Pr[Alice accepts disagreeing value b] = y_b
};

/// Closed-form parameters realizing a spec whose honest rates lie exactly
/// on the classical boundary and within the product caps, with both cheat
/// sums above 1.
template <typename R>
CoinFlip2Params<R> coinflip2_params(const CoinFlipSpec<R>& s) {
    const R one(1);
    auto fail = [](const std::string& what) {
        throw PreconditionViolation("coinflip2_params " + what);
    };
    if (!(R(s.p0s.value() + s.p1s.value()) > one))
        fail("needs p0s + p1s > 1, got " + arith<R>::str(R(s.p0s.value() + s.p1s.value())));
    if (!(R(s.ps0.value() + s.ps1.value()) > one))
        fail("needs ps0 + ps1 > 1, got " + arith<R>::str(R(s.ps0.value() + s.ps1.value())));
    if (!leq<R>(s.p00.value(), R(s.p0s.value() * s.ps0.value())))
        fail("needs p00 <= p0s*ps0, got " + arith<R>::str(s.p00.value()) + " > " +
             arith<R>::str(R(s.p0s.value() * s.ps0.value())));
    if (!leq<R>(s.p11.value(), R(s.p1s.value() * s.ps1.value())))
        fail("needs p11 <= p1s*ps1, got " + arith<R>::str(s.p11.value()) + " > " +
             arith<R>::str(R(s.p1s.value() * s.ps1.value())));
    R sum = R(s.p00.value() + s.p11.value());
    R boundary = classical_bound_rhs<R>(s.p0s, s.p1s, s.ps0, s.ps1);
    if (!approx_eq<R>(sum, boundary))
        fail("needs p00 + p11 on the trade-off boundary: got " + arith<R>::str(sum) +
             ", boundary " + arith<R>::str(boundary));

    R denom = R(R(s.ps0.value() + s.ps1.value()) - one);
    R p = R(R(R(s.p00.value() - s.p0s.value()) + R(s.p0s.value() * s.ps1.value())) / denom);
    // The preconditions place p in [1 - p1s, p0s]; clamping only ever
    // absorbs rounding noise in floating mode.
    R lo = R(one - s.p1s.value());
    if (p < lo) p = lo;
    if (p > s.p0s.value()) p = s.p0s.value();

    CoinFlip2Params<R> out;
    out.p = Prob<R>(p);
    out.x0 = s.ps0;
    out.x1 = s.ps1;
    if (!approx_eq<R>(p, one)) out.y0 = Prob<R>(R(R(s.p0s.value() - p) / R(one - p)));
    if (!approx_eq<R>(p, R(0))) out.y1 = Prob<R>(R(R(R(s.p1s.value() + p) - one) / p));
    return out;
}

/// Three-round tree: Alice opens with a (probabilities p, 1-p); Bob either
/// repeats a (probability x_a, ending with output a) or replies the other
/// value b; on disagreement Alice accepts b with probability y_b or aborts.
/// Opening messages of probability 0 are omitted -- their resolution
/// probability is undefined, so they are not part of the protocol.
template <typename R>
ProtocolTree<R> build_coinflip2(const CoinFlip2Params<R>& params) {
    auto resolution = [](Outcome b, const Prob<R>& yb) {
        return send<R>(Party::alice,
                       {Branch<R>{to_string(b), yb, leaf<R>(b)},
                        Branch<R>{"abort", Prob<R>(R(R(1) - yb.value())),
                                  leaf<R>(Outcome::abort)}});
    };
    auto reply = [&](Outcome a, const Prob<R>& xa,
                     const std::optional<Prob<R>>& y_other) -> NodePtr<R> {
        Outcome o = a == Outcome::zero ? Outcome::one : Outcome::zero;
        if (!y_other)
            throw PreconditionViolation(
                "build_coinflip2 params lack the resolution probability for a "
                "reachable disagreement");
        return send<R>(Party::bob,
                       {Branch<R>{to_string(a), xa, leaf<R>(a)},
                        Branch<R>{to_string(o), Prob<R>(R(R(1) - xa.value())),
                                  resolution(o, *y_other)}});
    };
    const R& p = params.p.value();
    std::vector<Branch<R>> opening;
    if (!approx_eq<R>(p, R(0)))
        opening.push_back(Branch<R>{"0", params.p, reply(Outcome::zero, params.x0, params.y1)});
    if (!approx_eq<R>(p, R(1)))
        opening.push_back(
            Branch<R>{"1", Prob<R>(R(R(1) - p)), reply(Outcome::one, params.x1, params.y0)});
    return ProtocolTree<R>{send<R>(Party::alice, std::move(opening))};
}

/// Lower the honest output rates of a tree without raising any forcing
/// value: every value-i leaf gains a final announcement in which Alice
/// keeps i with probability target_pii / from.pii and otherwise aborts.
/// `from` must be the tree's analysis. A rate currently at 0 must stay at
/// 0 and its leaves are left untouched; a keep probability of 1 adds no
/// announcement.
template <typename R>
ProtocolTree<R> dilute(const ProtocolTree<R>& tree, const AnalysisResult<R>& from,
                       const R& target_p00, const R& target_p11) {
    Prob<R> t00(target_p00), t11(target_p11);
    if (!leq<R>(t00.value(), from.p00.value()))
        throw PreconditionViolation("dilute target p00 = " + arith<R>::str(t00.value()) +
                                    " exceeds current value " + arith<R>::str(from.p00.value()));
    if (!leq<R>(t11.value(), from.p11.value()))
        throw PreconditionViolation("dilute target p11 = " + arith<R>::str(t11.value()) +
                                    " exceeds current value " + arith<R>::str(from.p11.value()));
    auto keep_prob = [](const Prob<R>& target, const Prob<R>& current) -> std::optional<Prob<R>> {
        if (current.value() == R(0)) return std::nullopt;  // rate already 0, leaves untouched
        R ratio = R(target.value() / current.value());
        if (ratio > R(1)) ratio = R(1);  // floating noise when target == current
        if (approx_eq<R>(ratio, R(1))) return std::nullopt;
        return Prob<R>(ratio);
    };
    std::optional<Prob<R>> k0 = keep_prob(t00, from.p00);
    std::optional<Prob<R>> k1 = keep_prob(t11, from.p11);
    if (!k0 && !k1) return tree;
    NodePtr<R> root = rewrite<R>(tree.root, [&](const NodePtr<R>& n) -> NodePtr<R> {
        const auto* l = std::get_if<LeafNode>(&n->v);
        if (!l || l->output == Outcome::abort) return n;
        const std::optional<Prob<R>>& k = l->output == Outcome::zero ? k0 : k1;
        if (!k) return n;
        return send<R>(Party::alice,
                       {Branch<R>{to_string(l->output), *k, n},
                        Branch<R>{"abort", Prob<R>(R(R(1) - k->value())),
                                  leaf<R>(Outcome::abort)}});
    });
    return ProtocolTree<R>{root};
}

/// Unbalanced weak coin flip from k balanced eps-biased ones. With
/// b1..bk the bits of z's k-bit truncation x (so |x - z| <= 2^-k, and
/// z = 1 truncates to 1 - 2^-k), round i flips a balanced coin: when
/// b_i = 1 an Alice win ends the protocol with Alice winning (output 0)
/// and a Bob win moves to round i+1; when b_i = 0 a Bob win ends with Bob
/// winning (output 1) and an Alice win moves on; exhausting all k rounds
/// is a Bob win. At eps = 0 the analysis is exactly CF(x, 1-x, 1, 1-x, x, 1);
/// each eps-biased round costs a cheater at most 2*eps in total.
template <typename R>
ProtocolTree<R> build_unbalanced_wcf(const R& z, unsigned k, const R& eps) {
    Prob<R> zp(z), ep(eps);
    if (k < 1) throw PreconditionViolation("build_unbalanced_wcf needs k >= 1");
    // Binary expansion by doubling; exact in both arithmetic modes.
    std::vector<bool> bits(k);
    R r = zp.value();
    for (unsigned i = 0; i < k; ++i) {
        r = R(r + r);
        if (r >= R(1)) {
            bits[i] = true;
            r = R(r - R(1));
        }
    }
    Prob<R> half(arith<R>::ratio(1, 2));
    NodePtr<R> node = leaf<R>(Outcome::one);
    for (unsigned i = k; i-- > 0;) {
        node = bits[i] ? wcf<R>(half, ep, leaf<R>(Outcome::zero), std::move(node))
                       : wcf<R>(half, ep, std::move(node), leaf<R>(Outcome::one));
    }
    return ProtocolTree<R>{node};
}

/// Lower the win probability of a weak coin flip resource: run the
/// (z', eps) resource and, when Alice wins, let her keep the win with
/// probability z / z' or concede. Honest Alice-win probability is z; Alice
/// can force 0 with probability at most z + (eps + z' - z), Bob can force
/// 1 with probability at most 1 - z + eps.
template <typename R>
ProtocolTree<R> shift_wcf(const R& z_prime, const R& eps, const R& z) {
    Prob<R> zp(z_prime), ep(eps), zt(z);
    if (!(R(0) < zt.value() && zt.value() < zp.value() && zp.value() < R(1)))
        throw PreconditionViolation("shift_wcf needs 0 < z < z' < 1, got z = " +
                                    arith<R>::str(zt.value()) + ", z' = " +
                                    arith<R>::str(zp.value()));
    Prob<R> keep(R(zt.value() / zp.value()));
    NodePtr<R> on_win =
        send<R>(Party::alice,
                {Branch<R>{"keep", keep, leaf<R>(Outcome::zero)},
                 Branch<R>{"concede", Prob<R>(R(R(1) - keep.value())), leaf<R>(Outcome::one)}});
    return ProtocolTree<R>{wcf<R>(zp, ep, std::move(on_win), leaf<R>(Outcome::one))};
}

/// Parameters of the abort-free resource protocol.
template <typename R>
struct QCoinFlip1Params {
    Prob<R> x;       // Pr[Alice announces 0]
    Prob<R> z0, z1;  // Alice-win probability of the resource run after announcing 0 / 1
    Prob<R> p0, p1;  // Pr[Bob repeats announced value a after winning the resource] = p_a
};

/// Closed-form parameters for caps with both sums above 1 and
/// p0s*ps0 + p1s*ps1 = 1 (the no-abort surface). The built tree then
/// realizes CF(p0s*ps0, p1s*ps1, p0s, p1s, ps0, ps1).
template <typename R>
QCoinFlip1Params<R> qcoinflip1_params(const R& p0s, const R& p1s, const R& ps0, const R& ps1) {
    Prob<R> b0(p0s), b1(p1s), a0(ps0), a1(ps1);
    const R one(1);
    auto fail = [](const std::string& what) {
        throw PreconditionViolation("qcoinflip1_params " + what);
    };
    if (!(R(a0.value() + a1.value()) > one))
        fail("needs ps0 + ps1 > 1, got " + arith<R>::str(R(a0.value() + a1.value())));
    if (!(R(b0.value() + b1.value()) > one))
        fail("needs p0s + p1s > 1, got " + arith<R>::str(R(b0.value() + b1.value())));
    R products = R(R(b0.value() * a0.value()) + R(b1.value() * a1.value()));
    if (!approx_eq<R>(products, one))
        fail("needs p0s*ps0 + p1s*ps1 = 1, got " + arith<R>::str(products));

    R denom = R(R(a0.value() + a1.value()) - one);
    QCoinFlip1Params<R> out;
    out.x = Prob<R>(R(R(R(R(b0.value() * a0.value()) + a1.value()) - one) / denom));
    out.z0 = Prob<R>(R(denom / a1.value()));
    out.z1 = Prob<R>(R(denom / a0.value()));
    out.p0 = Prob<R>(R(one - a1.value()));
    out.p1 = Prob<R>(R(one - a0.value()));
    return out;
}

/// Abort-free tree: Alice announces a (probabilities x, 1-x); the parties
/// run the resource with Alice-win probability z_a; an Alice win outputs a,
/// and on a Bob win Bob repeats a with probability p_a or announces the
/// other value, which becomes the output. Announcements of probability 0
/// are omitted. The resource is embedded with eps = 0; bias substitution
/// is a separate transformation (substitute_wcf_eps).
template <typename R>
ProtocolTree<R> build_qcoinflip1(const QCoinFlip1Params<R>& params) {
    auto arm = [](Outcome a, const Prob<R>& za, const Prob<R>& pa) -> NodePtr<R> {
        Outcome o = a == Outcome::zero ? Outcome::one : Outcome::zero;
        NodePtr<R> reply =
            send<R>(Party::bob,
                    {Branch<R>{to_string(a), pa, leaf<R>(a)},
                     Branch<R>{to_string(o), Prob<R>(R(R(1) - pa.value())), leaf<R>(o)}});
        return wcf<R>(za, Prob<R>(R(0)), leaf<R>(a), std::move(reply));
    };
    const R& x = params.x.value();
    std::vector<Branch<R>> opening;
    if (!approx_eq<R>(x, R(0)))
        opening.push_back(Branch<R>{"0", params.x, arm(Outcome::zero, params.z0, params.p0)});
    if (!approx_eq<R>(x, R(1)))
        opening.push_back(
            Branch<R>{"1", Prob<R>(R(R(1) - x)), arm(Outcome::one, params.z1, params.p1)});
    return ProtocolTree<R>{send<R>(Party::alice, std::move(opening))};
}

/// Parameters of the veto wrapper taking the no-abort surface down to
/// p0s*ps0 + p1s*ps1 < 1.
template <typename R>
struct QCoinFlip2Params {
    Prob<R> p0s_prime;  // raised 0-cap for the inner no-abort protocol
    Prob<R> ps1_prime;  // raised 1-cap for the inner no-abort protocol
    Prob<R> eps0, eps1; // veto probabilities restoring the requested caps
};

/// Closed-form wrapper parameters for a spec with both cheat sums above 1,
/// ps0 + p1s > 1 (relabel the parties first when p0s + ps1 > 1 holds
/// instead), p0s*ps0 + p1s*ps1 <= 1, and honest rates exactly at the
/// product caps. The primed caps satisfy
/// p0s_prime*ps0 + p1s*ps1_prime = 1, p0s_prime >= p0s, ps1_prime >= ps1.
template <typename R>
QCoinFlip2Params<R> qcoinflip2_params(const CoinFlipSpec<R>& s) {
    const R one(1);
    auto fail = [](const std::string& what) {
        throw PreconditionViolation("qcoinflip2_params " + what);
    };
    if (!(R(s.ps0.value() + s.ps1.value()) > one))
        fail("needs ps0 + ps1 > 1, got " + arith<R>::str(R(s.ps0.value() + s.ps1.value())));
    if (!(R(s.p0s.value() + s.p1s.value()) > one))
        fail("needs p0s + p1s > 1, got " + arith<R>::str(R(s.p0s.value() + s.p1s.value())));
    R products = R(R(s.p0s.value() * s.ps0.value()) + R(s.p1s.value() * s.ps1.value()));
    if (!leq<R>(products, one))
        fail("needs p0s*ps0 + p1s*ps1 <= 1, got " + arith<R>::str(products));
    if (!(R(s.ps0.value() + s.p1s.value()) > one))
        fail("needs ps0 + p1s > 1 (relabel the parties first), got " +
             arith<R>::str(R(s.ps0.value() + s.p1s.value())));
    if (!approx_eq<R>(s.p00.value(), R(s.p0s.value() * s.ps0.value())))
        fail("needs target p00 = p0s*ps0, got " + arith<R>::str(s.p00.value()) + " vs " +
             arith<R>::str(R(s.p0s.value() * s.ps0.value())));
    if (!approx_eq<R>(s.p11.value(), R(s.p1s.value() * s.ps1.value())))
        fail("needs target p11 = p1s*ps1, got " + arith<R>::str(s.p11.value()) + " vs " +
             arith<R>::str(R(s.p1s.value() * s.ps1.value())));

    R cand = R(R(one - R(s.p1s.value() * s.ps1.value())) / s.ps0.value());
    R p0sp = cand > one ? one : cand;
    R ps1p = R(R(one - R(p0sp * s.ps0.value())) / s.p1s.value());
    QCoinFlip2Params<R> out;
    out.p0s_prime = Prob<R>(p0sp);
    out.ps1_prime = Prob<R>(ps1p);
    out.eps0 = Prob<R>(R(one - R(s.p0s.value() / p0sp)));
    out.eps1 = Prob<R>(R(one - R(s.ps1.value() / ps1p)));
    return out;
}

/// Veto wrapper: every 0-leaf of the inner tree gains an Alice
/// announcement that aborts with probability eps0, every 1-leaf a Bob
/// announcement that aborts with probability eps1. Abort leaves (if any)
/// are untouched. Scales p00 by 1-eps0 and p11 by 1-eps1, scales the
/// opposite party's forcing values accordingly, and never raises any
/// forcing value.
template <typename R>
ProtocolTree<R> build_qcoinflip2(const ProtocolTree<R>& inner, const R& eps0, const R& eps1) {
    Prob<R> e0(eps0), e1(eps1);
    auto veto = [](Party who, const Prob<R>& eps, const NodePtr<R>& kept) {
        const auto& l = std::get<LeafNode>(kept->v);
        return send<R>(who, {Branch<R>{to_string(l.output), Prob<R>(R(R(1) - eps.value())), kept},
                             Branch<R>{"abort", eps, leaf<R>(Outcome::abort)}});
    };
    NodePtr<R> root = rewrite<R>(inner.root, [&](const NodePtr<R>& n) -> NodePtr<R> {
        const auto* l = std::get_if<LeafNode>(&n->v);
        if (!l) return n;
        if (l->output == Outcome::zero) return veto(Party::alice, e0, n);
        if (l->output == Outcome::one) return veto(Party::bob, e1, n);
        return n;
    });
    return ProtocolTree<R>{root};
}

/// Replace the bias cap of every resource node with eps, keeping z.
/// Degradation law: starting from eps = 0, every forcing value of the
/// analysis grows by at most 2*eps.
template <typename R>
ProtocolTree<R> substitute_wcf_eps(const ProtocolTree<R>& tree, const R& eps) {
    Prob<R> ep(eps);
    NodePtr<R> root = rewrite<R>(tree.root, [&](const NodePtr<R>& n) -> NodePtr<R> {
        if (const auto* w = std::get_if<WcfNode<R>>(&n->v)) {
            if (w->spec.eps.value() == ep.value()) return n;
            return wcf<R>(w->spec.z, ep, w->alice_wins, w->bob_wins);
        }
        return n;
    });
    return ProtocolTree<R>{root};
}

namespace detail {

template <typename R>
ProtocolTree<R> dilute_to_spec(ProtocolTree<R> tree, const CoinFlipSpec<R>& spec) {
    AnalysisResult<R> from = analyze(tree);
    return dilute(tree, from, spec.p00.value(), spec.p11.value());
}

template <typename R>
ProtocolTree<R> synthesize_classical(const CoinFlipSpec<R>& spec) {
    const R one(1);
    if (leq<R>(R(spec.p0s.value() + spec.p1s.value()), one)) {
        ProtocolTree<R> t = build_coinflip1<R>(spec.p0s, spec.p1s, spec.ps0, spec.ps1);
        return dilute_to_spec(std::move(t), spec);
    }
    if (leq<R>(R(spec.ps0.value() + spec.ps1.value()), one)) {
        // The echo protocol needs the announcing party's caps to sum below
        // 1; here only Alice's do, so build with the roles exchanged.
        ProtocolTree<R> t =
            swap_parties(build_coinflip1<R>(spec.ps0, spec.ps1, spec.p0s, spec.p1s));
        return dilute_to_spec(std::move(t), spec);
    }
    // Both cheat sums exceed 1: raise the honest rates proportionally onto
    // the trade-off boundary (clamping each at its product cap), build the
    // boundary protocol, and dilute back down to the requested rates.
    R boundary = classical_bound_rhs<R>(spec.p0s, spec.p1s, spec.ps0, spec.ps1);
    R sum = R(spec.p00.value() + spec.p11.value());
    R cap0 = R(spec.p0s.value() * spec.ps0.value());
    R cap1 = R(spec.p1s.value() * spec.ps1.value());
    R t00(0), t11(0);
    if (sum > R(0)) {
        t00 = R(R(spec.p00.value() * boundary) / sum);
        t11 = R(R(spec.p11.value() * boundary) / sum);
    } else {
        t00 = cap0 < boundary ? cap0 : boundary;
        t11 = R(boundary - t00);
    }
    if (t00 > cap0) {
        t00 = cap0;
        t11 = R(boundary - cap0);
    } else if (t11 > cap1) {
        t11 = cap1;
        t00 = R(boundary - cap1);
    }
    CoinFlipSpec<R> on_boundary =
        make_spec<R>(t00, t11, spec.p0s, spec.p1s, spec.ps0, spec.ps1);
    ProtocolTree<R> t = build_coinflip2(coinflip2_params(on_boundary));
    return dilute_to_spec(std::move(t), spec);
}

template <typename R>
ProtocolTree<R> synthesize_quantum(const CoinFlipSpec<R>& spec) {
    const R one(1);
    if (leq<R>(R(spec.p0s.value() + spec.p1s.value()), one) ||
        leq<R>(R(spec.ps0.value() + spec.ps1.value()), one))
        // With one cheat sum at most 1 the excess term of the classical
        // boundary vanishes, so the product caps cover the honest rates and
        // the classical route applies unchanged.
        return synthesize_classical(spec);

    // Lower Bob's caps to the least values still covering the honest
    // rates; every protocol below reaches them exactly, so no resource
    // budget is wasted on caps the spec does not use.
    R r0s = R(spec.p00.value() / spec.ps0.value());
    R r1s = R(spec.p11.value() / spec.ps1.value());
    if (leq<R>(R(r0s + r1s), one)) {
        ProtocolTree<R> t = build_coinflip1<R>(r0s, r1s, spec.ps0, spec.ps1);
        return dilute_to_spec(std::move(t), spec);
    }
    CoinFlipSpec<R> target =
        make_spec<R>(R(r0s * spec.ps0.value()), R(r1s * spec.ps1.value()), r0s, r1s,
                     spec.ps0, spec.ps1);
    // The veto wrapper needs ps0 + p1s > 1; when it fails, p0s + ps1 > 1
    // is guaranteed instead and relabeling the parties restores it.
    bool swapped = !(R(target.ps0.value() + target.p1s.value()) > one);
    if (swapped) target = swap_parties(target);
    QCoinFlip2Params<R> wrap = qcoinflip2_params(target);
    QCoinFlip1Params<R> inner = qcoinflip1_params<R>(
        wrap.p0s_prime, target.p1s, target.ps0, wrap.ps1_prime);
    ProtocolTree<R> t =
        build_qcoinflip2(build_qcoinflip1(inner), wrap.eps0.value(), wrap.eps1.value());
    if (swapped) t = swap_parties(t);
    return dilute_to_spec(std::move(t), spec);
}

} // namespace detail

/// Build a protocol tree realizing the spec in the given setting. Throws
/// InfeasibleSpec when the setting's feasibility verdict fails. The
/// returned tree's analysis reproduces the honest rates and keeps every
/// forcing value at or below its cap (exactly in rational mode, within the
/// tolerance in floating mode).
template <typename R>
ProtocolTree<R> synthesize(const CoinFlipSpec<R>& spec, Setting setting) {
    FeasibilityVerdict<R> verdict =
        setting == Setting::classical ? classical_feasible(spec) : quantum_feasible(spec);
    if (!verdict.feasible) {
        std::string msg = std::string("no ") + to_string(setting) +
                          " protocol exists: spec violates";
        for (const auto& ineq : verdict.violated)
            msg += " [" + ineq.name + ": " + arith<R>::str(ineq.lhs) + " > " +
                   arith<R>::str(ineq.rhs) + "]";
        throw InfeasibleSpec(msg);
    }
    return setting == Setting::classical ? detail::synthesize_classical(spec)
                                         : detail::synthesize_quantum(spec);
}

} // namespace coinflip
