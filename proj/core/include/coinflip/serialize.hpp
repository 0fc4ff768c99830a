#pragma once

// JSON serialization for protocol trees (the "cf-tree/1" file format),
// analysis results, feasibility verdicts, protocol parameter records,
// adversary scripts, and empirical distributions.
//
// Probabilities serialize per arithmetic mode: rational values emit
// exact "num/den" strings (plain numbers when the denominator is 1),
// floating values emit shortest round-trip numbers. Parsing accepts
// both spellings in either mode; JSON numbers enter rational mode
// through their exact double value.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include <coinflip/analyze.hpp>
#include <coinflip/bounds.hpp>
#include <coinflip/protocols.hpp>
#include <coinflip/simulate.hpp>
#include <coinflip/tree.hpp>

namespace coinflip {

/// Insertion-ordered JSON keeps emitted documents stable.
using Json = nlohmann::ordered_json;

inline constexpr const char* kTreeFormat = "cf-tree/1";

template <typename R>
Json prob_to_json(const R& value) {
    if constexpr (arith<R>::exact) {
        if (value.get_den() == 1) return Json(value.get_num().get_si());
        return Json(arith<R>::str(value));
    } else {
        return Json(value);
    }
}

template <typename R>
R prob_from_json(const Json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return arith<R>::parse(j.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (j.is_number()) return arith<R>::from_double(j.get<double>());
    throw ParseError(where + ": expected a number or \"num/den\" string");
}

namespace detail {

template <typename R>
Json node_to_json(const NodePtr<R>& n) {
    if (const auto* l = std::get_if<LeafNode>(&n->v)) {
        Json j;
        j["kind"] = "leaf";
        j["output"] = to_string(l->output);
        return j;
    }
    if (const auto* s = std::get_if<SendNode<R>>(&n->v)) {
        Json j;
        j["kind"] = "send";
        j["sender"] = to_string(s->sender);
        Json arr = Json::array();
        for (const auto& b : s->branches) {
            Json e;
            e["msg"] = b.msg;
            e["prob"] = prob_to_json<R>(b.prob.value());
            e["child"] = node_to_json<R>(b.child);
            arr.push_back(std::move(e));
        }
        j["branches"] = std::move(arr);
        return j;
    }
    const auto& w = std::get<WcfNode<R>>(n->v);
    Json j;
    j["kind"] = "wcf";
    j["z"] = prob_to_json<R>(w.spec.z.value());
    j["eps"] = prob_to_json<R>(w.spec.eps.value());
    j["alice_wins"] = node_to_json<R>(w.alice_wins);
    j["bob_wins"] = node_to_json<R>(w.bob_wins);
    return j;
}

template <typename R>
NodePtr<R> node_from_json(const Json& j, std::vector<int>& path) {
    const std::string where = "node at tree path " + path_to_string(path);
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string())
        throw ParseError(where + ": missing \"kind\"");
    const std::string kind = kind_it->get<std::string>();
    if (kind == "leaf") {
        auto out_it = j.find("output");
        if (out_it == j.end() || !out_it->is_string())
            throw ParseError(where + ": leaf needs an \"output\" string");
        try {
            return leaf<R>(outcome_from_string(out_it->get<std::string>()));
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (kind == "send") {
        auto sender_it = j.find("sender");
        if (sender_it == j.end() || !sender_it->is_string())
            throw ParseError(where + ": send needs a \"sender\" string");
        Party sender;
        try {
            sender = party_from_string(sender_it->get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        auto br_it = j.find("branches");
        if (br_it == j.end() || !br_it->is_array())
            throw ParseError(where + ": send needs a \"branches\" array");
        std::vector<Branch<R>> branches;
        int idx = 0;
        for (const auto& e : *br_it) {
            const std::string bwhere =
                "branch " + std::to_string(idx) + " of " + where;
            if (!e.is_object()) throw ParseError(bwhere + ": expected an object");
            auto msg_it = e.find("msg");
            if (msg_it == e.end() || !msg_it->is_string())
                throw ParseError(bwhere + ": missing \"msg\"");
            auto prob_it = e.find("prob");
            if (prob_it == e.end()) throw ParseError(bwhere + ": missing \"prob\"");
            auto child_it = e.find("child");
            if (child_it == e.end()) throw ParseError(bwhere + ": missing \"child\"");
            R raw = prob_from_json<R>(*prob_it, bwhere);
            Prob<R> p;
            try {
                p = Prob<R>(raw);
            } catch (const ConstraintViolation& err) {
                throw ParseError(bwhere + ": " + err.what());
            }
            path.push_back(idx);
            NodePtr<R> child = node_from_json<R>(*child_it, path);
            path.pop_back();
            branches.push_back(Branch<R>{msg_it->get<std::string>(), p, std::move(child)});
            ++idx;
        }
        return send<R>(sender, std::move(branches));
    }
    if (kind == "wcf") {
        auto z_it = j.find("z");
        auto eps_it = j.find("eps");
        auto aw_it = j.find("alice_wins");
        auto bw_it = j.find("bob_wins");
        if (z_it == j.end()) throw ParseError(where + ": wcf needs \"z\"");
        if (eps_it == j.end()) throw ParseError(where + ": wcf needs \"eps\"");
        if (aw_it == j.end()) throw ParseError(where + ": wcf needs \"alice_wins\"");
        if (bw_it == j.end()) throw ParseError(where + ": wcf needs \"bob_wins\"");
        Prob<R> z, eps;
        try {
            z = Prob<R>(prob_from_json<R>(*z_it, where + " \"z\""));
            eps = Prob<R>(prob_from_json<R>(*eps_it, where + " \"eps\""));
        } catch (const ConstraintViolation& err) {
            throw ParseError(where + ": " + err.what());
        }
        path.push_back(0);
        NodePtr<R> aw = node_from_json<R>(*aw_it, path);
        path.back() = 1;
        NodePtr<R> bw = node_from_json<R>(*bw_it, path);
        path.pop_back();
        return wcf<R>(z, eps, std::move(aw), std::move(bw));
    }
    throw ParseError(where + ": unknown node kind '" + kind + "'");
}

} // namespace detail

template <typename R>
Json tree_to_json(const ProtocolTree<R>& tree) {
    Json j;
    j["format"] = kTreeFormat;
    j["root"] = detail::node_to_json<R>(tree.root);
    return j;
}

template <typename R>
ProtocolTree<R> tree_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("tree document: expected an object");
    auto fmt_it = j.find("format");
    if (fmt_it == j.end() || !fmt_it->is_string() ||
        fmt_it->get<std::string>() != kTreeFormat)
        throw ParseError(std::string("tree document: expected \"format\": \"") + kTreeFormat +
                         "\"");
    auto root_it = j.find("root");
    if (root_it == j.end()) throw ParseError("tree document: missing \"root\"");
    std::vector<int> path;
    return ProtocolTree<R>{detail::node_from_json<R>(*root_it, path)};
}

/// Parses a cf-tree/1 document from JSON text. Syntax errors surface as
/// ParseError with the byte position nlohmann reports.
template <typename R>
ProtocolTree<R> parse_tree(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return tree_from_json<R>(j);
}

template <typename R>
std::string tree_to_string(const ProtocolTree<R>& tree, int indent = 2) {
    return tree_to_json<R>(tree).dump(indent);
}

template <typename R>
Json result_to_json(const AnalysisResult<R>& r) {
    Json j;
    j["p00"] = prob_to_json<R>(r.p00.value());
    j["p11"] = prob_to_json<R>(r.p11.value());
    j["abort"] = prob_to_json<R>(r.abort.value());
    j["force_a0"] = prob_to_json<R>(r.force_a0.value());
    j["force_a1"] = prob_to_json<R>(r.force_a1.value());
    j["force_b0"] = prob_to_json<R>(r.force_b0.value());
    j["force_b1"] = prob_to_json<R>(r.force_b1.value());
    if constexpr (arith<R>::exact) {
        Json d;
        d["p00"] = arith<R>::to_double(r.p00.value());
        d["p11"] = arith<R>::to_double(r.p11.value());
        d["abort"] = arith<R>::to_double(r.abort.value());
        d["force_a0"] = arith<R>::to_double(r.force_a0.value());
        d["force_a1"] = arith<R>::to_double(r.force_a1.value());
        d["force_b0"] = arith<R>::to_double(r.force_b0.value());
        d["force_b1"] = arith<R>::to_double(r.force_b1.value());
        j["decimal"] = std::move(d);
    }
    return j;
}

template <typename R>
Json verdict_to_json(const FeasibilityVerdict<R>& v) {
    Json j;
    j["feasible"] = v.feasible;
    Json arr = Json::array();
    for (const auto& ineq : v.violated) {
        Json e;
        e["name"] = ineq.name;
        e["lhs"] = prob_to_json<R>(ineq.lhs);
        e["rhs"] = prob_to_json<R>(ineq.rhs);
        arr.push_back(std::move(e));
    }
    j["violated"] = std::move(arr);
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

template <typename R>
Json spec_to_json(const CoinFlipSpec<R>& s) {
    Json j;
    j["p00"] = prob_to_json<R>(s.p00.value());
    j["p11"] = prob_to_json<R>(s.p11.value());
    j["p0s"] = prob_to_json<R>(s.p0s.value());
    j["p1s"] = prob_to_json<R>(s.p1s.value());
    j["ps0"] = prob_to_json<R>(s.ps0.value());
    j["ps1"] = prob_to_json<R>(s.ps1.value());
    return j;
}

template <typename R>
Json params_to_json(const CoinFlip2Params<R>& p) {
    Json j;
    j["p"] = prob_to_json<R>(p.p.value());
    j["x0"] = prob_to_json<R>(p.x0.value());
    j["x1"] = prob_to_json<R>(p.x1.value());
    j["y0"] = p.y0 ? prob_to_json<R>(p.y0->value()) : Json(nullptr);
    j["y1"] = p.y1 ? prob_to_json<R>(p.y1->value()) : Json(nullptr);
    return j;
}

template <typename R>
Json params_to_json(const QCoinFlip1Params<R>& p) {
    Json j;
    j["x"] = prob_to_json<R>(p.x.value());
    j["z0"] = prob_to_json<R>(p.z0.value());
    j["z1"] = prob_to_json<R>(p.z1.value());
    j["p0"] = prob_to_json<R>(p.p0.value());
    j["p1"] = prob_to_json<R>(p.p1.value());
    return j;
}

template <typename R>
Json params_to_json(const QCoinFlip2Params<R>& p) {
    Json j;
    j["p0s_prime"] = prob_to_json<R>(p.p0s_prime.value());
    j["ps1_prime"] = prob_to_json<R>(p.ps1_prime.value());
    j["eps0"] = prob_to_json<R>(p.eps0.value());
    j["eps1"] = prob_to_json<R>(p.eps1.value());
    return j;
}

inline Json empirical_to_json(const EmpiricalDistribution& d) {
    Json j;
    j["zero"] = d.zero;
    j["one"] = d.one;
    j["abort"] = d.abort;
    j["trials"] = d.trials;
    j["seed"] = d.seed;
    return j;
}

template <typename R>
Json script_to_json(const AdversaryScript<R>& s) {
    Json j;
    j["party"] = to_string(s.party);
    Json sends = Json::array();
    for (const auto& [path, msg] : s.sends) {
        Json e;
        e["path"] = path;
        e["msg"] = msg;
        sends.push_back(std::move(e));
    }
    j["sends"] = std::move(sends);
    Json biases = Json::array();
    for (const auto& [path, q] : s.wcf_bias) {
        Json e;
        e["path"] = path;
        e["q"] = prob_to_json<R>(q.value());
        biases.push_back(std::move(e));
    }
    j["wcf_bias"] = std::move(biases);
    return j;
}

template <typename R>
AdversaryScript<R> script_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("script document: expected an object");
    AdversaryScript<R> s;
    auto party_it = j.find("party");
    if (party_it == j.end() || !party_it->is_string())
        throw ParseError("script document: missing \"party\"");
    s.party = party_from_string(party_it->get<std::string>());
    auto read_path = [](const Json& e, const std::string& where) {
        auto path_it = e.find("path");
        if (path_it == e.end() || !path_it->is_array())
            throw ParseError(where + ": missing \"path\" array");
        std::vector<int> path;
        for (const auto& step : *path_it) {
            if (!step.is_number_integer())
                throw ParseError(where + ": path entries must be integers");
            path.push_back(step.get<int>());
        }
        return path;
    };
    if (auto it = j.find("sends"); it != j.end()) {
        if (!it->is_array()) throw ParseError("script \"sends\": expected an array");
        int idx = 0;
        for (const auto& e : *it) {
            const std::string where = "script send entry " + std::to_string(idx++);
            if (!e.is_object()) throw ParseError(where + ": expected an object");
            auto msg_it = e.find("msg");
            if (msg_it == e.end() || !msg_it->is_string())
                throw ParseError(where + ": missing \"msg\"");
            s.sends[read_path(e, where)] = msg_it->get<std::string>();
        }
    }
    if (auto it = j.find("wcf_bias"); it != j.end()) {
        if (!it->is_array()) throw ParseError("script \"wcf_bias\": expected an array");
        int idx = 0;
        for (const auto& e : *it) {
            const std::string where = "script bias entry " + std::to_string(idx++);
            if (!e.is_object()) throw ParseError(where + ": expected an object");
            auto q_it = e.find("q");
            if (q_it == e.end()) throw ParseError(where + ": missing \"q\"");
            R raw = prob_from_json<R>(*q_it, where);
            try {
                s.wcf_bias[read_path(e, where)] = Prob<R>(raw);
            } catch (const ConstraintViolation& err) {
                throw ParseError(where + ": " + err.what());
            }
        }
    }
    return s;
}

template <typename R>
AdversaryScript<R> parse_script(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return script_from_json<R>(j);
}

} // namespace coinflip
