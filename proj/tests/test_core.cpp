#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"

using namespace coinflip;
using Q = mpq_class;

TEST_CASE("rational parsing accepts fractions and decimals exactly") {
    CHECK(arith<Q>::parse("7/16") == Q(7) / 16);
    CHECK(arith<Q>::parse("0.51") == Q(51) / 100);
    CHECK(arith<Q>::parse("1") == Q(1));
    CHECK(arith<Q>::parse("0") == Q(0));
    CHECK(arith<Q>::parse("0.4375") == Q(7) / 16);
    CHECK(arith<Q>::parse("-3/4") == Q(-3) / 4);
    CHECK_THROWS_AS(arith<Q>::parse("1/0"), ParseError);
    CHECK_THROWS_AS(arith<Q>::parse("abc"), ParseError);
    CHECK_THROWS_AS(arith<Q>::parse(""), ParseError);
    CHECK_THROWS_AS(arith<Q>::parse("1e-3"), ParseError);
    CHECK_THROWS_AS(arith<Q>::parse("0.5.1"), ParseError);
}

TEST_CASE("rational formatting is num/den with integers plain") {
    CHECK(arith<Q>::str(Q(7) / 16) == "7/16");
    CHECK(arith<Q>::str(Q(1)) == "1");
    CHECK(arith<Q>::str(Q(0)) == "0");
    CHECK(arith<Q>::str(Q(6) / 4) == "3/2");
}

TEST_CASE("float parsing accepts decimals and quotient forms") {
    CHECK(arith<double>::parse("0.51") == 0.51);
    CHECK(arith<double>::parse("1/2") == 0.5);
    CHECK(arith<double>::parse("7/16") == 0.4375);
    CHECK_THROWS_AS(arith<double>::parse("1/0"), ParseError);
    CHECK_THROWS_AS(arith<double>::parse("x"), ParseError);
    CHECK_THROWS_AS(arith<double>::parse("0.5junk"), ParseError);
}

TEST_CASE("float formatting round-trips through shortest decimal") {
    for (double v : {0.1, 0.4375, 0.7071067811865476, 1.0, 0.0, 1e-9}) {
        CHECK(arith<double>::parse(arith<double>::str(v)) == v);
    }
}

TEST_CASE("comparisons use the mode tolerance") {
    CHECK(leq<Q>(Q(1) / 2, Q(1) / 2));
    CHECK_FALSE(leq<Q>(Q(1) / 2 + Q(1, 1000000000000L), Q(1) / 2));
    CHECK(leq<double>(0.5 + 1e-10, 0.5));
    CHECK_FALSE(leq<double>(0.5 + 1e-8, 0.5));
    CHECK(approx_eq<double>(0.5, 0.5 + 1e-10));
    CHECK_FALSE(approx_eq<double>(0.5, 0.5 + 1e-8));
    CHECK(approx_eq<Q>(Q(1) / 3, Q(1) / 3));
    CHECK_FALSE(approx_eq<Q>(Q(1) / 3, Q(1) / 3 + Q(1, 1000000000000L)));
}

TEST_CASE("probabilities reject values outside the unit interval") {
    CHECK_THROWS_AS(Prob<double>(-0.1), ConstraintViolation);
    CHECK_THROWS_AS(Prob<double>(1.1), ConstraintViolation);
    CHECK_THROWS_AS(Prob<Q>(Q(17) / 16), ConstraintViolation);
    CHECK_THROWS_AS(Prob<Q>(Q(-1) / 16), ConstraintViolation);
    CHECK(Prob<double>(0.0).value() == 0.0);
    CHECK(Prob<double>(1.0).value() == 1.0);
    // Float-mode tolerance clamps tiny overshoot instead of rejecting.
    CHECK(Prob<double>(1.0 + 1e-12).value() == 1.0);
    CHECK(Prob<double>(-1e-12).value() == 0.0);

    // Property sweep: construction succeeds exactly on [0,1] (+/- tolerance).
    testutil::Gen g(11);
    for (int i = 0; i < 2000; ++i) {
        double v = static_cast<double>(g.below(4001)) / 1000.0 - 2.0;
        bool inside = v >= -1e-9 && v <= 1.0 + 1e-9;
        if (inside)
            CHECK_NOTHROW(Prob<double>(v));
        else
            CHECK_THROWS_AS(Prob<double>(v), ConstraintViolation);
    }
}

TEST_CASE("make_spec accepts the classic specs and rejects invalid rates") {
    CHECK_NOTHROW(make_spec<Q>(Q(1) / 2, Q(1) / 2, Q(1) / 2, Q(1) / 2, Q(1) / 2, Q(1) / 2));
    CHECK_NOTHROW(make_spec<Q>(Q(1) / 2, Q(1) / 2, Q(1), Q(1) / 2, Q(1) / 2, Q(1)));
    CHECK_THROWS_WITH_AS(
        make_spec<double>(0.6, 0.6, 1.0, 1.0, 1.0, 1.0),
        "spec violates p00 + p11 <= 1: 1.2 > 1", ConstraintViolation);
    CHECK_THROWS_AS(make_spec<Q>(Q(3) / 4, Q(0), Q(1) / 2, Q(1), Q(1), Q(1)),
                    ConstraintViolation);  // p00 > p0s
    CHECK_THROWS_AS(make_spec<Q>(Q(0), Q(3) / 4, Q(1), Q(1), Q(1), Q(1) / 2),
                    ConstraintViolation);  // p11 > ps1
}

TEST_CASE("accepted specs satisfy every validity inequality") {
    for (int i = 0; i < 200; ++i) {
        auto s = testutil::random_feasible_spec<Q>(i + 1, Setting::quantum);
        CHECK(s.p00.value() + s.p11.value() <= 1);
        CHECK(s.p00.value() <= s.p0s.value());
        CHECK(s.p00.value() <= s.ps0.value());
        CHECK(s.p11.value() <= s.p1s.value());
        CHECK(s.p11.value() <= s.ps1.value());
    }
}

TEST_CASE("spec relabelings are involutions that move the right fields") {
    auto s = make_spec<Q>(Q(1) / 8, Q(1) / 4, Q(1) / 2, Q(2) / 3, Q(3) / 4, Q(4) / 5);
    auto sw = swap_parties(s);
    CHECK(sw.p00.value() == s.p00.value());
    CHECK(sw.p11.value() == s.p11.value());
    CHECK(sw.p0s.value() == s.ps0.value());
    CHECK(sw.p1s.value() == s.ps1.value());
    CHECK(sw.ps0.value() == s.p0s.value());
    CHECK(sw.ps1.value() == s.p1s.value());
    auto fl = flip_outputs(s);
    CHECK(fl.p00.value() == s.p11.value());
    CHECK(fl.p11.value() == s.p00.value());
    CHECK(fl.p0s.value() == s.p1s.value());
    CHECK(fl.ps0.value() == s.ps1.value());
    auto back = swap_parties(swap_parties(s));
    CHECK(back.p0s.value() == s.p0s.value());
    auto back2 = flip_outputs(flip_outputs(s));
    CHECK(back2.p0s.value() == s.p0s.value());
}

TEST_CASE("a single leaf is a well-formed tree") {
    auto t = ProtocolTree<Q>{leaf<Q>(Outcome::zero)};
    CHECK(validate_tree<Q>(t).ok());
    CHECK(count_nodes<Q>(t) == 1);
    CHECK(count_wcf_nodes<Q>(t) == 0);
}

TEST_CASE("branch probabilities must sum to one") {
    auto t = ProtocolTree<double>{send<double>(
        Party::alice, {Branch<double>{"a", Prob<double>(0.5), leaf<double>(Outcome::zero)},
                       Branch<double>{"b", Prob<double>(0.6), leaf<double>(Outcome::one)}})};
    auto rep = validate_tree<double>(t);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.defects[0] == "branch sum 1.1 at node path []");
}

TEST_CASE("defects carry the node path") {
    auto bad = send<Q>(Party::bob, {Branch<Q>{"x", Prob<Q>(Q(1) / 2), leaf<Q>(Outcome::zero)},
                                    Branch<Q>{"y", Prob<Q>(Q(1) / 4), leaf<Q>(Outcome::one)}});
    auto t = ProtocolTree<Q>{send<Q>(
        Party::alice, {Branch<Q>{"l", Prob<Q>(Q(1) / 2), leaf<Q>(Outcome::abort)},
                       Branch<Q>{"r", Prob<Q>(Q(1) / 2), bad}})};
    auto rep = validate_tree<Q>(t);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.defects[0] == "branch sum 3/4 at node path [1]");
}

TEST_CASE("duplicate sibling message labels are defects") {
    auto t = ProtocolTree<Q>{send<Q>(
        Party::alice, {Branch<Q>{"m", Prob<Q>(Q(1) / 2), leaf<Q>(Outcome::zero)},
                       Branch<Q>{"m", Prob<Q>(Q(1) / 2), leaf<Q>(Outcome::one)}})};
    auto rep = validate_tree<Q>(t);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.defects[0] == "duplicate message label 'm' at node path []");
}

TEST_CASE("a balanced resource node with two leaves is well-formed") {
    auto t = ProtocolTree<double>{wcf<double>(Prob<double>(0.5), Prob<double>(0.0),
                                              leaf<double>(Outcome::zero),
                                              leaf<double>(Outcome::one))};
    CHECK(validate_tree<double>(t).ok());
    CHECK(count_wcf_nodes<double>(t) == 1);
}

TEST_CASE("missing children and empty branch lists are defects") {
    auto empty = ProtocolTree<Q>{send<Q>(Party::alice, {})};
    CHECK_FALSE(validate_tree<Q>(empty).ok());
    auto hole = ProtocolTree<Q>{send<Q>(
        Party::alice, {Branch<Q>{"m", Prob<Q>(Q(1)), nullptr}})};
    CHECK_FALSE(validate_tree<Q>(hole).ok());
}

TEST_CASE("tree relabelings compose to the identity") {
    for (int i = 0; i < 50; ++i) {
        auto t = testutil::random_tree<Q>(i + 1);
        CHECK(structurally_equal<Q>(swap_parties<Q>(swap_parties<Q>(t)), t));
        CHECK(structurally_equal<Q>(flip_outputs<Q>(flip_outputs<Q>(t)), t));
    }
}

TEST_CASE("rewriting preserves shared subtrees") {
    auto shared = send<Q>(Party::bob, {Branch<Q>{"k", Prob<Q>(Q(1)), leaf<Q>(Outcome::zero)}});
    auto t = ProtocolTree<Q>{send<Q>(
        Party::alice, {Branch<Q>{"l", Prob<Q>(Q(1) / 2), shared},
                       Branch<Q>{"r", Prob<Q>(Q(1) / 2), shared}})};
    auto sw = swap_parties<Q>(t);
    const auto& root = std::get<SendNode<Q>>(sw.root->v);
    CHECK(root.branches[0].child.get() == root.branches[1].child.get());
    CHECK(count_nodes<Q>(sw) == count_nodes<Q>(t));
}

TEST_CASE("outcome and party names round-trip through text") {
    CHECK(to_string(Outcome::zero) == std::string("0"));
    CHECK(to_string(Outcome::one) == std::string("1"));
    CHECK(to_string(Outcome::abort) == std::string("abort"));
    CHECK(outcome_from_string("abort") == Outcome::abort);
    CHECK(to_string(Party::alice) == std::string("alice"));
    CHECK(party_from_string("bob") == Party::bob);
    CHECK_THROWS_AS(outcome_from_string("2"), ParseError);
    CHECK_THROWS_AS(party_from_string("carol"), ParseError);
}
