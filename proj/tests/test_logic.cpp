#include <doctest.h>

#include <random>

#include "rmcs/logic.hpp"
#include "oracles.hpp"

using namespace rmcs;

namespace {

KBElement rule(const std::string& head, const std::vector<std::string>& pos,
               const std::vector<std::string>& neg) {
    std::vector<Belief> p, n;
    for (const auto& s : pos)
        p.push_back(parse_belief(s));
    for (const auto& s : neg)
        n.push_back(parse_belief(s));
    return KBElement(parse_belief(head), std::move(p), std::move(n));
}

KnowledgeBase kb_ig() {
    return {rule("emergency", {"oven(on,hot)"}, {"humanPos(kitchen)"})};
}

} // namespace

TEST_CASE("acc_identity returns the heads of a fact base") {
    KnowledgeBase kb = {fact(parse_belief("pw(on)")), fact(parse_belief("tm(cold)"))};
    auto out = acc_identity(kb);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == BeliefSet{parse_belief("pw(on)"), parse_belief("tm(cold)")});

    CHECK(acc_identity({}) == std::vector<BeliefSet>{{}});
    KnowledgeBase ab = {fact(parse_belief("a")), fact(parse_belief("b"))};
    CHECK(acc_identity(ab)[0] == BeliefSet{parse_belief("a"), parse_belief("b")});

    CHECK_THROWS(acc_identity({rule("a", {"b"}, {})}));
}

TEST_CASE("gl_reduct examples") {
    BeliefSet candidate = {parse_belief("oven(on,hot)")};
    KnowledgeBase expected = {rule("emergency", {"oven(on,hot)"}, {})};
    CHECK(gl_reduct(kb_ig(), candidate) == expected);

    KnowledgeBase positive = {rule("b", {"a"}, {}), fact(parse_belief("a"))};
    CHECK(gl_reduct(positive, {parse_belief("a")}) == positive);

    KnowledgeBase self = {rule("a", {}, {"a"})};
    CHECK(gl_reduct(self, {parse_belief("a")}) == KnowledgeBase{});
}

TEST_CASE("least_model examples") {
    KnowledgeBase p1 = {fact(parse_belief("a")), rule("b", {"a"}, {})};
    CHECK(least_model(p1) == BeliefSet{parse_belief("a"), parse_belief("b")});
    CHECK(least_model({}) == BeliefSet{});
    CHECK(least_model({rule("b", {"a"}, {})}) == BeliefSet{});
    CHECK_THROWS(least_model({rule("a", {}, {"b"})}));
}

TEST_CASE("answer_sets reproduces the emergency-detection belief sets") {
    KnowledgeBase hot = kb_ig();
    hot.insert(fact(parse_belief("oven(on,hot)")));
    hot.insert(fact(parse_belief("humanPos(bathroom)")));
    auto out = answer_sets(hot);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == BeliefSet{parse_belief("oven(on,hot)"), parse_belief("humanPos(bathroom)"),
                              parse_belief("emergency")});

    KnowledgeBase cold = kb_ig();
    cold.insert(fact(parse_belief("oven(on,cold)")));
    cold.insert(fact(parse_belief("humanPos(kitchen)")));
    auto out2 = answer_sets(cold);
    REQUIRE(out2.size() == 1);
    CHECK(out2[0] ==
          BeliefSet{parse_belief("oven(on,cold)"), parse_belief("humanPos(kitchen)")});
}

TEST_CASE("answer_sets basics") {
    auto out = answer_sets({rule("a", {}, {"b"})});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == BeliefSet{parse_belief("a")});

    // a negation-free program has exactly its least model
    KnowledgeBase positive = {fact(parse_belief("a")), rule("b", {"a"}, {})};
    auto pos_out = answer_sets(positive);
    REQUIRE(pos_out.size() == 1);
    CHECK(pos_out[0] == least_model(positive));

    // classically inconsistent candidates are rejected
    KnowledgeBase clash = {fact(parse_belief("a")), fact(parse_belief("~a"))};
    CHECK(answer_sets(clash).empty());

    // {a <- not a} has no answer set
    CHECK(answer_sets({rule("a", {}, {"a"})}).empty());
}

TEST_CASE("answer_sets enforces the universe guard") {
    KnowledgeBase big;
    for (int i = 0; i < 25; ++i)
        big.insert(fact(parse_belief("p" + std::to_string(i))));
    CHECK_THROWS_AS(answer_sets(big), EnumerationGuardError);

    KnowledgeBase small_kb;
    for (int i = 0; i < 6; ++i)
        small_kb.insert(fact(parse_belief("p" + std::to_string(i))));
    CHECK_THROWS_AS(answer_sets(small_kb, 3), EnumerationGuardError);
    CHECK(answer_sets(small_kb, 6).size() == 1);
}

TEST_CASE("every returned answer set satisfies the stable-model condition") {
    KnowledgeBase kb = {rule("a", {}, {"b"}), rule("b", {}, {"a"}), rule("c", {"a"}, {})};
    for (const auto& s : answer_sets(kb))
        CHECK(least_model(gl_reduct(kb, s)) == s);
    CHECK(answer_sets(kb).size() == 2);
}

namespace {

KnowledgeBase random_program(std::mt19937& rng, int max_atoms) {
    static const char* names[] = {"a", "b", "c", "d", "e", "f"};
    std::uniform_int_distribution<int> atom(0, max_atoms - 1);
    std::uniform_int_distribution<int> rules_n(0, 5);
    std::uniform_int_distribution<int> body_n(0, 2);
    KnowledgeBase kb;
    int n = rules_n(rng);
    for (int i = 0; i < n; ++i) {
        Belief head(Term::symbol(names[atom(rng)]));
        std::vector<Belief> pos, neg;
        for (int k = body_n(rng); k > 0; --k)
            pos.emplace_back(Term::symbol(names[atom(rng)]));
        for (int k = body_n(rng); k > 0; --k)
            neg.emplace_back(Term::symbol(names[atom(rng)]));
        kb.insert(KBElement(head, std::move(pos), std::move(neg)));
    }
    return kb;
}

} // namespace

TEST_CASE("property: answer_sets agrees with the naive stable-model oracle") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 200; ++i) {
        KnowledgeBase kb = random_program(rng, 6);
        auto got = answer_sets(kb);
        auto expected = oracle::naive_stable_models(kb);
        std::sort(got.begin(), got.end());
        std::sort(expected.begin(), expected.end());
        REQUIRE(got == expected);
    }
}

TEST_CASE("the logic registry") {
    CHECK(make_logic("identity")->name() == "identity");
    CHECK(make_logic("asp")->name() == "asp");
    CHECK_THROWS(make_logic("modal"));
    CHECK(make_logic("identity")->kb_determines_beliefs());
    CHECK_FALSE(make_logic("asp")->kb_determines_beliefs());
}
