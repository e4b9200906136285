#include <doctest.h>

#include <random>

#include "rmcs/bridge.hpp"

using namespace rmcs;

namespace {

TermPattern var(const std::string& v) { return TermPattern::variable(v); }
TermPattern pat(const std::string& text) { return TermPattern::ground(parse_term(text)); }

BridgeLiteral ctx_lit(std::size_t c, const std::string& belief, bool naf = false) {
    return {ContextAtom{c, parse_belief(belief)}, naf};
}

BridgeLiteral sensor_lit(std::size_t s, const std::string& datum, bool naf = false) {
    return {SensorAtom{s, parse_term(datum)}, naf};
}

Observation obs_with(std::size_t sensors, std::size_t idx, std::vector<std::string> data) {
    Observation obs;
    obs.readings.resize(sensors);
    for (const auto& d : data)
        obs.readings[idx].insert(parse_term(d));
    return obs;
}

GroundingContext gctx(const Observation& obs, long long now, long long horizon) {
    GroundingContext ctx;
    ctx.obs = &obs;
    ctx.now = now;
    ctx.horizon = horizon;
    return ctx;
}

} // namespace

TEST_CASE("literal satisfaction") {
    BeliefState state = {{parse_belief("pw(on)"), parse_belief("tm(cold)")}};
    Observation obs = obs_with(2, 1, {"16"});

    CHECK(literal_satisfied(ctx_lit(0, "pw(on)"), state, obs));
    CHECK_FALSE(literal_satisfied(ctx_lit(0, "pw(off)"), state, obs));
    CHECK(literal_satisfied(ctx_lit(0, "pw(off)", true), state, obs));
    CHECK(literal_satisfied(sensor_lit(1, "16"), state, obs));
    CHECK_FALSE(literal_satisfied(sensor_lit(1, "81"), state, obs));
    CHECK(literal_satisfied(sensor_lit(0, "enters(kitchen)", true), state, obs));
    CHECK_THROWS(literal_satisfied(ctx_lit(3, "a"), state, obs));
}

TEST_CASE("rule applicability") {
    BeliefState state = {{}};
    Observation obs = obs_with(2, 0, {"switch(on)"});

    BridgeRule set_power{Operation{"setPower", {parse_term("on")}},
                         {sensor_lit(0, "switch(on)")}};
    CHECK(applicable(set_power, state, obs));

    BridgeRule empty_body{Operation{"incr", {}}, {}};
    CHECK(applicable(empty_body, state, obs));

    BridgeRule hot{Operation{"setTemp", {parse_term("hot")}}, {sensor_lit(1, "81")}};
    Observation cold_obs = obs_with(2, 1, {"16"});
    CHECK_FALSE(applicable(hot, state, cold_obs));
}

TEST_CASE("app_heads collects heads of applicable rules and is union-monotone") {
    BeliefState state = {{parse_belief("a")}};
    Observation obs = obs_with(1, 0, {"switch(on)"});

    std::vector<BridgeRule> r1 = {{Operation{"add", {parse_term("x")}}, {ctx_lit(0, "a")}}};
    std::vector<BridgeRule> r2 = {{Operation{"add", {parse_term("y")}}, {ctx_lit(0, "b")}},
                                  {Operation{"del", {parse_term("z")}},
                                   {sensor_lit(0, "switch(on)")}}};
    auto h1 = app_heads(r1, state, obs);
    auto h2 = app_heads(r2, state, obs);
    std::vector<BridgeRule> both = r1;
    both.insert(both.end(), r2.begin(), r2.end());
    auto merged = app_heads(both, state, obs);
    std::set<Operation> expected = h1;
    expected.insert(h2.begin(), h2.end());
    CHECK(merged == expected);
    CHECK(h1 == std::set<Operation>{Operation{"add", {parse_term("x")}}});
    CHECK(app_heads({}, state, obs).empty());
}

TEST_CASE("grounding the frame schema stays within the time bound") {
    // add(p(T+1)) <- c:p(T), not c:~p(T+1) at now=1, horizon=0
    BridgeSchema schema;
    schema.op = "add";
    schema.args = {TermPattern::compound(
        "p", {TermPattern::arith("+", var("T"), TermPattern::integer(1))})};
    schema.literals.push_back(
        {SchemaContextAtom{std::size_t{0},
                           BeliefPattern{false, TermPattern::compound("p", {var("T")})}},
         false});
    schema.literals.push_back(
        {SchemaContextAtom{
             std::size_t{0},
             BeliefPattern{true, TermPattern::compound(
                                     "p", {TermPattern::arith("+", var("T"),
                                                              TermPattern::integer(1))})}},
         true});

    Observation obs;
    obs.readings.resize(0);
    auto rules = ground_schemas({schema}, gctx(obs, 1, 0));
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].head == Operation{"add", {parse_term("p(1)")}});
    REQUIRE(rules[0].body.size() == 2);
    CHECK(rules[0].body[0].naf == false);
    CHECK(std::get<ContextAtom>(rules[0].body[0].atom).belief == parse_belief("p(0)"));
    CHECK(rules[0].body[1].naf == true);
    CHECK(std::get<ContextAtom>(rules[0].body[1].atom).belief == parse_belief("~p(1)"));
}

TEST_CASE("grounding binds sensor variables to current readings and consumes guards") {
    // setTemp(cold) <- tmp@T, T <= 45 with reading {16}
    BridgeSchema schema;
    schema.op = "setTemp";
    schema.args = {pat("cold")};
    schema.literals.push_back({SchemaSensorAtom{0, var("T")}, false});
    schema.guards.push_back({var("T"), RelOp::Le, TermPattern::integer(45)});

    Observation obs = obs_with(1, 0, {"16"});
    auto rules = ground_schemas({schema}, gctx(obs, 0, 1));
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].head == Operation{"setTemp", {parse_term("cold")}});
    CHECK(std::get<SensorAtom>(rules[0].body[0].atom).datum == parse_term("16"));

    Observation hot_obs = obs_with(1, 0, {"81"});
    CHECK(ground_schemas({schema}, gctx(hot_obs, 0, 1)).empty());

    CHECK(ground_schemas({}, gctx(obs, 0, 1)).empty());
}

TEST_CASE("grounding draws variables from declared domains") {
    BridgeSchema schema;
    schema.op = "extVal";
    schema.args = {TermPattern::compound("oven", {var("P"), var("T")})};
    schema.literals.push_back(
        {SchemaContextAtom{std::size_t{0},
                           BeliefPattern{false, TermPattern::compound("pw", {var("P")})}},
         false});
    schema.literals.push_back(
        {SchemaContextAtom{std::size_t{0},
                           BeliefPattern{false, TermPattern::compound("tm", {var("T")})}},
         false});
    schema.domains["P"] = {parse_term("on"), parse_term("off")};
    schema.domains["T"] = {parse_term("cold"), parse_term("hot")};

    Observation obs;
    auto rules = ground_schemas({schema}, gctx(obs, 0, 1));
    CHECK(rules.size() == 4);
}

TEST_CASE("unresolvable variables are grounding errors") {
    BridgeSchema schema;
    schema.op = "add";
    schema.args = {TermPattern::compound("q", {var("X")})};
    schema.literals.push_back(
        {SchemaContextAtom{std::size_t{0},
                           BeliefPattern{false, TermPattern::compound("p", {var("X")})}},
         false});
    Observation obs;
    CHECK_THROWS_AS(ground_schemas({schema}, gctx(obs, 0, 1)), GroundingError);
}

TEST_CASE("naf blocks expand to one literal per in-bound instantiation") {
    // add(q) <- s@go, not { c:p(T2), T2 < 2 } at now=3, horizon=0
    BridgeSchema schema;
    schema.op = "add";
    schema.args = {pat("q")};
    schema.literals.push_back({SchemaSensorAtom{0, pat("go")}, false});
    NafBlock block;
    block.literal = {SchemaContextAtom{std::size_t{0},
                                       BeliefPattern{false, TermPattern::compound(
                                                                "p", {var("T2")})}},
                     false};
    block.guards.push_back({var("T2"), RelOp::Lt, TermPattern::integer(2)});
    schema.blocks.push_back(block);

    Observation obs = obs_with(1, 0, {"go"});
    auto rules = ground_schemas({schema}, gctx(obs, 3, 0));
    REQUIRE(rules.size() == 1);
    // body: s@go plus naf literals p(0), p(1)
    REQUIRE(rules[0].body.size() == 3);
    std::set<Belief> nafs;
    for (std::size_t k = 1; k < rules[0].body.size(); ++k) {
        CHECK(rules[0].body[k].naf);
        nafs.insert(std::get<ContextAtom>(rules[0].body[k].atom).belief);
    }
    CHECK(nafs == std::set<Belief>{parse_belief("p(0)"), parse_belief("p(1)")});
}

TEST_CASE("context-valued variables resolve over declared context-name domains") {
    BridgeSchema schema;
    schema.op = "add";
    schema.args = {TermPattern::compound("seen", {var("K")})};
    schema.literals.push_back(
        {SchemaContextAtom{std::string("K"), BeliefPattern{false, pat("susp")}}, false});
    schema.domains["K"] = {parse_term("d")};

    Observation obs;
    GroundingContext ctx = gctx(obs, 0, 1);
    ctx.context_ids = {{"ctl", 0}, {"d", 1}};
    auto rules = ground_schemas({schema}, ctx);
    REQUIRE(rules.size() == 1);
    CHECK(std::get<ContextAtom>(rules[0].body[0].atom).context == 1);
    CHECK(rules[0].head == Operation{"add", {parse_term("seen(d)")}});
}

TEST_CASE("property: grounding is sound and complete over small finite domains") {
    // add(r(X,Y)) <- c:p(X), X < Y over X,Y in {0,1,2}: compare against direct
    // substitution enumeration.
    BridgeSchema schema;
    schema.op = "add";
    schema.args = {TermPattern::compound("r", {var("X"), var("Y")})};
    schema.literals.push_back(
        {SchemaContextAtom{std::size_t{0},
                           BeliefPattern{false, TermPattern::compound("p", {var("X")})}},
         false});
    schema.guards.push_back({var("X"), RelOp::Lt, var("Y")});
    std::vector<Term> dom = {parse_term("0"), parse_term("1"), parse_term("2")};
    schema.domains["X"] = dom;
    schema.domains["Y"] = dom;

    Observation obs;
    auto rules = ground_schemas({schema}, gctx(obs, 0, 1));

    std::set<Operation> got;
    for (const auto& r : rules)
        got.insert(r.head);
    std::set<Operation> expected;
    for (long long x = 0; x <= 2; ++x)
        for (long long y = 0; y <= 2; ++y)
            if (x < y)
                expected.insert(Operation{
                    "add", {Term::compound("r", {Term::integer(x), Term::integer(y)})}});
    CHECK(got == expected);
}

TEST_CASE("applicability only depends on mentioned beliefs and readings") {
    std::mt19937 rng(5);
    BridgeRule rule{Operation{"add", {parse_term("x")}},
                    {ctx_lit(0, "a"), ctx_lit(0, "b", true), sensor_lit(0, "go")}};
    for (int i = 0; i < 100; ++i) {
        BeliefSet base = {parse_belief("a")};
        Observation obs = obs_with(1, 0, {"go"});
        // sprinkle unrelated beliefs/readings
        if (rng() % 2)
            base.insert(parse_belief("c" + std::to_string(rng() % 5)));
        if (rng() % 2)
            obs.readings[0].insert(Term::symbol("noise" + std::to_string(rng() % 5)));
        BeliefState state = {base};
        CHECK(applicable(rule, state, obs));
    }
}
