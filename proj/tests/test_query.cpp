#include <doctest.h>

#include "rmcs/query.hpp"
#include "rmcs/scenarios.hpp"

using namespace rmcs;

namespace {

SystemConfig load(const char* name) { return scenario_system(find_scenario(name)); }

EngineOptions opts_of(const SystemConfig& cfg) {
    EngineOptions o;
    o.horizon = cfg.horizon;
    return o;
}

BeliefSet beliefs(const std::vector<std::string>& items) {
    BeliefSet s;
    for (const auto& b : items)
        s.insert(parse_belief(b));
    return s;
}

std::vector<std::vector<BridgeRule>> rules_at(const SystemConfig& cfg, const Observation& obs,
                                              long long now) {
    GroundingContext ctx;
    ctx.obs = &obs;
    ctx.now = now;
    ctx.horizon = cfg.horizon;
    ctx.context_ids = cfg.system.context_ids();
    std::vector<std::vector<BridgeRule>> out;
    for (const auto& schemas : cfg.system.bridge)
        out.push_back(ground_schemas(schemas, ctx, cfg.system.global_domains));
    return out;
}

} // namespace

TEST_CASE("relevant beliefs of the emergency query") {
    auto cfg = load("assisted-living");
    Observation obs;
    obs.readings.resize(cfg.system.sensors.size());
    auto rules = rules_at(cfg, obs, 0);
    std::size_t ig = cfg.system.context_index("ig");
    std::size_t kt = cfg.system.context_index("kt");
    std::size_t hu = cfg.system.context_index("hu");
    Belief emergency = parse_belief("emergency");

    CHECK(relevant_beliefs(rules, ig, emergency, kt) ==
          beliefs({"pw(on)", "pw(off)", "tm(cold)", "tm(hot)"}));
    CHECK(relevant_beliefs(rules, ig, emergency, ig) == beliefs({"emergency"}));
    CHECK(relevant_beliefs(rules, ig, emergency, hu) ==
          beliefs({"pos(kitchen)", "pos(bathroom)", "pos(bedroom)"}));

    std::vector<std::vector<BridgeRule>> none(3);
    CHECK(relevant_beliefs(none, ig, emergency, kt).empty());
}

TEST_CASE("projection intersects componentwise and is idempotent") {
    auto cfg = load("assisted-living");
    Observation obs;
    obs.readings.resize(cfg.system.sensors.size());
    auto rules = rules_at(cfg, obs, 0);
    std::size_t ig = cfg.system.context_index("ig");
    Belief emergency = parse_belief("emergency");

    BeliefState b0 = {beliefs({"pw(on)", "tm(cold)"}), beliefs({"pos(kitchen)"}),
                      beliefs({"oven(on,cold)", "humanPos(kitchen)"})};
    BeliefState projected = project(b0, rules, ig, emergency);
    CHECK(projected == BeliefState{beliefs({"pw(on)", "tm(cold)"}), beliefs({"pos(kitchen)"}),
                                   beliefs({})});
    CHECK(project(projected, rules, ig, emergency) == projected);

    BeliefState empty = {beliefs({}), beliefs({}), beliefs({})};
    CHECK(project(empty, rules, ig, emergency) == empty);
}

TEST_CASE("decide on the assisted-living run") {
    auto cfg = load("assisted-living");
    auto trace = scenario_trace(find_scenario("assisted-living"), cfg);

    Query q{QueryMode::Exists, cfg.system.context_index("ig"), parse_belief("emergency"),
            trace};
    auto result = decide(q, cfg.system, 100, opts_of(cfg));
    CHECK(result.value);
    CHECK(result.run_count == 1);
    REQUIRE(result.witness.has_value());
    CHECK(result.witness->second == 1);

    q.mode = QueryMode::Forall;
    CHECK(decide(q, cfg.system, 100, opts_of(cfg)).value);

    q.mode = QueryMode::Exists;
    q.belief = parse_belief("foo");
    CHECK_FALSE(decide(q, cfg.system, 100, opts_of(cfg)).value);
}

TEST_CASE("decide on the guess system: exists true, forall false") {
    auto cfg = load("guess");
    auto trace = empty_trace(cfg, 1);
    Query q{QueryMode::Exists, 0, parse_belief("a"), trace};
    CHECK(decide(q, cfg.system, 100, opts_of(cfg)).value);
    q.mode = QueryMode::Forall;
    auto result = decide(q, cfg.system, 100, opts_of(cfg));
    CHECK_FALSE(result.value);
    CHECK(result.run_count == 2);
}

TEST_CASE("forall over zero runs is vacuously true and flagged") {
    auto cfg = load("broken-clock");
    auto trace = empty_trace(cfg, 1);
    Query q{QueryMode::Forall, 0, parse_belief("now(1)"), trace};
    auto result = decide(q, cfg.system, 100, opts_of(cfg));
    CHECK(result.value);
    CHECK(result.no_runs);
    q.mode = QueryMode::Exists;
    CHECK_FALSE(decide(q, cfg.system, 100, opts_of(cfg)).value);
}

TEST_CASE("exists on an empty trace is false") {
    auto cfg = load("guess");
    Query q{QueryMode::Exists, 0, parse_belief("a"), {}};
    CHECK_FALSE(decide(q, cfg.system, 100, opts_of(cfg)).value);
}

TEST_CASE("duality: forall implies exists when at least one run exists") {
    auto cfg = load("guess");
    auto trace = empty_trace(cfg, 2);
    for (const char* name : {"a"}) {
        Query q{QueryMode::Forall, 0, parse_belief(name), trace};
        auto fa = decide(q, cfg.system, 100, opts_of(cfg));
        q.mode = QueryMode::Exists;
        auto ex = decide(q, cfg.system, 100, opts_of(cfg));
        if (fa.value && !fa.no_runs)
            CHECK(ex.value);
    }
}
