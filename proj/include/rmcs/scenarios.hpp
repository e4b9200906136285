#pragma once

#include <string>
#include <vector>

#include "rmcs/config.hpp"

namespace rmcs {

struct Scenario {
    std::string name;
    std::string description;
    std::string config_text;
    std::string trace_text; // may be empty: the caller supplies --steps
};

inline const std::vector<Scenario>& scenarios() {
    static const std::vector<Scenario> all = {
        {"clock",
         "a single context counting steps with incr",
         R"(horizon 1
context c {
  logic: identity
  kb: now(0)
  ops: incr now
  bridge: incr <-
}
)",
         "obs 0\nend\nobs 1\nend\nobs 2\nend\nobs 3\nend\nobs 4\nend\n"},

        {"broken-clock",
         "a self-referential clock without any equilibrium",
         R"(horizon 1
context c {
  logic: identity
  kb: now(0)
  ops: set
  bridge: set(now(T+1)) <- c:now(T)
}
)",
         "obs 0\nend\n"},

        {"assisted-living",
         "kitchen emergency detection from power, temperature, and motion sensors",
         R"(horizon 1
sensor pow { lang: switch/1 }
sensor tmp { lang: integers }
sensor pos { lang: enters/1 }
context kt {
  logic: identity
  ops: setter setPower pw; setter setTemp tm
  bridge: setPower(P) <- pow@switch(P)
  bridge: setTemp(cold) <- tmp@T, T <= 45
  bridge: setTemp(hot) <- tmp@T, 45 < T
}
context hu {
  logic: identity
  ops: setter setPos pos
  bridge: setPos(P) <- pos@enters(P)
}
context ig {
  logic: asp
  kb: emergency <- oven(on,hot), not humanPos(kitchen)
  ops: extVal oven/2 humanPos/1
  bridge: extVal(oven(P,T)) <- kt:pw(P), kt:tm(T), P in {on, off}, T in {cold, hot}
  bridge: extVal(humanPos(P)) <- hu:pos(P), P in {kitchen, bathroom, bedroom}
}
)",
         R"(obs 0
  pow: switch(on)
  tmp: 16
  pos: enters(kitchen)
end
obs 1
  tmp: 81
  pos: enters(bathroom)
end
)"},

        {"guess",
         "a self-supporting belief with two equilibria",
         R"(horizon 1
context c {
  logic: identity
  ops: add
  bridge: add(a) <- c:a
}
)",
         "obs 0\nend\n"},

        {"sensor-merge",
         "three ranked sensors feeding one functional reading",
         R"(horizon 1
sensor time auto-time { lang: now/1 }
sensor s1 { lang: reading/1 }
sensor s2 { lang: reading/1 }
sensor s3 { lang: reading/1 }
context m {
  logic: identity
  ops: add
  ranking: s1 > s2 > s3
  functional: reading/2@0
  bridge: add(reading(X), T, s1) <- s1@reading(X), time@now(T)
  bridge: add(reading(X), T, s2) <- s2@reading(X), time@now(T)
  bridge: add(reading(X), T, s3) <- s3@reading(X), time@now(T)
}
)",
         R"(obs 0
  s1: reading(5)
  s2: reading(7)
end
obs 1
  s2: reading(3)
  s3: reading(4)
end
)"},

        {"frame",
         "a persistent predicate carried forward until contradicted",
         R"(horizon 1
sensor time auto-time { lang: now/1 }
sensor obsP { lang: p/0 }
sensor obsN { lang: off/0 }
context c {
  logic: identity
  ops: add
  bridge: add(p(T)) <- obsP@p, time@now(T)
  bridge: add(~p(T)) <- obsN@off, time@now(T)
  bridge: add(p(T)) <- time@now(T), c:p(T-1), not c:~p(T)
}
)",
         R"(obs 0
  obsP: p
end
obs 1
end
obs 2
end
obs 3
  obsN: off
end
obs 4
end
)"},

        {"windows",
         "sliding retention windows widened while a suspicion is active",
         R"(horizon 1
sensor time auto-time { lang: now/1 }
sensor sig { lang: p/0 }
sensor alert { lang: e1/0 }
sensor confirm { lang: e1/0 }
context d {
  logic: identity
  kb: def.win(p,2); rel(p,e1,6)
  ops: add; del; set; alarm
  bridge: add(susp(e1)) <- alert@e1
  bridge: del(susp(e1)) <- not alert@e1
  bridge: add(p(T)) <- sig@p, time@now(T)
  bridge: set(win(P,X)) <- d:def.win(P,X), not d:susp(e1), P in {p}, X in {2}
  bridge: set(win(P,Y)) <- d:rel(P,e1,Y), d:susp(e1), P in {p}, Y in {6}
  bridge: del(p(T2)) <- time@now(T), d:win(P,Z), T2 < T - Z, P in {p}, Z in {2, 6}
  bridge: add(conf(E)) <- confirm@e1, E in {e1}
  bridge: del(conf(E)) <- not confirm@e1, E in {e1}
  bridge: alarm(E) <- d:conf(E), E in {e1}
}
)",
         [] {
             std::string t;
             for (int k = 0; k < 20; ++k) {
                 t += "obs " + std::to_string(k) + "\n";
                 t += "  sig: p\n";
                 if (k >= 8 && k <= 12)
                     t += "  alert: e1\n";
                 if (k == 11)
                     t += "  confirm: e1\n";
                 t += "end\n";
             }
             return t;
         }()},

        {"focus",
         "room focus with absence tracking cleared on return",
         R"(horizon 1
sensor time auto-time { lang: now/1 }
sensor pos { lang: enters/1 }
sensor stv { lang: stove/1 }
context f {
  logic: asp
  kb: focus(kitchen) <- stove(on)
  ops: extVal stove/1 humanPos/1; add; delAll
  bridge: extVal(stove(S)) <- stv@stove(S), S in {on, off}
  bridge: extVal(humanPos(R)) <- pos@enters(R), R in {kitchen, bath}
  bridge: add(absence(R,T)) <- time@now(T), f:focus(R), not f:humanPos(R), not { f:absence(R,T2), T2 < T }, R in {kitchen, bath}
  bridge: delAll(absence, R) <- f:humanPos(R), R in {kitchen, bath}
  bridge: delAll(absence, R) <- not f:focus(R), R in {kitchen, bath}
}
)",
         R"(obs 0
  pos: enters(kitchen)
  stv: stove(on)
end
obs 1
  pos: enters(bath)
  stv: stove(on)
end
obs 2
  stv: stove(on)
end
obs 3
  pos: enters(kitchen)
  stv: stove(on)
end
obs 4
  stv: stove(off)
end
)"},

        {"idle",
         "a detector put to sleep by a control context, buffering until wake",
         R"(horizon 3
sensor time auto-time { lang: now/1 }
sensor sig { lang: p/0 }
sensor alert { lang: e1/0 }
context ctl {
  logic: identity
  kb: suspicion(d,0)
  ops: add; del
  idle-retention: on
  bridge: add(suspicion(K,T)) <- K:susp(E), time@now(T), K in {d}, E in {e1}
  bridge: del(suspicion(K,T2)) <- time@now(T), T2 < T - 2, K in {d}
  bridge: add(idle(K,T+3)) <- time@now(T), not { ctl:suspicion(K,T2), T - 1 <= T2 }, not { ctl:idle(K,T2), T2 < T + 3 }, K in {d}
}
context d {
  logic: identity
  kb: win(p,2)
  ops: add; del; bf; empty.buffer
  ranking: sig
  bridge: add(p(T)) <- sig@p, time@now(T), not { ctl:idle(d,T2), T <= T2 }
  bridge: bf(p(T), T, sig) <- sig@p, time@now(T), ctl:idle(d,T2), T <= T2
  bridge: add(susp(e1)) <- alert@e1, time@now(T), not { ctl:idle(d,T2), T <= T2 }
  bridge: del(susp(e1)) <- not alert@e1, time@now(T), not { ctl:idle(d,T2), T <= T2 }
  bridge: del(p(T2)) <- time@now(T), d:win(P,Z), T2 < T - Z, not { ctl:idle(d,T3), T <= T3 }, P in {p}, Z in {2}
  bridge: empty.buffer <- time@now(T), not { ctl:idle(d,T2), T <= T2 }
}
)",
         [] {
             std::string t;
             for (int k = 0; k < 9; ++k) {
                 t += "obs " + std::to_string(k) + "\n";
                 if (k == 0 || k == 1 || k == 4 || k == 5)
                     t += "  sig: p\n";
                 if (k == 0 || k == 1)
                     t += "  alert: e1\n";
                 t += "end\n";
             }
             return t;
         }()},
    };
    return all;
}

inline const Scenario& find_scenario(const std::string& name) {
    for (const auto& s : scenarios())
        if (s.name == name)
            return s;
    throw ConfigError("unknown scenario: " + name);
}

inline SystemConfig scenario_system(const Scenario& s) { return parse_system(s.config_text); }

inline ObservationTrace scenario_trace(const Scenario& s, const SystemConfig& config) {
    return parse_trace(s.trace_text, config);
}

/// A trace of `steps` empty observations (the time sensor, if any, advances).
inline ObservationTrace empty_trace(const SystemConfig& config, std::size_t steps) {
    std::string text;
    for (std::size_t k = 0; k < steps; ++k)
        text += "obs " + std::to_string(k) + "\nend\n";
    return parse_trace(text, config);
}

} // namespace rmcs
