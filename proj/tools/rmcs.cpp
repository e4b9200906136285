#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rmcs/engine.hpp"
#include "rmcs/query.hpp"
#include "rmcs/report.hpp"
#include "rmcs/scenarios.hpp"

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("RMCS_LOG");
    if (!env)
        return LogLevel::Quiet;
    std::string v = env;
    if (v == "debug")
        return LogLevel::Debug;
    if (v == "info")
        return LogLevel::Info;
    return LogLevel::Quiet;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Inputs {
    std::string system_file;
    std::string trace_file;
    std::string scenario;
    std::size_t steps = 0;

    rmcs::SystemConfig config;
    rmcs::ObservationTrace trace;

    void add_options(CLI::App* cmd) {
        cmd->add_option("system", system_file, "system description file");
        cmd->add_option("trace", trace_file, "observation trace file");
        cmd->add_option("--scenario", scenario, "use a built-in scenario instead of files");
        cmd->add_option("--steps", steps,
                        "override the trace with this many empty observations");
    }

    void load() {
        if (!scenario.empty()) {
            const auto& s = rmcs::find_scenario(scenario);
            config = rmcs::scenario_system(s);
            trace = steps > 0 ? rmcs::empty_trace(config, steps)
                              : rmcs::scenario_trace(s, config);
            return;
        }
        if (system_file.empty())
            throw std::runtime_error("either a system file or --scenario is required");
        config = rmcs::parse_system(read_file(system_file));
        if (steps > 0)
            trace = rmcs::empty_trace(config, steps);
        else if (!trace_file.empty())
            trace = rmcs::parse_trace(read_file(trace_file), config);
        else
            throw std::runtime_error("either a trace file or --steps is required");
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reactive multi-context system engine"};
    app.require_subcommand(1);

    Inputs run_inputs, query_inputs;
    std::string policy = "first";
    long long horizon = -1;
    std::size_t max_runs = 4096;

    auto* run_cmd = app.add_subcommand("run", "compute the run induced by a trace");
    run_inputs.add_options(run_cmd);
    run_cmd->add_option("--policy", policy, "first | strict (error when ambiguous)")
        ->check(CLI::IsMember({"first", "strict"}));
    run_cmd->add_option("--horizon", horizon, "grounding time horizon (default: from config)");

    auto* query_cmd = app.add_subcommand("query", "decide a belief query over all runs");
    std::string mode, context_name, belief_text;
    query_cmd->add_option("--mode", mode, "exists | forall")
        ->required()
        ->check(CLI::IsMember({"exists", "forall"}));
    query_cmd->add_option("--context", context_name, "queried context")->required();
    query_cmd->add_option("--belief", belief_text, "queried belief, e.g. emergency or ~p(3)")
        ->required();
    query_inputs.add_options(query_cmd);
    query_cmd->add_option("--horizon", horizon, "grounding time horizon (default: from config)");
    query_cmd->add_option("--max-runs", max_runs, "bound on the number of enumerated runs");

    auto* list_cmd = app.add_subcommand("scenarios", "list the built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    LogLevel log = log_level();
    try {
        if (list_cmd->parsed()) {
            for (const auto& s : rmcs::scenarios())
                std::cout << s.name << "  " << s.description << "\n";
            return 0;
        }

        if (run_cmd->parsed()) {
            run_inputs.load();
            rmcs::EngineOptions opts;
            opts.horizon = horizon >= 0 ? horizon : run_inputs.config.horizon;
            opts.policy = policy == "strict" ? rmcs::StepPolicy::ErrorIfAmbiguous
                                             : rmcs::StepPolicy::First;
            if (log >= LogLevel::Info)
                std::cerr << "running " << run_inputs.trace.size() << " steps over "
                          << run_inputs.config.system.contexts.size() << " contexts\n";
            rmcs::Run result;
            rmcs::RMCS current = run_inputs.config.system;
            for (std::size_t t = 0; t < run_inputs.trace.size(); ++t) {
                auto eq = rmcs::step(current, run_inputs.trace[t], t, opts);
                if (log >= LogLevel::Debug) {
                    std::cerr << "step " << t;
                    for (std::size_t i = 0; i < eq.state.size(); ++i)
                        std::cerr << " |" << current.contexts[i].name
                                  << "|=" << eq.state[i].size();
                    std::cerr << "\n";
                }
                current.kbs = eq.kbs;
                result.push_back(std::move(eq));
            }
            std::cout << rmcs::format_run(run_inputs.config.system, result);
            return 0;
        }

        // query
        query_inputs.load();
        rmcs::EngineOptions opts;
        opts.horizon = horizon >= 0 ? horizon : query_inputs.config.horizon;
        rmcs::Query q;
        q.mode = mode == "exists" ? rmcs::QueryMode::Exists : rmcs::QueryMode::Forall;
        q.context = query_inputs.config.system.context_index(context_name);
        q.belief = rmcs::parse_belief(belief_text);
        q.trace = query_inputs.trace;
        auto result = rmcs::decide(q, query_inputs.config.system, max_runs, opts);
        std::cout << (result.value ? "true" : "false") << "\n";
        std::cout << "runs " << result.run_count << "\n";
        if (result.witness)
            std::cout << "witness run " << result.witness->first << " step "
                      << result.witness->second << "\n";
        if (result.no_runs)
            std::cout << "no runs (vacuous)\n";
        return result.value ? 0 : 1;
    } catch (const rmcs::NoEquilibriumError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rmcs::AmbiguousError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
