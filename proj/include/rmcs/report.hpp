#pragma once

#include <sstream>
#include <string>

#include "rmcs/engine.hpp"
#include "rmcs/system.hpp"

namespace rmcs {

inline std::string format_step(const RMCS& system, const FullEquilibrium& eq, std::size_t step) {
    std::ostringstream out;
    out << "step " << step << "\n";
    for (std::size_t i = 0; i < system.contexts.size(); ++i) {
        out << "  belief " << system.contexts[i].name << ":";
        bool first = true;
        for (const auto& b : eq.state[i]) {
            out << (first ? " " : ", ") << b.str();
            first = false;
        }
        out << "\n";
    }
    for (std::size_t i = 0; i < system.contexts.size(); ++i) {
        out << "  kb " << system.contexts[i].name << ":";
        bool first = true;
        for (const auto& e : eq.kbs[i]) {
            out << (first ? " " : "; ") << e.str();
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

inline std::string format_run(const RMCS& system, const Run& run) {
    std::string out;
    for (std::size_t k = 0; k < run.size(); ++k)
        out += format_step(system, run[k], k);
    return out;
}

} // namespace rmcs
