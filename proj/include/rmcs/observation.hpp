#pragma once

#include <set>
#include <string>
#include <vector>

#include "rmcs/term.hpp"

namespace rmcs {

struct SensorSignature {
    std::string name;
    std::size_t arity = 0;

    auto operator<=>(const SensorSignature&) const = default;
};

/// A sensor identified by its observation language. The language is either
/// the integers or a finite set of predicate signatures.
struct Sensor {
    std::string name;
    bool integers = false;
    std::vector<SensorSignature> signatures;
    bool is_time = false;
};

inline bool reading_in_language(const Sensor& sensor, const Term& datum) {
    if (sensor.integers)
        return datum.is_integer();
    for (const auto& sig : sensor.signatures)
        if (!datum.is_integer() && datum.name() == sig.name && datum.arity() == sig.arity)
            return true;
    return false;
}

/// One reading per sensor of the system.
struct Observation {
    std::vector<std::set<Term>> readings;

    bool operator==(const Observation&) const = default;
};

using ObservationTrace = std::vector<Observation>;

} // namespace rmcs
