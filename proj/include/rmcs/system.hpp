#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rmcs/bridge.hpp"
#include "rmcs/logic.hpp"
#include "rmcs/management.hpp"
#include "rmcs/observation.hpp"

namespace rmcs {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::string name;
    std::shared_ptr<const Logic> logic;
    ManagementConfig mng;
};

/// A reactive multi-context system: contexts, bridge schemas, knowledge
/// bases, and sensors, all index-aligned.
struct RMCS {
    std::vector<Context> contexts;
    std::vector<std::vector<BridgeSchema>> bridge;
    std::vector<KnowledgeBase> kbs;
    std::vector<Sensor> sensors;
    VariableDomains global_domains;

    std::size_t context_index(std::string_view name) const {
        for (std::size_t i = 0; i < contexts.size(); ++i)
            if (contexts[i].name == name)
                return i;
        throw ConfigError("unknown context: " + std::string(name));
    }

    std::size_t sensor_index(std::string_view name) const {
        for (std::size_t i = 0; i < sensors.size(); ++i)
            if (sensors[i].name == name)
                return i;
        throw ConfigError("unknown sensor: " + std::string(name));
    }

    std::map<std::string, std::size_t> context_ids() const {
        std::map<std::string, std::size_t> ids;
        for (std::size_t i = 0; i < contexts.size(); ++i)
            ids[contexts[i].name] = i;
        return ids;
    }

    /// Index of the time sensor, if the system declares one.
    std::optional<std::size_t> time_sensor() const {
        for (std::size_t i = 0; i < sensors.size(); ++i)
            if (sensors[i].is_time)
                return i;
        return std::nullopt;
    }

    void validate() const {
        if (contexts.size() != bridge.size() || contexts.size() != kbs.size())
            throw ConfigError("contexts, bridge rules, and KBs must have equal arity");
        std::size_t time_sensors = 0;
        for (const auto& s : sensors)
            if (s.is_time)
                ++time_sensors;
        if (time_sensors > 1)
            throw ConfigError("at most one time sensor per system");
    }
};

} // namespace rmcs
