#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace teamtrace {

struct ContextConfig {
    int window = 5;                 // immediate-context capacity, in ideas
    double decay = 0.7;             // multiplier per incoming idea
    double evict_threshold = 0.1;
    double weight_trigger = 1.0;
    double weight_synonym = 0.8;
    double weight_neighbor = 0.4;

    bool operator==(const ContextConfig&) const = default;
};

struct Thresholds {
    double theta_join = 0.5;
    double theta_detail = 0.3;
    int candidates = 8;             // top-K medium-tier candidates

    bool operator==(const Thresholds&) const = default;
};

struct MetricsConfig {
    int backtrack_gap = 3;
    int resolve_window = 3;
    double repetition_similarity = 0.9;
    int productivity_window = 2;

    bool operator==(const MetricsConfig&) const = default;
};

struct NatureConfig {
    double problem_overlap = 0.6;

    bool operator==(const NatureConfig&) const = default;
};

struct SessionConfig {
    ContextConfig context;
    Thresholds icn;
    MetricsConfig metrics;
    NatureConfig nature;
    int adjustment_cap = 3;
    int eps = 0;                    // convergence tolerance, in delta elements

    bool operator==(const SessionConfig&) const = default;
};

// Sets one dotted key ("icn.theta_join"); throws ConfigError on unknown keys
// or unparsable values. Does not validate ranges.
void apply_setting(SessionConfig& cfg, std::string_view key, std::string_view value);

// Throws ConfigError when a value is out of range.
void validate(const SessionConfig& cfg);

// Sectioned key-value text: "[icn]\ntheta_join = 0.5". Flat dotted keys are
// accepted outside sections too.
SessionConfig parse_config(std::string_view content, const std::string& source_name = "<config>");
SessionConfig load_config(const std::filesystem::path& path);

// Every key with its current value, dotted names, sorted.
std::map<std::string, std::string> config_entries(const SessionConfig& cfg);

}  // namespace teamtrace
