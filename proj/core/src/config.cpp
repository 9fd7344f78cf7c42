#include "teamtrace/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "teamtrace/errors.hpp"
#include "teamtrace/text.hpp"

namespace teamtrace {

namespace {

int parse_int(std::string_view key, std::string_view v) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config key '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    return out;
}

double parse_double(std::string_view key, std::string_view v) {
    try {
        std::size_t used = 0;
        double out = std::stod(std::string(v), &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
}

struct Field {
    std::function<void(SessionConfig&, std::string_view, std::string_view)> set;
    std::function<std::string(const SessionConfig&)> get;
};

std::string fmt(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

#define TT_INT(path)                                                                         \
    Field {                                                                                  \
        [](SessionConfig& c, std::string_view k, std::string_view v) { c.path = parse_int(k, v); }, \
            [](const SessionConfig& c) { return std::to_string(c.path); }                    \
    }
#define TT_DBL(path)                                                                            \
    Field {                                                                                     \
        [](SessionConfig& c, std::string_view k, std::string_view v) { c.path = parse_double(k, v); }, \
            [](const SessionConfig& c) { return fmt(c.path); }                                  \
    }

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> kFields = {
        {"context.window", TT_INT(context.window)},
        {"context.decay", TT_DBL(context.decay)},
        {"context.evict_threshold", TT_DBL(context.evict_threshold)},
        {"context.weight_trigger", TT_DBL(context.weight_trigger)},
        {"context.weight_synonym", TT_DBL(context.weight_synonym)},
        {"context.weight_neighbor", TT_DBL(context.weight_neighbor)},
        {"icn.theta_join", TT_DBL(icn.theta_join)},
        {"icn.theta_detail", TT_DBL(icn.theta_detail)},
        {"icn.candidates", TT_INT(icn.candidates)},
        {"metrics.backtrack_gap", TT_INT(metrics.backtrack_gap)},
        {"metrics.resolve_window", TT_INT(metrics.resolve_window)},
        {"metrics.repetition_similarity", TT_DBL(metrics.repetition_similarity)},
        {"metrics.productivity_window", TT_INT(metrics.productivity_window)},
        {"nature.problem_overlap", TT_DBL(nature.problem_overlap)},
        {"session.adjustment_cap", TT_INT(adjustment_cap)},
        {"session.eps", TT_INT(eps)},
    };
    return kFields;
}

#undef TT_INT
#undef TT_DBL

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

void apply_setting(SessionConfig& cfg, std::string_view key, std::string_view value) {
    auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->second.set(cfg, key, text::trim(value));
}

void validate(const SessionConfig& c) {
    require(c.context.window >= 1, "context.window must be >= 1");
    require(c.context.decay > 0.0 && c.context.decay <= 1.0, "context.decay must be in (0, 1]");
    require(c.context.evict_threshold >= 0.0 && c.context.evict_threshold < 1.0,
            "context.evict_threshold must be in [0, 1)");
    for (double w : {c.context.weight_trigger, c.context.weight_synonym, c.context.weight_neighbor})
        require(w >= 0.0 && w <= 1.0, "activation weights must be in [0, 1]");
    require(c.icn.theta_join >= 0.0 && c.icn.theta_join <= 1.0, "icn.theta_join must be in [0, 1]");
    require(c.icn.theta_detail >= 0.0 && c.icn.theta_detail <= 1.0, "icn.theta_detail must be in [0, 1]");
    require(c.icn.candidates >= 1, "icn.candidates must be >= 1");
    require(c.metrics.backtrack_gap >= 1, "metrics.backtrack_gap must be >= 1");
    require(c.metrics.resolve_window >= 0, "metrics.resolve_window must be >= 0");
    require(c.metrics.productivity_window >= 0, "metrics.productivity_window must be >= 0");
    require(c.metrics.repetition_similarity >= 0.0 && c.metrics.repetition_similarity <= 1.0,
            "metrics.repetition_similarity must be in [0, 1]");
    require(c.nature.problem_overlap >= 0.0 && c.nature.problem_overlap <= 1.0,
            "nature.problem_overlap must be in [0, 1]");
    require(c.adjustment_cap >= 1, "session.adjustment_cap must be >= 1");
    require(c.eps >= 0, "session.eps must be >= 0");
}

SessionConfig parse_config(std::string_view content, const std::string& source_name) {
    SessionConfig cfg;
    std::istringstream in{std::string(content)};
    std::string raw;
    std::string section;
    std::size_t n = 0;
    while (std::getline(in, raw)) {
        ++n;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        auto line = text::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(source_name, n, "unterminated section header");
            section = text::trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source_name, n, "expected 'key = value'");
        auto key = text::trim(std::string_view(line).substr(0, eq));
        auto value = text::trim(std::string_view(line).substr(eq + 1));
        auto dotted = key.find('.') == std::string::npos && !section.empty() ? section + "." + key : key;
        try {
            apply_setting(cfg, dotted, value);
        } catch (const ConfigError& e) {
            throw ParseError(source_name, n, e.what());
        }
    }
    validate(cfg);
    return cfg;
}

SessionConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::map<std::string, std::string> config_entries(const SessionConfig& cfg) {
    std::map<std::string, std::string> out;
    for (const auto& [k, f] : fields()) out.emplace(k, f.get(cfg));
    return out;
}

}  // namespace teamtrace
