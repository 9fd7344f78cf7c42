#include "teamtrace/types.hpp"

#include <algorithm>

namespace teamtrace {

namespace {

constexpr std::array<std::string_view, 8> kImageNames = {
    "problem",           "desired_solution",         "existing_solution",       "expected_behavior",
    "observed_behavior", "causality_of_differences", "needed_solution_changes", "needed_problem_changes",
};
constexpr std::array<std::string_view, 9> kNatureNames = {
    "problem_understanding", "solving_highlevel", "solving_detailing", "comparison",  "pro_con_analysis",
    "missing_fragment",      "localization",      "required_change",   "combination",
};
constexpr std::array<std::string_view, 4> kChannelNames = {"verb", "target", "output", "modifier"};
constexpr std::array<std::string_view, 4> kEdgeNames = {"detailing", "exploration", "causality", "generalization"};
constexpr std::array<std::string_view, 5> kMeaningNames = {"missing_processing", "missing_requirement",
                                                           "wrong_output", "surplus", "none"};
constexpr std::array<std::string_view, 2> kDirectionNames = {"top_down", "bottom_up"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) return std::nullopt;
    return static_cast<E>(it - names.begin());
}

}  // namespace

std::string_view to_string(MentalImageKind k) { return kImageNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(NatureKind k) { return kNatureNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Channel c) { return kChannelNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(EdgeKind k) { return kEdgeNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(DeltaMeaning m) { return kMeaningNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }

std::optional<MentalImageKind> image_kind_from_string(std::string_view s) {
    return lookup<MentalImageKind>(kImageNames, s);
}
std::optional<NatureKind> nature_from_string(std::string_view s) { return lookup<NatureKind>(kNatureNames, s); }
std::optional<Channel> channel_from_string(std::string_view s) { return lookup<Channel>(kChannelNames, s); }
std::optional<EdgeKind> edge_kind_from_string(std::string_view s) { return lookup<EdgeKind>(kEdgeNames, s); }
std::optional<DeltaMeaning> delta_meaning_from_string(std::string_view s) {
    return lookup<DeltaMeaning>(kMeaningNames, s);
}
std::optional<Direction> direction_from_string(std::string_view s) {
    return lookup<Direction>(kDirectionNames, s);
}

}  // namespace teamtrace
