#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace teamtrace {

using UtteranceId = std::int64_t;
using IcnId = std::int64_t;

// The eight mental images a solver maintains.
enum class MentalImageKind : std::uint8_t {
    problem,
    desired_solution,
    existing_solution,
    expected_behavior,
    observed_behavior,
    causality_of_differences,
    needed_solution_changes,
    needed_problem_changes,
};

inline constexpr std::array<MentalImageKind, 8> kAllImageKinds = {
    MentalImageKind::problem,
    MentalImageKind::desired_solution,
    MentalImageKind::existing_solution,
    MentalImageKind::expected_behavior,
    MentalImageKind::observed_behavior,
    MentalImageKind::causality_of_differences,
    MentalImageKind::needed_solution_changes,
    MentalImageKind::needed_problem_changes,
};

enum class NatureKind : std::uint8_t {
    problem_understanding,
    solving_highlevel,
    solving_detailing,
    comparison,
    pro_con_analysis,
    missing_fragment,
    localization,
    required_change,
    combination,
};

// Slot channel of an idea element.
enum class Channel : std::uint8_t { verb, target, output, modifier };

inline constexpr std::array<Channel, 4> kAllChannels = {Channel::verb, Channel::target, Channel::output,
                                                        Channel::modifier};

enum class EdgeKind : std::uint8_t { detailing, exploration, causality, generalization };

enum class DeltaMeaning : std::uint8_t { missing_processing, missing_requirement, wrong_output, surplus, none };

enum class Direction : std::uint8_t { top_down, bottom_up };

std::string_view to_string(MentalImageKind k);
std::string_view to_string(NatureKind k);
std::string_view to_string(Channel c);
std::string_view to_string(EdgeKind k);
std::string_view to_string(DeltaMeaning m);
std::string_view to_string(Direction d);

std::optional<MentalImageKind> image_kind_from_string(std::string_view s);
std::optional<NatureKind> nature_from_string(std::string_view s);
std::optional<Channel> channel_from_string(std::string_view s);
std::optional<EdgeKind> edge_kind_from_string(std::string_view s);
std::optional<DeltaMeaning> delta_meaning_from_string(std::string_view s);
std::optional<Direction> direction_from_string(std::string_view s);

}  // namespace teamtrace
