#pragma once

#include <trapdoor/semantic/summary.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trapdoor::semantic {

enum class Category { EP, ES, AL, FM, IC };
enum class Via { backdoor, external_call, constructor_only };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);
std::string_view to_string(Via v);
std::optional<Via> parse_via(std::string_view s);

struct Evidence {
    NodeId end_node_id = 0;  // for FM: the amount-update assignment
    std::string mutator;     // backdoor function name or low_level_call node id
    Via via = Via::backdoor;

    bool operator==(const Evidence&) const = default;
};

struct Indicator {
    Category category = Category::EP;
    std::string identifier;
    Evidence evidence;

    bool operator==(const Indicator&) const = default;
};

struct DetectorConfig {
    /// How many conditional nests a switch may sit from an end node (ES).
    int switch_distance = 2;
};

/// One indicator per (category, identifier), sorted by that pair.
std::vector<Indicator> detect_indicators(const SemanticSummary& summary,
                                         const DetectorConfig& config = {});

void to_json(nlohmann::json& j, const Indicator& ind);
void from_json(const nlohmann::json& j, Indicator& ind);

} // namespace trapdoor::semantic
