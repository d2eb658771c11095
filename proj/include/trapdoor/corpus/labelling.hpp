#pragma once

#include <trapdoor/probe/probe.hpp>
#include <trapdoor/semantic/indicators.hpp>

#include <optional>
#include <span>
#include <string>

namespace trapdoor::corpus {

enum class Verdict { Trapdoor, NonTrapdoor, Unknown };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

/// Where the matched identifier was found.
enum class MatchSite { sell_cause, sell_frame, buy_cause, buy_frame, fee_metadata };

std::string_view to_string(MatchSite s);
std::optional<MatchSite> parse_match_site(std::string_view s);

struct Label {
    Verdict verdict = Verdict::Unknown;
    std::optional<semantic::Indicator> matched;
    std::optional<MatchSite> matched_in;

    bool operator==(const Label&) const = default;
};

/// NonTrapdoor when both legs pass and there are no indicators. Trapdoor when
/// the sell failed (or the buy failed and no sell ran) and an indicator's
/// identifier equals a name in the failure: the trace cause, then its frames
/// outermost first, then fee identifiers charged during the probe. Unknown
/// otherwise.
Label label_token(const probe::ProbeOutcome& probe, std::span<const semantic::Indicator> indicators);

void to_json(nlohmann::json& j, const Label& l);
void from_json(const nlohmann::json& j, Label& l);

} // namespace trapdoor::corpus
