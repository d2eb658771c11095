#pragma once

#include <trapdoor/semantic/indicators.hpp>
#include <trapdoor/tokenvm/token.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace trapdoor::tokenvm {

/// Ground truth for one generated token.
struct SynthToken {
    TokenSpec spec;
    std::set<semantic::Category> categories;  // empty for benign tokens
    /// Owner renounces before arming (incomplete_renouncement tokens).
    bool renounce_before_arming = false;
    /// Setter calls that arm the traps once liquidity is in place.
    std::vector<BackdoorCall> arming;
    std::uint64_t stub_seed = 0;

    bool benign() const { return categories.empty(); }
    bool operator==(const SynthToken&) const = default;
};

/// Keys "benign", "EP", "ES", "AL", "FM", "IC".
using ClassCounts = std::map<std::string, std::size_t>;

/// "EP=2,benign=3" -> counts. Throws Error on unknown keys or bad numbers.
ClassCounts parse_class_counts(std::string_view text);

/// Tokens in class order benign, EP, ES, AL, FM, IC. Token i draws from its
/// own generator seeded by (seed, i), so output is stable per seed.
std::vector<SynthToken> synthesize_corpus(std::uint64_t seed, const ClassCounts& counts);

/// Renounces (when flagged) and replays the arming calls. Returns false if
/// any call was rejected.
bool arm(TokenInstance& token, const SynthToken& synth);

void to_json(nlohmann::json& j, const SynthToken& t);
void from_json(const nlohmann::json& j, SynthToken& t);

} // namespace trapdoor::tokenvm
