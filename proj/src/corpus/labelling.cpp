#include <trapdoor/corpus/labelling.hpp>

#include <algorithm>
#include <array>

namespace trapdoor::corpus {

namespace {

constexpr std::array<std::pair<Verdict, std::string_view>, 3> kVerdicts{{
    {Verdict::Trapdoor, "Trapdoor"},
    {Verdict::NonTrapdoor, "NonTrapdoor"},
    {Verdict::Unknown, "Unknown"},
}};

constexpr std::array<std::pair<MatchSite, std::string_view>, 5> kSites{{
    {MatchSite::sell_cause, "sell_cause"},
    {MatchSite::sell_frame, "sell_frame"},
    {MatchSite::buy_cause, "buy_cause"},
    {MatchSite::buy_frame, "buy_frame"},
    {MatchSite::fee_metadata, "fee_metadata"},
}};

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
    for (const auto& [e, s] : table) {
        if (e == v) return s;
    }
    return "?";
}

template <class E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
    for (const auto& [e, n] : table) {
        if (n == s) return e;
    }
    return std::nullopt;
}

const semantic::Indicator* find(std::span<const semantic::Indicator> indicators, const std::string& name) {
    if (name.empty()) return nullptr;
    for (const auto& ind : indicators) {
        if (ind.identifier == name) return &ind;
    }
    return nullptr;
}

} // namespace

std::string_view to_string(Verdict v) { return name_of(kVerdicts, v); }
std::optional<Verdict> parse_verdict(std::string_view s) { return value_of(kVerdicts, s); }
std::string_view to_string(MatchSite s) { return name_of(kSites, s); }
std::optional<MatchSite> parse_match_site(std::string_view s) { return value_of(kSites, s); }

Label label_token(const probe::ProbeOutcome& p, std::span<const semantic::Indicator> indicators) {
    Label out;
    const bool sell_passed = p.sell_attempted && p.sell_ok;
    if (p.buy_ok && sell_passed && indicators.empty()) {
        out.verdict = Verdict::NonTrapdoor;
        return out;
    }
    const bool sell_failed = p.sell_attempted ? !p.sell_ok : !p.buy_ok;
    if (!sell_failed) return out;

    // Candidate names in priority order.
    std::vector<std::pair<std::string, MatchSite>> names;
    auto add_trace = [&](const std::optional<tokenvm::ErrorTrace>& t, MatchSite cause, MatchSite frame) {
        if (!t) return;
        names.emplace_back(t->cause.identifier, cause);
        for (const auto& f : t->frames) names.emplace_back(f.function_name, frame);
    };
    if (p.sell_attempted) add_trace(p.sell_trace, MatchSite::sell_cause, MatchSite::sell_frame);
    if (!p.buy_ok) add_trace(p.buy_trace, MatchSite::buy_cause, MatchSite::buy_frame);
    for (const auto& f : p.fee_identifiers) names.emplace_back(f, MatchSite::fee_metadata);

    for (const auto& [name, site] : names) {
        if (const auto* ind = find(indicators, name)) {
            out.verdict = Verdict::Trapdoor;
            out.matched = *ind;
            out.matched_in = site;
            return out;
        }
    }
    return out;
}

void to_json(nlohmann::json& j, const Label& l) {
    j = {{"verdict", to_string(l.verdict)}};
    j["matched_indicator"] = l.matched ? nlohmann::json(*l.matched) : nlohmann::json(nullptr);
    j["matched_in"] = l.matched_in ? nlohmann::json(to_string(*l.matched_in)) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Label& l) {
    l = {};
    const auto v = parse_verdict(j.at("verdict").get<std::string>());
    if (!v) throw Error("unknown verdict " + j.at("verdict").dump());
    l.verdict = *v;
    if (j.contains("matched_indicator") && !j.at("matched_indicator").is_null()) {
        l.matched = j.at("matched_indicator").get<semantic::Indicator>();
    }
    if (j.contains("matched_in") && !j.at("matched_in").is_null()) {
        l.matched_in = parse_match_site(j.at("matched_in").get<std::string>());
    }
}

} // namespace trapdoor::corpus
