#include <trapdoor/corpus/records.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace trapdoor::corpus {

namespace {

void put_optional(nlohmann::json& j, const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
}

std::optional<std::string> get_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

} // namespace

void to_json(nlohmann::json& j, const TokenRecord& r) {
    nlohmann::json paths = nlohmann::json::object();
    put_optional(paths, "ast", r.paths.ast);
    put_optional(paths, "bytecode", r.paths.bytecode);
    put_optional(paths, "events", r.paths.events);
    put_optional(paths, "snapshot", r.paths.snapshot);
    nlohmann::json pools = nlohmann::json::array();
    for (const auto& p : r.pools) pools.push_back({{"pool_id", p.pool_id}, {"paired_token", p.paired_token}});
    j = {{"token_id", r.token_id},
         {"name", r.name},
         {"symbol", r.symbol},
         {"creator", r.creator},
         {"creation_block", r.creation_block},
         {"has_source", r.has_source},
         {"paths", paths},
         {"pools", pools}};
}

void from_json(const nlohmann::json& j, TokenRecord& r) {
    r = {};
    r.token_id = j.at("token_id").get<Address>();
    r.name = j.value("name", "");
    r.symbol = j.value("symbol", "");
    r.creator = j.value("creator", Address{});
    const auto& block = j.value("creation_block", nlohmann::json(0));
    if (!block.is_number_unsigned() && !(block.is_number_integer() && block.get<std::int64_t>() >= 0)) {
        throw Error("creation_block must be a non-negative integer");
    }
    r.creation_block = block.get<std::uint64_t>();
    r.has_source = j.value("has_source", false);
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        r.paths.ast = get_optional(p, "ast");
        r.paths.bytecode = get_optional(p, "bytecode");
        r.paths.events = get_optional(p, "events");
        r.paths.snapshot = get_optional(p, "snapshot");
    }
    for (const auto& p : j.value("pools", nlohmann::json::array())) {
        r.pools.push_back({p.at("pool_id").get<Address>(), p.at("paired_token").get<Address>()});
    }
}

std::vector<TokenRecord> read_manifest(std::istream& in) {
    std::vector<TokenRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<TokenRecord>());
        } catch (const std::exception& e) {
            throw Error("manifest line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

void write_manifest(std::ostream& out, std::span<const TokenRecord> records) {
    for (const auto& r : records) out << nlohmann::json(r).dump() << '\n';
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
    std::filesystem::path p(path);
    return p.is_absolute() ? p : base / p;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void to_json(nlohmann::json& j, const HighValueToken& t) {
    j = {{"token_id", t.token_id},
         {"name", t.name},
         {"symbol", t.symbol},
         {"market_cap_usd", t.market_cap_usd},
         {"pool_count", t.pool_count}};
}

void from_json(const nlohmann::json& j, HighValueToken& t) {
    t.token_id = j.at("token_id").get<Address>();
    t.name = j.value("name", "");
    t.symbol = j.value("symbol", "");
    t.market_cap_usd = j.value("market_cap_usd", 0.0);
    t.pool_count = j.value("pool_count", std::uint64_t{0});
}

std::vector<HighValueToken> read_high_value(std::istream& in) {
    try {
        return nlohmann::json::parse(in).get<std::vector<HighValueToken>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("high-value list: ") + e.what());
    }
}

TradeStats trade_stats(const TokenRecord& record, std::span<const EventRecord> events,
                       std::span<const HighValueToken> high_value) {
    TradeStats s;
    for (const auto& p : record.pools) {
        const bool hv = std::any_of(high_value.begin(), high_value.end(), [&](const HighValueToken& t) {
            return t.token_id == p.paired_token && t.qualifies();
        });
        s.paired_with_high_value = s.paired_with_high_value || hv;
    }
    std::optional<std::uint64_t> first, last;
    for (const auto& e : events) {
        const auto pool = std::find_if(record.pools.begin(), record.pools.end(),
                                       [&](const PoolRef& p) { return p.pool_id == e.contract; });
        if (pool == record.pools.end()) continue;
        if (!first || e.block < *first) first = e.block;
        if (!last || e.block > *last) last = e.block;
        if (e.kind != EventKind::Swap) continue;
        const bool token_is_0 = e.token0 == record.token_id;
        const Amount out = token_is_0 ? e.amount0_out : e.amount1_out;
        const Amount in = token_is_0 ? e.amount0_in : e.amount1_in;
        if (out > 0) s.buyers.insert(e.to.empty() ? e.from : e.to);
        if (in > 0) s.sellers.insert(e.from);
    }
    if (first) s.listed_blocks = *last - *first;
    return s;
}

bool is_suspicious(const TradeStats& stats, const SuspicionConfig& config) {
    return stats.paired_with_high_value && stats.sellers.size() <= config.max_sellers &&
           stats.buyers.size() >= config.min_buyers && stats.listed_blocks >= config.min_listing_blocks;
}

} // namespace trapdoor::corpus
