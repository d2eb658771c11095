#include <trapdoor/corpus/analytics.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>

namespace trapdoor::corpus {

namespace {

__extension__ typedef __int128 i128;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::uint64_t lifetime(std::span<const EventRecord> token_events, std::uint64_t creation_block) {
    std::optional<std::uint64_t> last;
    for (const auto& e : token_events) {
        if (e.kind == EventKind::Transfer && (!last || e.block > *last)) last = e.block;
    }
    if (!last || *last < creation_block) return 0;
    return *last - creation_block;
}

std::vector<HistogramBin> histogram(std::span<const std::uint64_t> values, std::span<const std::uint64_t> edges) {
    if (edges.empty()) throw Error("histogram needs at least one edge");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) throw Error("histogram edges must increase");
    }
    std::vector<HistogramBin> bins;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        bins.push_back({edges[i], i + 1 < edges.size() ? edges[i + 1] : 0, 0});
    }
    for (auto v : values) {
        if (v < edges.front()) continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        ++bins[static_cast<std::size_t>(it - edges.begin()) - 1].count;
    }
    return bins;
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

std::string normalize_bytecode(std::string_view hex) {
    std::string out;
    out.reserve(hex.size());
    for (char c : hex) {
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    }
    out = lower(out);
    if (out.rfind("0x", 0) == 0) out.erase(0, 2);
    return out;
}

std::string normalize_source(std::string_view text) {
    std::string out;
    std::string line;
    auto flush = [&] {
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
        out += line;
        line.clear();
    };
    for (char c : text) {
        if (c == '\n') {
            flush();
            out.push_back('\n');
        } else {
            line.push_back(c);
        }
    }
    flush();
    return out;
}

std::vector<CloneGroup> clone_groups(std::span<const ArtifactDigest> items) {
    std::map<std::string, std::size_t> index;
    std::vector<CloneGroup> groups;
    std::vector<std::set<Address>> creators;
    for (const auto& it : items) {
        auto [pos, fresh] = index.emplace(it.digest, groups.size());
        if (fresh) {
            groups.push_back({it.digest, {}, 0});
            creators.emplace_back();
        }
        groups[pos->second].tokens.push_back(it.token_id);
        creators[pos->second].insert(it.creator);
    }
    for (std::size_t i = 0; i < groups.size(); ++i) groups[i].distinct_creators = creators[i].size();
    std::stable_sort(groups.begin(), groups.end(), [](const CloneGroup& a, const CloneGroup& b) {
        if (a.tokens.size() != b.tokens.size()) return a.tokens.size() > b.tokens.size();
        return a.digest < b.digest;
    });
    return groups;
}

std::vector<FakeMatch> fake_token_matches(std::span<const TokenRecord> records,
                                          std::span<const HighValueToken> high_value) {
    std::vector<FakeMatch> out;
    for (const auto& r : records) {
        const auto name = lower(r.name);
        const auto symbol = lower(r.symbol);
        for (const auto& hv : high_value) {
            if (hv.token_id == r.token_id) continue;
            FakeMatch m{r.token_id, hv.token_id, !name.empty() && name == lower(hv.name),
                        !symbol.empty() && symbol == lower(hv.symbol)};
            if (m.by_name || m.by_symbol) out.push_back(std::move(m));
        }
    }
    return out;
}

double profit_usd(std::span<const EventRecord> pool_events, const Address& high_value_token,
                  const std::map<Address, double>& prices) {
    const auto price = prices.find(high_value_token);
    if (price == prices.end()) throw Error("no price for " + high_value_token.str());
    i128 net = 0;
    for (const auto& e : pool_events) {
        if (e.kind != EventKind::Swap) continue;
        if (e.token0 == high_value_token) {
            net += static_cast<i128>(e.amount0_in) - static_cast<i128>(e.amount0_out);
        } else if (e.token1 == high_value_token) {
            net += static_cast<i128>(e.amount1_in) - static_cast<i128>(e.amount1_out);
        }
    }
    return static_cast<double>(net) * price->second;
}

void to_json(nlohmann::json& j, const CloneGroup& g) {
    j = {{"digest", g.digest}, {"tokens", g.tokens}, {"size", g.tokens.size()},
         {"distinct_creators", g.distinct_creators}};
}

void to_json(nlohmann::json& j, const FakeMatch& m) {
    j = {{"token_id", m.token_id}, {"high_value_id", m.high_value_id}, {"by_name", m.by_name},
         {"by_symbol", m.by_symbol}};
}

void to_json(nlohmann::json& j, const HistogramBin& b) {
    j = {{"lo", b.lo}, {"count", b.count}};
    j["hi"] = b.hi == 0 ? nlohmann::json(nullptr) : nlohmann::json(b.hi);
}

} // namespace trapdoor::corpus
