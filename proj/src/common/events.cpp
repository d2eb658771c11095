#include <trapdoor/events.hpp>

#include <istream>
#include <ostream>
#include <string>

namespace trapdoor {

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::Transfer: return "Transfer";
    case EventKind::Swap: return "Swap";
    case EventKind::Sync: return "Sync";
    case EventKind::Mint: return "Mint";
    case EventKind::Burn: return "Burn";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (auto k : {EventKind::Transfer, EventKind::Swap, EventKind::Sync, EventKind::Mint,
                   EventKind::Burn}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

bool is_ordered(std::span<const EventRecord> events) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& a = events[i - 1];
        const auto& b = events[i];
        if (b.block < a.block || (b.block == a.block && b.log_index <= a.log_index)) {
            return false;
        }
    }
    return true;
}

void to_json(nlohmann::json& j, const EventRecord& e) {
    j = nlohmann::json{{"kind", to_string(e.kind)},
                       {"block", e.block},
                       {"log_index", e.log_index},
                       {"contract", e.contract}};
    auto pool_tokens = [&] {
        j["token0"] = e.token0;
        j["token1"] = e.token1;
    };
    switch (e.kind) {
    case EventKind::Transfer:
        j["from"] = e.from;
        j["to"] = e.to;
        j["amount"] = e.amount;
        break;
    case EventKind::Swap:
        pool_tokens();
        j["from"] = e.from;
        j["to"] = e.to;
        j["amount0_in"] = e.amount0_in;
        j["amount1_in"] = e.amount1_in;
        j["amount0_out"] = e.amount0_out;
        j["amount1_out"] = e.amount1_out;
        break;
    case EventKind::Sync:
        pool_tokens();
        j["reserve0"] = e.reserve0;
        j["reserve1"] = e.reserve1;
        break;
    case EventKind::Mint:
        pool_tokens();
        j["from"] = e.from;
        j["amount"] = e.amount;
        j["amount0_in"] = e.amount0_in;
        j["amount1_in"] = e.amount1_in;
        break;
    case EventKind::Burn:
        pool_tokens();
        j["from"] = e.from;
        j["to"] = e.to;
        j["amount"] = e.amount;
        j["amount0_out"] = e.amount0_out;
        j["amount1_out"] = e.amount1_out;
        break;
    }
}

void from_json(const nlohmann::json& j, EventRecord& e) {
    const auto kind_text = j.at("kind").get<std::string>();
    const auto kind = parse_event_kind(kind_text);
    if (!kind) throw Error("unknown event kind: " + kind_text);
    e = EventRecord{};
    e.kind = *kind;
    e.block = j.at("block").get<std::uint64_t>();
    e.log_index = j.at("log_index").get<std::uint32_t>();
    e.contract = j.at("contract").get<Address>();
    auto opt_addr = [&](const char* key, Address& out) {
        if (auto it = j.find(key); it != j.end()) out = it->get<Address>();
    };
    auto opt_amount = [&](const char* key, Amount& out) {
        if (auto it = j.find(key); it != j.end()) out = it->get<Amount>();
    };
    opt_addr("from", e.from);
    opt_addr("to", e.to);
    opt_addr("token0", e.token0);
    opt_addr("token1", e.token1);
    opt_amount("amount", e.amount);
    opt_amount("amount0_in", e.amount0_in);
    opt_amount("amount1_in", e.amount1_in);
    opt_amount("amount0_out", e.amount0_out);
    opt_amount("amount1_out", e.amount1_out);
    opt_amount("reserve0", e.reserve0);
    opt_amount("reserve1", e.reserve1);
}

void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events) {
    for (const auto& e : events) out << nlohmann::json(e).dump() << '\n';
}

std::vector<EventRecord> read_events_jsonl(std::istream& in) {
    std::vector<EventRecord> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            events.push_back(nlohmann::json::parse(line).get<EventRecord>());
        } catch (const std::exception& ex) {
            throw Error("event log line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return events;
}

} // namespace trapdoor
