#pragma once

#include <trapdoor/common.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trapdoor {

enum class EventKind { Transfer, Swap, Sync, Mint, Burn };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// One log entry of a token or pool contract. Fields not used by a kind stay
/// zero/empty and are omitted from the JSON-lines form.
///
///   Transfer  contract=token, from, to, amount
///   Swap      contract=pool, token0/token1, from=trader, to=recipient,
///             amount{0,1}_in, amount{0,1}_out
///   Sync      contract=pool, token0/token1, reserve0, reserve1
///   Mint      contract=pool, token0/token1, from=provider, amount=LP minted,
///             amount{0,1}_in = deposited reserves
///   Burn      contract=pool, token0/token1, from=provider, to=recipient,
///             amount=LP burned, amount{0,1}_out = withdrawn reserves
struct EventRecord {
    EventKind kind = EventKind::Transfer;
    std::uint64_t block = 0;
    std::uint32_t log_index = 0;
    Address contract;
    Address from;
    Address to;
    Amount amount = 0;
    Address token0;
    Address token1;
    Amount amount0_in = 0;
    Amount amount1_in = 0;
    Amount amount0_out = 0;
    Amount amount1_out = 0;
    Amount reserve0 = 0;
    Amount reserve1 = 0;

    bool operator==(const EventRecord&) const = default;
};

/// True when (block, log_index) is strictly increasing along the stream.
bool is_ordered(std::span<const EventRecord> events);

void to_json(nlohmann::json& j, const EventRecord& e);
void from_json(const nlohmann::json& j, EventRecord& e);

void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events);
/// Throws trapdoor::Error on malformed lines or unknown kinds.
std::vector<EventRecord> read_events_jsonl(std::istream& in);

} // namespace trapdoor
