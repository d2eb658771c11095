#pragma once

// Deterministic token behaviour machine: ERC-20 style balances plus the five
// trap families, with error traces that name the identifier that stopped a
// transfer.

#include <trapdoor/common.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace trapdoor::tokenvm {

enum class Concealment {
    blank_error,
    single_char_name,
    misleading_name,
    dummy_function,
    incomplete_renouncement,
    numeric_exception,
};

enum class Placement { inline_check, via_modifier, via_nested_function, via_external_contract };

enum class ListKind { blacklist, whitelist };

/// Which transfers a suspension or limit applies to. Buys are transfers out
/// of the pool.
enum class TrapScope { non_buys, all };

std::string_view to_string(Concealment c);
std::optional<Concealment> parse_concealment(std::string_view s);
std::string_view to_string(Placement p);  // "inline", "via_modifier", ...
std::optional<Placement> parse_placement(std::string_view s);
std::string_view to_string(ListKind k);
std::optional<ListKind> parse_list_kind(std::string_view s);
std::string_view to_string(TrapScope s);
std::optional<TrapScope> parse_trap_scope(std::string_view s);

/// Checked on sells only: a whitelist requires the seller to be a member, a
/// blacklist requires it not to be.
struct PermissionTrap {
    ListKind list_kind = ListKind::whitelist;
    std::set<Address> members;
    std::string identifier;
    bool has_setter = false;

    bool operator==(const PermissionTrap&) const = default;
};

struct SuspensionTrap {
    bool switch_value = false;  // true = trading suspended
    std::string identifier;
    bool has_setter = false;
    TrapScope scope = TrapScope::non_buys;

    bool operator==(const SuspensionTrap&) const = default;
};

struct AmountLimitTrap {
    Amount limit = 0;
    std::string identifier;
    bool has_setter = false;
    TrapScope scope = TrapScope::all;

    bool operator==(const AmountLimitTrap&) const = default;
};

/// Basis points; 10000 is 100%. Values above 10000 overflow at transfer time.
struct FeeTrap {
    std::uint32_t buy_fee_bps = 0;
    std::uint32_t sell_fee_bps = 0;
    std::string identifier;
    bool has_setter = false;

    bool operator==(const FeeTrap&) const = default;
};

/// On a sell, re-enters `reentry_function` moving tokens from the token
/// contract itself to the pool.
struct CallbackTrap {
    bool enabled = false;
    std::string identifier;
    std::string reentry_function = "_transfer";

    bool operator==(const CallbackTrap&) const = default;
};

struct TrapConfig {
    std::optional<PermissionTrap> permission;
    std::optional<SuspensionTrap> suspension;
    std::optional<AmountLimitTrap> amount_limit;
    std::optional<FeeTrap> fee;
    std::optional<CallbackTrap> callback;

    bool empty() const {
        return !permission && !suspension && !amount_limit && !fee && !callback;
    }
    bool operator==(const TrapConfig&) const = default;
};

struct TokenSpec {
    Address id;
    std::string name;
    std::string symbol;
    int decimals = 18;
    Amount total_supply = 0;
    Address owner;
    TrapConfig traps;
    std::set<Concealment> concealment;
    Placement placement = Placement::inline_check;
    int nesting_depth = 1;

    /// Function names along the trap path: the modifier name, the nested
    /// helper chain, or the external function name, depending on placement.
    std::vector<std::string> helper_names;
    std::string external_contract = "TransferGuard";
    /// Co-owner that keeps setter rights after renounce under
    /// incomplete_renouncement.
    Address hidden_controller;

    bool has(Concealment c) const { return concealment.count(c) != 0; }
    bool operator==(const TokenSpec&) const = default;
};

/// Throws Error describing the first broken invariant.
void validate(const TokenSpec& spec);

struct Frame {
    std::string function_name;
    int site_id = 0;

    bool operator==(const Frame&) const = default;
};

enum class CauseKind { assertion_failed, numeric_overflow, reverted };

std::string_view to_string(CauseKind k);
std::optional<CauseKind> parse_cause_kind(std::string_view s);

struct ErrorTrace {
    std::vector<Frame> frames;  // outermost first
    struct Cause {
        CauseKind kind = CauseKind::reverted;
        std::string identifier;  // empty under blank_error
        std::string message;

        bool operator==(const Cause&) const = default;
    } cause;

    bool operator==(const ErrorTrace&) const = default;
};

struct TransferResult {
    bool ok = false;
    Amount delivered = 0;
    Amount fee = 0;
    std::string fee_identifier;  // set when a fee trap charged, unless blank_error
    std::optional<ErrorTrace> trace;
};

/// Receives charged fees, so balances plus the sink always sum to supply.
extern const Address kBurnSink;

struct TokenInstance {
    TokenSpec spec;
    std::map<Address, Amount> balances;
    TrapConfig live;  // current trap values; starts as spec.traps
    Address owner;    // zero after renounce
    bool in_callback = false;

    Amount balance_of(const Address& a) const;
    /// Sum over all balances including kBurnSink.
    Amount total_balance() const;
};

TokenInstance deploy(const TokenSpec& spec);

/// Moves `amount` from `from` to `to`. Traps run in the order callback,
/// permission, suspension, limit, fee; the first failure rolls the whole
/// transfer back. The original owner is exempt from every trap.
TransferResult transfer(TokenInstance& token, const Address& from, const Address& to,
                        Amount amount, const Address& pool);

enum class BackdoorAction { set_list_member, set_switch, set_limit, set_fee };

std::string_view to_string(BackdoorAction a);
std::optional<BackdoorAction> parse_backdoor_action(std::string_view s);

struct BackdoorPayload {
    Address member;  // set_list_member
    bool flag = false;  // set_list_member: add/remove; set_switch: value
    Amount limit = 0;
    std::uint32_t buy_fee_bps = 0;
    std::uint32_t sell_fee_bps = 0;

    bool operator==(const BackdoorPayload&) const = default;
};

struct BackdoorCall {
    Address caller;
    BackdoorAction action = BackdoorAction::set_switch;
    BackdoorPayload payload;

    bool operator==(const BackdoorCall&) const = default;
};

enum class BackdoorStatus { applied, not_privileged, missing_trap, no_setter };

std::string_view to_string(BackdoorStatus s);

/// Applies a setter when the caller is the current owner, or the hidden
/// controller under incomplete_renouncement. State is untouched otherwise.
BackdoorStatus invoke_backdoor(TokenInstance& token, const Address& caller, BackdoorAction action,
                               const BackdoorPayload& payload);
inline BackdoorStatus invoke_backdoor(TokenInstance& token, const BackdoorCall& call) {
    return invoke_backdoor(token, call.caller, call.action, call.payload);
}

/// Owner gives up ownership. Returns false for any other caller.
bool renounce(TokenInstance& token, const Address& caller);

/// Identifiers of every configured trap, in evaluation order.
std::vector<std::string> trap_identifiers(const TrapConfig& traps);

void to_json(nlohmann::json& j, const TokenSpec& s);
void from_json(const nlohmann::json& j, TokenSpec& s);
void to_json(nlohmann::json& j, const TrapConfig& t);
void from_json(const nlohmann::json& j, TrapConfig& t);
void to_json(nlohmann::json& j, const ErrorTrace& t);
void from_json(const nlohmann::json& j, ErrorTrace& t);
void to_json(nlohmann::json& j, const BackdoorCall& c);
void from_json(const nlohmann::json& j, BackdoorCall& c);
void to_json(nlohmann::json& j, const TransferResult& r);
void to_json(nlohmann::json& j, const TokenInstance& t);
void from_json(const nlohmann::json& j, TokenInstance& t);

} // namespace trapdoor::tokenvm
