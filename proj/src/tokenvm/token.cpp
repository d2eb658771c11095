#include <trapdoor/tokenvm/token.hpp>

#include <array>

namespace trapdoor::tokenvm {

const Address kBurnSink{"0x000000000000000000000000000000000000dead"};

namespace {

__extension__ typedef unsigned __int128 u128;

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, 6> kConcealments{
    "blank_error",  "single_char_name",        "misleading_name",
    "dummy_function", "incomplete_renouncement", "numeric_exception"};
constexpr std::array<std::string_view, 4> kPlacements{"inline", "via_modifier", "via_nested_function",
                                                      "via_external_contract"};
constexpr std::array<std::string_view, 2> kListKinds{"blacklist", "whitelist"};
constexpr std::array<std::string_view, 2> kScopes{"non_buys", "all"};
constexpr std::array<std::string_view, 3> kCauses{"assertion_failed", "numeric_overflow", "reverted"};
constexpr std::array<std::string_view, 4> kActions{"set_list_member", "set_switch", "set_limit",
                                                   "set_fee"};
constexpr std::array<std::string_view, 4> kStatuses{"applied", "not_privileged", "missing_trap",
                                                    "no_setter"};

struct Failure {
    CauseKind kind;
    std::string identifier;
    std::string message;
};

class Executor {
public:
    Executor(TokenInstance& t, const Address& pool) : t_(t), pool_(pool) {}

    TransferResult run(const Address& from, const Address& to, Amount amount) {
        const auto snapshot = t_.balances;
        TransferResult r;
        if (auto f = apply(from, to, amount, r)) {
            t_.balances = snapshot;
            r = TransferResult{};
            r.trace = std::move(*f);
        }
        return r;
    }

private:
    const TokenSpec& spec() const { return t_.spec; }

    std::vector<Frame> base_frames() const {
        return {{"transfer", 0}, {"_transfer", 1}};
    }

    void push_placement(std::vector<Frame>& frames) const {
        const auto& names = spec().helper_names;
        auto add = [&](std::string name) {
            frames.push_back({std::move(name), static_cast<int>(frames.size())});
        };
        switch (spec().placement) {
        case Placement::inline_check: break;
        case Placement::via_modifier: add(names.empty() ? "checkTransfer" : names.front()); break;
        case Placement::via_nested_function:
            for (int d = 0; d < spec().nesting_depth; ++d) {
                add(static_cast<std::size_t>(d) < names.size() ? names[static_cast<std::size_t>(d)]
                                                               : "_check" + std::to_string(d + 1));
            }
            break;
        case Placement::via_external_contract:
            add(spec().external_contract);
            add(names.empty() ? "check" : names.front());
            break;
        }
    }

    std::string shown(const std::string& id) const {
        return spec().has(Concealment::blank_error) ? std::string{} : id;
    }

    ErrorTrace trace(Failure f) const {
        ErrorTrace tr;
        tr.frames = base_frames();
        push_placement(tr.frames);
        tr.cause = {f.kind, shown(f.identifier), std::move(f.message)};
        return tr;
    }

    std::optional<ErrorTrace> apply(const Address& from, const Address& to, Amount amount,
                                    TransferResult& r) {
        const Address& creator = spec().owner;
        const bool exempt = from == creator || to == creator;
        const bool sell = to == pool_;
        const bool buy = from == pool_;
        const auto& live = t_.live;

        if (live.callback && live.callback->enabled && sell && !exempt && !t_.in_callback) {
            t_.in_callback = true;
            Executor inner(t_, pool_);
            auto res = inner.run(spec().id, pool_, 0);
            t_.in_callback = false;
            if (!res.ok) {
                ErrorTrace tr;
                tr.frames = base_frames();
                tr.frames.push_back({live.callback->identifier, static_cast<int>(tr.frames.size())});
                const auto& inner_frames = res.trace->frames;
                for (std::size_t i = 1; i < inner_frames.size(); ++i) {
                    auto name = inner_frames[i].function_name;
                    if (i == 1) name = live.callback->reentry_function;
                    tr.frames.push_back({std::move(name), static_cast<int>(tr.frames.size())});
                }
                tr.cause = {res.trace->cause.kind, shown(live.callback->identifier),
                            "re-entrant transfer failed"};
                return tr;
            }
        }
        if (live.permission && sell && !exempt) {
            const auto& p = *live.permission;
            const bool member = p.members.count(from) != 0;
            if (p.list_kind == ListKind::whitelist ? !member : member) {
                return trace({CauseKind::assertion_failed, p.identifier, "sender not permitted"});
            }
        }
        if (live.suspension && live.suspension->switch_value && !exempt &&
            !(buy && live.suspension->scope == TrapScope::non_buys)) {
            return trace({CauseKind::assertion_failed, live.suspension->identifier, "trading suspended"});
        }
        if (live.amount_limit && amount > live.amount_limit->limit && from != creator &&
            !(buy && live.amount_limit->scope == TrapScope::non_buys)) {
            return trace({CauseKind::assertion_failed, live.amount_limit->identifier,
                          "amount exceeds limit"});
        }
        if (t_.balance_of(from) < amount) {
            ErrorTrace tr;
            tr.frames = base_frames();
            tr.cause = {CauseKind::reverted, "", "transfer amount exceeds balance"};
            return tr;
        }
        Amount fee = 0;
        if (live.fee && !exempt && (sell || buy)) {
            const std::uint32_t bps = sell ? live.fee->sell_fee_bps : live.fee->buy_fee_bps;
            if (bps > 10000) {
                return trace({CauseKind::numeric_overflow, live.fee->identifier,
                              "arithmetic underflow in fee deduction"});
            }
            fee = static_cast<Amount>(static_cast<u128>(amount) * bps / 10000);
            if (bps > 0) r.fee_identifier = shown(live.fee->identifier);
        }
        t_.balances[from] -= amount;
        if (t_.balances[from] == 0) t_.balances.erase(from);
        if (amount - fee > 0) t_.balances[to] += amount - fee;
        if (fee > 0) t_.balances[kBurnSink] += fee;
        r.ok = true;
        r.delivered = amount - fee;
        r.fee = fee;
        return std::nullopt;
    }

    TokenInstance& t_;
    const Address& pool_;
};

void check_identifier(const std::string& id, const char* what) {
    if (id.empty()) throw Error(std::string(what) + " trap needs an identifier");
}

} // namespace

std::string_view to_string(Concealment c) { return kConcealments[static_cast<std::size_t>(c)]; }
std::optional<Concealment> parse_concealment(std::string_view s) {
    return lookup<Concealment>(kConcealments, s);
}
std::string_view to_string(Placement p) { return kPlacements[static_cast<std::size_t>(p)]; }
std::optional<Placement> parse_placement(std::string_view s) { return lookup<Placement>(kPlacements, s); }
std::string_view to_string(ListKind k) { return kListKinds[static_cast<std::size_t>(k)]; }
std::optional<ListKind> parse_list_kind(std::string_view s) { return lookup<ListKind>(kListKinds, s); }
std::string_view to_string(TrapScope s) { return kScopes[static_cast<std::size_t>(s)]; }
std::optional<TrapScope> parse_trap_scope(std::string_view s) { return lookup<TrapScope>(kScopes, s); }
std::string_view to_string(CauseKind k) { return kCauses[static_cast<std::size_t>(k)]; }
std::optional<CauseKind> parse_cause_kind(std::string_view s) { return lookup<CauseKind>(kCauses, s); }
std::string_view to_string(BackdoorAction a) { return kActions[static_cast<std::size_t>(a)]; }
std::optional<BackdoorAction> parse_backdoor_action(std::string_view s) {
    return lookup<BackdoorAction>(kActions, s);
}
std::string_view to_string(BackdoorStatus s) { return kStatuses[static_cast<std::size_t>(s)]; }

void validate(const TokenSpec& s) {
    if (s.id.empty()) throw Error("token id is empty");
    if (s.owner.empty()) throw Error("token owner is empty");
    if (s.total_supply == 0) throw Error("total_supply must be positive");
    if (s.nesting_depth < 1) throw Error("nesting_depth must be at least 1");
    if (s.decimals < 0 || s.decimals > 77) throw Error("decimals out of range");
    const auto& t = s.traps;
    if (t.permission) check_identifier(t.permission->identifier, "permission");
    if (t.suspension) check_identifier(t.suspension->identifier, "suspension");
    if (t.amount_limit) check_identifier(t.amount_limit->identifier, "amount_limit");
    if (t.fee) {
        check_identifier(t.fee->identifier, "fee");
        if (t.fee->buy_fee_bps > 20000 || t.fee->sell_fee_bps > 20000) {
            throw Error("fee basis points above 20000");
        }
    }
    if (t.callback) {
        check_identifier(t.callback->identifier, "callback");
        if (t.callback->reentry_function.empty()) throw Error("callback needs a reentry function");
    }
    if (s.has(Concealment::incomplete_renouncement) && s.hidden_controller.empty()) {
        throw Error("incomplete_renouncement needs a hidden controller");
    }
}

Amount TokenInstance::balance_of(const Address& a) const {
    auto it = balances.find(a);
    return it == balances.end() ? 0 : it->second;
}

Amount TokenInstance::total_balance() const {
    Amount s = 0;
    for (const auto& [_, b] : balances) s += b;
    return s;
}

TokenInstance deploy(const TokenSpec& spec) {
    validate(spec);
    TokenInstance t;
    t.spec = spec;
    t.balances[spec.owner] = spec.total_supply;
    t.live = spec.traps;
    t.owner = spec.owner;
    return t;
}

TransferResult transfer(TokenInstance& token, const Address& from, const Address& to,
                        Amount amount, const Address& pool) {
    return Executor(token, pool).run(from, to, amount);
}

BackdoorStatus invoke_backdoor(TokenInstance& token, const Address& caller, BackdoorAction action,
                               const BackdoorPayload& payload) {
    auto& live = token.live;
    bool has_setter = false;
    switch (action) {
    case BackdoorAction::set_list_member:
        if (!live.permission) return BackdoorStatus::missing_trap;
        has_setter = live.permission->has_setter;
        break;
    case BackdoorAction::set_switch:
        if (!live.suspension) return BackdoorStatus::missing_trap;
        has_setter = live.suspension->has_setter;
        break;
    case BackdoorAction::set_limit:
        if (!live.amount_limit) return BackdoorStatus::missing_trap;
        has_setter = live.amount_limit->has_setter;
        break;
    case BackdoorAction::set_fee:
        if (!live.fee) return BackdoorStatus::missing_trap;
        has_setter = live.fee->has_setter;
        break;
    }
    if (!has_setter) return BackdoorStatus::no_setter;
    const bool owner = !caller.empty() && caller == token.owner && token.owner != kZeroAddress;
    const bool hidden = token.spec.has(Concealment::incomplete_renouncement) &&
                        !token.spec.hidden_controller.empty() &&
                        caller == token.spec.hidden_controller;
    if (!owner && !hidden) return BackdoorStatus::not_privileged;

    switch (action) {
    case BackdoorAction::set_list_member:
        if (payload.flag) {
            live.permission->members.insert(payload.member);
        } else {
            live.permission->members.erase(payload.member);
        }
        break;
    case BackdoorAction::set_switch: live.suspension->switch_value = payload.flag; break;
    case BackdoorAction::set_limit: live.amount_limit->limit = payload.limit; break;
    case BackdoorAction::set_fee:
        live.fee->buy_fee_bps = payload.buy_fee_bps;
        live.fee->sell_fee_bps = payload.sell_fee_bps;
        break;
    }
    return BackdoorStatus::applied;
}

bool renounce(TokenInstance& token, const Address& caller) {
    if (caller.empty() || caller != token.owner) return false;
    token.owner = kZeroAddress;
    return true;
}

std::vector<std::string> trap_identifiers(const TrapConfig& t) {
    std::vector<std::string> out;
    if (t.callback) out.push_back(t.callback->identifier);
    if (t.permission) out.push_back(t.permission->identifier);
    if (t.suspension) out.push_back(t.suspension->identifier);
    if (t.amount_limit) out.push_back(t.amount_limit->identifier);
    if (t.fee) out.push_back(t.fee->identifier);
    return out;
}

} // namespace trapdoor::tokenvm
