#include <trapdoor/tokenvm/contract_fixture.hpp>

#include <trapdoor/semantic/ast_builder.hpp>

#include <cctype>

namespace trapdoor::tokenvm {

namespace {

using semantic::AstBuilder;
using semantic::TypeTag;
using semantic::Visibility;
using Id = AstBuilder::Id;
using Ids = std::vector<Id>;

/// Owner and pair variable names inside the contract that runs the checks.
struct Scope {
    std::string owner;
    std::string pair;
    bool main = true;
};

class Writer {
public:
    Writer(const TokenSpec& s, const FixtureOptions& o) : s_(s), o_(o) {}

    nlohmann::json run() {
        main_contract();
        if (external() && o_.include_external_source) guard_contract();
        return b_.build();
    }

private:
    const TrapConfig& traps() const { return s_.traps; }
    bool external() const { return s_.placement == Placement::via_external_contract; }
    bool has_checks() const {
        return traps().permission || traps().suspension || traps().amount_limit;
    }
    bool has_fee() const { return traps().fee.has_value(); }
    bool blank() const { return s_.has(Concealment::blank_error); }
    std::string msg(const char* text) const { return blank() ? std::string{} : std::string(text); }

    std::string helper(std::size_t i, const char* fallback) const {
        if (i < s_.helper_names.size()) return s_.helper_names[i];
        return std::string(fallback) + (i ? std::to_string(i + 1) : "");
    }
    std::string guard_fn() const { return helper(0, "check"); }
    std::string llc_name() const { return s_.external_contract + "." + guard_fn(); }

    Id id(const std::string& n) { return b_.ident(n); }
    Id bin(const char* op, Id l, Id r) { return b_.binop(op, l, r); }
    Id eq(const std::string& a, const std::string& c) { return bin("==", id(a), id(c)); }
    Id ne(const std::string& a, const std::string& c) { return bin("!=", id(a), id(c)); }
    Id and_(Id a, Id c) { return bin("&&", a, c); }
    Id or_(Id a, Id c) { return bin("||", a, c); }
    Ids trade_params() {
        return {b_.param("from", TypeTag::Address), b_.param("to", TypeTag::Address),
                b_.param("amount", TypeTag::Uint)};
    }
    Ids trade_args() { return {id("from"), id("to"), id("amount")}; }

    Id not_owner(const Scope& sc) { return and_(ne("from", sc.owner), ne("to", sc.owner)); }

    // Trap checks over the names from/to/amount. ES uses the `if/revert`
    // form off the main contract's inline path.
    Ids checks(const Scope& sc) {
        Ids out;
        if (const auto& p = traps().permission) {
            Id member = b_.index(id(p->identifier), id("from"));
            Id cond = p->list_kind == ListKind::whitelist ? member : b_.unop("!", member);
            Id gate = and_(eq("to", sc.pair), ne("from", sc.owner));
            out.push_back(b_.if_(gate, b_.block({b_.require(cond, msg("sender not permitted"))})));
        }
        if (const auto& sw = traps().suspension) {
            Id gate = not_owner(sc);
            if (sw->scope == TrapScope::non_buys) gate = and_(ne("from", sc.pair), gate);
            Id check;
            if (s_.placement == Placement::inline_check || s_.placement == Placement::via_modifier) {
                check = b_.require(b_.unop("!", id(sw->identifier)), msg("trading is suspended"));
            } else {
                check = b_.if_(id(sw->identifier), b_.block({b_.revert(msg("trading is suspended"))}));
            }
            out.push_back(b_.if_(gate, b_.block({check})));
        }
        if (const auto& l = traps().amount_limit) {
            Id gate = ne("from", sc.owner);
            if (l->scope == TrapScope::non_buys) gate = and_(ne("from", sc.pair), gate);
            Id cond = bin("<=", id("amount"), id(l->identifier));
            out.push_back(b_.if_(gate, b_.block({b_.require(cond, msg("amount exceeds the max tx"))})));
        }
        return out;
    }

    Id fee_gate(const Scope& sc) {
        return and_(or_(eq("to", sc.pair), eq("from", sc.pair)), not_owner(sc));
    }
    Id fee_of_amount() {
        return bin("/", bin("*", id("amount"), id(traps().fee->identifier)), b_.literal("10000"));
    }

    // uint fee = 0; if (gate) { fee = amount * X / 10000; }
    Ids fee_local(const Scope& sc) {
        Id local = b_.local("fee", TypeTag::Uint, b_.literal("0"));
        Id upd = b_.if_(fee_gate(sc), b_.block({b_.assign(id("fee"), fee_of_amount())}));
        return {local, upd};
    }

    void onlyowner_modifier() {
        Id cond = bin("==", b_.msg_sender(), id("_owner"));
        if (s_.has(Concealment::incomplete_renouncement)) {
            cond = or_(cond, bin("==", b_.msg_sender(), id(dev_var())));
        }
        b_.modifier("onlyOwner", {}, b_.block({b_.require(cond, msg("caller is not the owner"))}));
    }

    std::string dev_var() const {
        return s_.has(Concealment::misleading_name) ? "_marketingWallet" : "_dev";
    }

    // Setters for the traps declared in the current contract.
    void setters(bool main) {
        auto guard = [&](Ids& mods, Ids& body) {
            if (main) {
                mods.push_back(b_.call("onlyOwner"));
            } else {
                body.insert(body.begin(),
                            b_.require(bin("==", b_.msg_sender(), id("owner")), msg("not owner")));
            }
        };
        auto simple = [&](const std::string& var, TypeTag tag) {
            Ids mods, body;
            Id p = b_.param("value", tag);
            body.push_back(b_.assign(id(var), id("value")));
            guard(mods, body);
            b_.function(setter_name(var), Visibility::External, {p}, mods, b_.block(body));
        };
        if (const auto& p = traps().permission; p && p->has_setter) {
            Ids mods, body;
            Id a = b_.param("account", TypeTag::Address);
            Id v = b_.param("value", TypeTag::Bool);
            body.push_back(b_.assign(b_.index(id(p->identifier), id("account")), id("value")));
            guard(mods, body);
            b_.function(setter_name(p->identifier), Visibility::External, {a, v}, mods, b_.block(body));
        }
        if (const auto& sw = traps().suspension; sw && sw->has_setter) simple(sw->identifier, TypeTag::Bool);
        if (const auto& l = traps().amount_limit; l && l->has_setter) simple(l->identifier, TypeTag::Uint);
        if (const auto& f = traps().fee; f && f->has_setter) simple(f->identifier, TypeTag::Uint);
    }

    void trap_state() {
        if (const auto& p = traps().permission) b_.state_var(p->identifier, TypeTag::AddressList);
        if (const auto& sw = traps().suspension) b_.state_var(sw->identifier, TypeTag::Bool);
        if (const auto& l = traps().amount_limit) b_.state_var(l->identifier, TypeTag::Uint);
        if (const auto& f = traps().fee) b_.state_var(f->identifier, TypeTag::Uint);
    }

    // Constructor lines that seed lists and initial trap values.
    Ids trap_init(const std::string& self) {
        Ids out;
        if (const auto& p = traps().permission) {
            if (p->list_kind == ListKind::whitelist) {
                out.push_back(b_.assign(b_.index(id(p->identifier), b_.msg_sender()), b_.literal("true")));
            }
            if (traps().callback) {
                out.push_back(b_.assign(b_.index(id(p->identifier), b_.literal(self)), b_.literal("true")));
            }
        }
        if (const auto& sw = traps().suspension) {
            out.push_back(b_.assign(id(sw->identifier), b_.literal(sw->switch_value ? "true" : "false")));
        }
        if (const auto& l = traps().amount_limit) {
            out.push_back(b_.assign(id(l->identifier), b_.literal(std::to_string(l->limit))));
        }
        if (const auto& f = traps().fee) {
            out.push_back(b_.assign(id(f->identifier), b_.literal(std::to_string(f->sell_fee_bps))));
        }
        return out;
    }

    void dummies() {
        if (!s_.has(Concealment::dummy_function)) return;
        {
            Id a = b_.param("account", TypeTag::Address);
            Id r = b_.ret(bin(">", b_.index(id("_balances"), id("account")), b_.literal("0")));
            b_.function("isExcludedFromReward", Visibility::Public, {a}, {}, b_.block({r}));
        }
        {
            Id x = b_.param("percent", TypeTag::Uint);
            Id l = b_.local("share", TypeTag::Uint, bin("/", bin("*", id("percent"), id("_totalSupply")),
                                                        b_.literal("100")));
            b_.function("manualSwap", Visibility::Public, {x}, {}, b_.block({l, b_.ret(id("share"))}));
        }
    }

    void main_contract() {
        b_.begin_contract(s_.symbol.empty() ? "Token" : s_.symbol + "Token");
        b_.state_var("_balances", TypeTag::Mapping);
        b_.state_var("_totalSupply", TypeTag::Uint, false, b_.literal(std::to_string(s_.total_supply)));
        b_.state_var("_name", TypeTag::String, true, b_.literal(s_.name));
        b_.state_var("_owner", TypeTag::Address);
        b_.state_var("uniswapV2Pair", TypeTag::Address);
        if (s_.has(Concealment::incomplete_renouncement)) b_.state_var(dev_var(), TypeTag::Address);
        if (!external()) trap_state();
        const bool fee_by_modifier = has_fee() && s_.placement == Placement::via_modifier;
        if (fee_by_modifier) b_.state_var("_feeAmount", TypeTag::Uint);

        onlyowner_modifier();
        const Scope sc{"_owner", "uniswapV2Pair", true};

        // constructor
        {
            Ids params{b_.param("pair_", TypeTag::Address)};
            Ids body{b_.assign(id("_owner"), b_.msg_sender()), b_.assign(id("uniswapV2Pair"), id("pair_")),
                     b_.assign(b_.index(id("_balances"), b_.msg_sender()), id("_totalSupply"))};
            if (s_.has(Concealment::incomplete_renouncement)) {
                params.push_back(b_.param("dev_", TypeTag::Address));
                body.push_back(b_.assign(id(dev_var()), id("dev_")));
            }
            if (!external()) {
                for (Id st : trap_init("address(this)")) body.push_back(st);
            }
            b_.function("constructor", Visibility::Public, params, {}, b_.block(body));
        }

        // placement plumbing
        Ids transfer_mods;
        Ids pre;  // statements in _transfer before the balance check
        switch (s_.placement) {
        case Placement::inline_check: {
            pre = checks(sc);
            if (has_fee()) {
                for (Id st : fee_local(sc)) pre.push_back(st);
                pre.push_back(b_.assign(id("amount"), bin("-", id("amount"), id("fee"))));
            }
            break;
        }
        case Placement::via_modifier: {
            if (has_checks() || has_fee()) {
                const auto name = helper(0, "checkTransfer");
                Ids body = checks(sc);
                if (fee_by_modifier) {
                    body.push_back(b_.assign(id("_feeAmount"), b_.literal("0")));
                    body.push_back(b_.if_(fee_gate(sc),
                                          b_.block({b_.assign(id("_feeAmount"), fee_of_amount())})));
                }
                b_.modifier(name, trade_params(), b_.block(body));
                transfer_mods.push_back(b_.call(name, trade_args()));
                if (fee_by_modifier) {
                    pre.push_back(b_.assign(id("amount"), bin("-", id("amount"), id("_feeAmount"))));
                }
            }
            break;
        }
        case Placement::via_nested_function: {
            if (has_checks() || has_fee()) {
                const auto depth = static_cast<std::size_t>(std::max(1, s_.nesting_depth));
                for (std::size_t k = depth; k-- > 0;) {
                    Ids body;
                    if (k + 1 == depth) {
                        body = checks(sc);
                        if (has_fee()) {
                            for (Id st : fee_local(sc)) body.push_back(st);
                            body.push_back(b_.ret(bin("-", id("amount"), id("fee"))));
                        }
                    } else {
                        Id c = b_.call(helper(k + 1, "_check"), trade_args());
                        body.push_back(has_fee() ? b_.ret(c) : c);
                    }
                    b_.function(helper(k, "_check"), Visibility::Private, trade_params(), {}, b_.block(body));
                }
                Id c = b_.call(helper(0, "_check"), trade_args());
                pre.push_back(has_fee() ? b_.assign(id("amount"), c) : c);
            }
            break;
        }
        case Placement::via_external_contract: {
            if (has_checks() || has_fee()) {
                Id c = b_.low_level_call(llc_name(), trade_args());
                pre.push_back(has_fee() ? b_.assign(id("amount"), c) : b_.require(c, msg("transfer rejected")));
            }
            break;
        }
        }

        // _transfer
        {
            Ids body;
            body.push_back(b_.require(bin("!=", id("from"), b_.literal("address(0)")),
                                      msg("transfer from the zero address")));
            if (const auto& cb = traps().callback; cb && cb->enabled) {
                Id gate = and_(eq("to", "uniswapV2Pair"), ne("from", "_owner"));
                body.push_back(b_.if_(gate, b_.block({b_.call(cb->identifier)})));
            }
            for (Id st : pre) body.push_back(st);
            Id bal_from = b_.index(id("_balances"), id("from"));
            body.push_back(b_.require(bin(">=", bal_from, id("amount")), msg("transfer amount exceeds balance")));
            body.push_back(b_.assign(b_.index(id("_balances"), id("from")),
                                     bin("-", b_.index(id("_balances"), id("from")), id("amount"))));
            body.push_back(b_.assign(b_.index(id("_balances"), id("to")),
                                     bin("+", b_.index(id("_balances"), id("to")), id("amount"))));
            b_.function("_transfer", Visibility::Internal, trade_params(), transfer_mods, b_.block(body));
        }
        if (const auto& cb = traps().callback; cb && cb->enabled) {
            Id c = b_.call(cb->reentry_function,
                           {b_.literal("address(this)"), id("uniswapV2Pair"), b_.literal("0")});
            b_.function(cb->identifier, Visibility::Private, {}, {}, b_.block({c}));
        }

        // public surface
        {
            Ids p{b_.param("to", TypeTag::Address), b_.param("amount", TypeTag::Uint)};
            Id c = b_.call("_transfer", {b_.msg_sender(), id("to"), id("amount")});
            b_.function("transfer", Visibility::Public, p, {}, b_.block({c, b_.ret(b_.literal("true"))}));
        }
        {
            Ids p = trade_params();
            Id c = b_.call("_transfer", trade_args());
            b_.function("transferFrom", Visibility::Public, p, {}, b_.block({c, b_.ret(b_.literal("true"))}));
        }
        {
            Id a = b_.param("account", TypeTag::Address);
            b_.function("balanceOf", Visibility::Public, {a}, {},
                        b_.block({b_.ret(b_.index(id("_balances"), id("account")))}));
        }
        b_.function("totalSupply", Visibility::Public, {}, {}, b_.block({b_.ret(id("_totalSupply"))}));
        b_.function("renounceOwnership", Visibility::Public, {}, {b_.call("onlyOwner")},
                    b_.block({b_.assign(id("_owner"), b_.literal("address(0)"))}));
        if (!external()) setters(true);
        dummies();
    }

    void guard_contract() {
        b_.begin_contract(s_.external_contract);
        b_.state_var("owner", TypeTag::Address);
        b_.state_var("pair", TypeTag::Address);
        trap_state();
        const Scope sc{"owner", "pair", false};
        {
            Ids params{b_.param("pair_", TypeTag::Address), b_.param("token_", TypeTag::Address)};
            Ids body{b_.assign(id("owner"), b_.msg_sender()), b_.assign(id("pair"), id("pair_"))};
            for (Id st : trap_init("token_")) body.push_back(st);
            b_.function("constructor", Visibility::Public, params, {}, b_.block(body));
        }
        {
            Ids body = checks(sc);
            if (has_fee()) {
                for (Id st : fee_local(sc)) body.push_back(st);
                body.push_back(b_.ret(bin("-", id("amount"), id("fee"))));
            } else {
                body.push_back(b_.ret(b_.literal("true")));
            }
            b_.function(guard_fn(), Visibility::External, trade_params(), {}, b_.block(body));
        }
        setters(false);
    }

    const TokenSpec& s_;
    FixtureOptions o_;
    AstBuilder b_;
};

} // namespace

std::string setter_name(std::string_view identifier) {
    std::size_t i = 0;
    while (i < identifier.size() && identifier[i] == '_') ++i;
    std::string rest(identifier.substr(i));
    if (rest.empty()) rest = "value";
    rest[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rest[0])));
    return "set" + rest;
}

nlohmann::json contract_fixture(const TokenSpec& spec, const FixtureOptions& options) {
    return Writer(spec, options).run();
}

} // namespace trapdoor::tokenvm
