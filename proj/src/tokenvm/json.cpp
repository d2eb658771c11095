#include <trapdoor/tokenvm/token.hpp>

namespace trapdoor::tokenvm {

namespace {

template <class E>
E parse_enum(const nlohmann::json& j, std::optional<E> (*parse)(std::string_view), const char* what) {
    const auto s = j.get<std::string>();
    auto v = parse(s);
    if (!v) throw Error(std::string("unknown ") + what + ": " + s);
    return *v;
}

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v,
                  nlohmann::json (*enc)(const T&)) {
    j[key] = v ? enc(*v) : nlohmann::json(nullptr);
}

nlohmann::json enc_permission(const PermissionTrap& p) {
    return {{"list_kind", to_string(p.list_kind)},
            {"members", p.members},
            {"identifier", p.identifier},
            {"has_setter", p.has_setter}};
}
nlohmann::json enc_suspension(const SuspensionTrap& s) {
    return {{"switch_value", s.switch_value},
            {"identifier", s.identifier},
            {"has_setter", s.has_setter},
            {"scope", to_string(s.scope)}};
}
nlohmann::json enc_limit(const AmountLimitTrap& l) {
    return {{"limit", l.limit},
            {"identifier", l.identifier},
            {"has_setter", l.has_setter},
            {"scope", to_string(l.scope)}};
}
nlohmann::json enc_fee(const FeeTrap& f) {
    return {{"buy_fee_bps", f.buy_fee_bps},
            {"sell_fee_bps", f.sell_fee_bps},
            {"identifier", f.identifier},
            {"has_setter", f.has_setter}};
}
nlohmann::json enc_callback(const CallbackTrap& c) {
    return {{"enabled", c.enabled},
            {"identifier", c.identifier},
            {"reentry_function", c.reentry_function}};
}

bool present(const nlohmann::json& j, const char* key) {
    return j.contains(key) && !j.at(key).is_null();
}

} // namespace

void to_json(nlohmann::json& j, const TrapConfig& t) {
    j = nlohmann::json::object();
    put_optional(j, "permission", t.permission, enc_permission);
    put_optional(j, "suspension", t.suspension, enc_suspension);
    put_optional(j, "amount_limit", t.amount_limit, enc_limit);
    put_optional(j, "fee", t.fee, enc_fee);
    put_optional(j, "callback", t.callback, enc_callback);
}

void from_json(const nlohmann::json& j, TrapConfig& t) {
    t = {};
    if (present(j, "permission")) {
        const auto& p = j.at("permission");
        t.permission = PermissionTrap{parse_enum(p.at("list_kind"), parse_list_kind, "list_kind"),
                                      p.at("members").get<std::set<Address>>(),
                                      p.at("identifier").get<std::string>(),
                                      p.value("has_setter", false)};
    }
    if (present(j, "suspension")) {
        const auto& s = j.at("suspension");
        t.suspension = SuspensionTrap{s.at("switch_value").get<bool>(), s.at("identifier").get<std::string>(),
                                      s.value("has_setter", false),
                                      parse_enum(s.value("scope", nlohmann::json("non_buys")),
                                                 parse_trap_scope, "scope")};
    }
    if (present(j, "amount_limit")) {
        const auto& l = j.at("amount_limit");
        t.amount_limit = AmountLimitTrap{l.at("limit").get<Amount>(), l.at("identifier").get<std::string>(),
                                         l.value("has_setter", false),
                                         parse_enum(l.value("scope", nlohmann::json("all")),
                                                    parse_trap_scope, "scope")};
    }
    if (present(j, "fee")) {
        const auto& f = j.at("fee");
        t.fee = FeeTrap{f.at("buy_fee_bps").get<std::uint32_t>(), f.at("sell_fee_bps").get<std::uint32_t>(),
                        f.at("identifier").get<std::string>(), f.value("has_setter", false)};
    }
    if (present(j, "callback")) {
        const auto& c = j.at("callback");
        t.callback = CallbackTrap{c.at("enabled").get<bool>(), c.at("identifier").get<std::string>(),
                                  c.value("reentry_function", std::string("_transfer"))};
    }
}

void to_json(nlohmann::json& j, const TokenSpec& s) {
    nlohmann::json conceal = nlohmann::json::array();
    for (auto c : s.concealment) conceal.push_back(to_string(c));
    j = {{"id", s.id},
         {"name", s.name},
         {"symbol", s.symbol},
         {"decimals", s.decimals},
         {"total_supply", s.total_supply},
         {"owner", s.owner},
         {"traps", s.traps},
         {"concealment", conceal},
         {"placement", to_string(s.placement)},
         {"nesting_depth", s.nesting_depth},
         {"helper_names", s.helper_names},
         {"external_contract", s.external_contract},
         {"hidden_controller", s.hidden_controller}};
}

void from_json(const nlohmann::json& j, TokenSpec& s) {
    s = {};
    s.id = j.at("id").get<Address>();
    s.name = j.value("name", std::string{});
    s.symbol = j.value("symbol", std::string{});
    s.decimals = j.value("decimals", 18);
    s.total_supply = j.at("total_supply").get<Amount>();
    s.owner = j.at("owner").get<Address>();
    if (present(j, "traps")) s.traps = j.at("traps").get<TrapConfig>();
    if (present(j, "concealment")) {
        for (const auto& c : j.at("concealment")) {
            s.concealment.insert(parse_enum(c, parse_concealment, "concealment"));
        }
    }
    s.placement = parse_enum(j.value("placement", nlohmann::json("inline")), parse_placement, "placement");
    s.nesting_depth = j.value("nesting_depth", 1);
    s.helper_names = j.value("helper_names", std::vector<std::string>{});
    s.external_contract = j.value("external_contract", std::string("TransferGuard"));
    if (present(j, "hidden_controller")) s.hidden_controller = j.at("hidden_controller").get<Address>();
}

void to_json(nlohmann::json& j, const ErrorTrace& t) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : t.frames) frames.push_back({{"function_name", f.function_name}, {"site_id", f.site_id}});
    j = {{"frames", frames},
         {"cause",
          {{"kind", to_string(t.cause.kind)},
           {"identifier", t.cause.identifier},
           {"message", t.cause.message}}}};
}

void from_json(const nlohmann::json& j, ErrorTrace& t) {
    t = {};
    for (const auto& f : j.at("frames")) {
        t.frames.push_back({f.at("function_name").get<std::string>(), f.value("site_id", 0)});
    }
    const auto& c = j.at("cause");
    t.cause.kind = parse_enum(c.at("kind"), parse_cause_kind, "cause kind");
    t.cause.identifier = c.value("identifier", std::string{});
    t.cause.message = c.value("message", std::string{});
}

void to_json(nlohmann::json& j, const BackdoorCall& c) {
    j = {{"caller", c.caller},
         {"action", to_string(c.action)},
         {"payload",
          {{"member", c.payload.member},
           {"flag", c.payload.flag},
           {"limit", c.payload.limit},
           {"buy_fee_bps", c.payload.buy_fee_bps},
           {"sell_fee_bps", c.payload.sell_fee_bps}}}};
}

void from_json(const nlohmann::json& j, BackdoorCall& c) {
    c = {};
    c.caller = j.at("caller").get<Address>();
    c.action = parse_enum(j.at("action"), parse_backdoor_action, "backdoor action");
    const auto& p = j.at("payload");
    if (present(p, "member")) c.payload.member = p.at("member").get<Address>();
    c.payload.flag = p.value("flag", false);
    c.payload.limit = p.value("limit", Amount{0});
    c.payload.buy_fee_bps = p.value("buy_fee_bps", 0u);
    c.payload.sell_fee_bps = p.value("sell_fee_bps", 0u);
}

void to_json(nlohmann::json& j, const TransferResult& r) {
    j = {{"ok", r.ok}, {"delivered", r.delivered}, {"fee", r.fee}, {"fee_identifier", r.fee_identifier}};
    j["trace"] = r.trace ? nlohmann::json(*r.trace) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const TokenInstance& t) {
    nlohmann::json balances = nlohmann::json::object();
    for (const auto& [a, v] : t.balances) balances[a.str()] = v;
    j = {{"spec", t.spec}, {"balances", balances}, {"live", t.live}, {"owner", t.owner}};
}

void from_json(const nlohmann::json& j, TokenInstance& t) {
    t = {};
    t.spec = j.at("spec").get<TokenSpec>();
    for (const auto& [a, v] : j.at("balances").items()) t.balances[Address(a)] = v.get<Amount>();
    t.live = j.at("live").get<TrapConfig>();
    t.owner = j.at("owner").get<Address>();
}

} // namespace trapdoor::tokenvm
