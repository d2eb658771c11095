#include <trapdoor/tokenvm/synth.hpp>

#include <algorithm>
#include <charconv>
#include <random>

namespace trapdoor::tokenvm {

namespace {

using semantic::Category;

const std::vector<std::string> kWords = {"Shiba", "Moon",  "Doge",  "Safe", "Elon",  "Baby",  "Floki",
                                         "Inu",   "Rocket", "Pepe", "Gold", "Meta",  "Verse", "Ape",
                                         "Kishu", "Cat",   "Pump",  "Mars", "Lambo", "Yield"};
const std::vector<std::string> kWhitelists = {"_enable", "_whiteList", "_isExcluded", "_allowed", "_safeOwner"};
const std::vector<std::string> kSwitches = {"tradingPaused", "_suspended", "cooldownEnabled", "_locked"};
const std::vector<std::string> kLimits = {"_maxTxAmount", "maxSellAmount", "_maxWallet", "_txLimit"};
const std::vector<std::string> kFees = {"sellmktFee", "_sellFee", "_liquidityFee", "_taxFee"};
const std::vector<std::string> kCallbacks = {"burnToken", "swapBack", "_autoBurn", "_rebalance"};
const std::vector<std::string> kBotLists = {"_isBot", "_blocked", "_sniper"};
const std::vector<std::string> kMisleading = {"router", "bots", "balances1", "uniswapRouter", "_rOwned",
                                              "_tOwned"};
const std::vector<std::string> kModifiers = {"antiBot", "checkTransfer", "beforeTransfer", "tradeGuard"};
const std::vector<std::string> kHelpers = {"_beforeTokenTransfer", "_validate", "_preCheck", "_tokenTransfer",
                                           "_checkTrade"};
const std::vector<std::string> kGuards = {"TransferGuard", "AntiSnipe", "FeeCalc", "BotProtection"};
const std::vector<std::string> kGuardFns = {"check", "validate", "onTransfer"};

class Gen {
public:
    Gen(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        rng_.seed(seq);
    }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
    }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
    std::uint64_t next() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

// Single-letter names that cannot collide with fixture identifiers.
std::string single_char(Gen& g) { return std::string(1, static_cast<char>('a' + g.between(0, 25))); }

SynthToken make_token(std::uint64_t seed, std::uint64_t index, std::optional<Category> cat) {
    Gen g(seed, index);
    SynthToken out;
    TokenSpec& s = out.spec;
    const auto tag = std::to_string(seed) + ":" + std::to_string(index);
    s.id = derive_address("token:" + tag);
    s.owner = derive_address("creator:" + tag);
    s.name = g.pick(kWords) + " " + g.pick(kWords);
    s.symbol.clear();
    for (int i = 0, n = static_cast<int>(g.between(3, 5)); i < n; ++i) {
        s.symbol.push_back(static_cast<char>('A' + g.between(0, 25)));
    }
    s.decimals = g.coin(0.5) ? 9 : 18;
    Amount supply = 1;
    for (int i = 0, e = static_cast<int>(g.between(9, 12)); i < e; ++i) supply *= 10;
    s.total_supply = supply;

    if (!cat) {
        if (g.coin(1.0 / 6)) s.concealment.insert(Concealment::dummy_function);
        out.stub_seed = g.next();
        return out;
    }
    out.categories.insert(*cat);

    s.placement = static_cast<Placement>(g.between(0, 3));
    s.nesting_depth = static_cast<int>(g.between(1, 3));
    switch (s.placement) {
    case Placement::inline_check: break;
    case Placement::via_modifier: s.helper_names = {g.pick(kModifiers)}; break;
    case Placement::via_nested_function: {
        auto pool = kHelpers;
        std::shuffle(pool.begin(), pool.end(), std::mt19937_64(g.next()));
        pool.resize(static_cast<std::size_t>(s.nesting_depth));
        s.helper_names = pool;
        break;
    }
    case Placement::via_external_contract:
        s.external_contract = g.pick(kGuards);
        s.helper_names = {g.pick(kGuardFns)};
        break;
    }

    std::vector<Concealment> options{Concealment::single_char_name, Concealment::misleading_name,
                                     Concealment::dummy_function, Concealment::incomplete_renouncement};
    if (*cat != Category::IC) options.push_back(Concealment::blank_error);
    if (*cat == Category::FM) options.push_back(Concealment::numeric_exception);
    for (auto c : options) {
        if (g.coin(1.0 / 6)) s.concealment.insert(c);
    }
    if (s.has(Concealment::single_char_name) && s.has(Concealment::misleading_name)) {
        s.concealment.erase(g.coin(0.5) ? Concealment::single_char_name : Concealment::misleading_name);
    }
    auto name_from = [&](const std::vector<std::string>& pool) {
        if (s.has(Concealment::single_char_name)) return single_char(g);
        if (s.has(Concealment::misleading_name)) return g.pick(kMisleading);
        return g.pick(pool);
    };

    Address controller = s.owner;
    if (s.has(Concealment::incomplete_renouncement)) {
        s.hidden_controller = derive_address("controller:" + tag);
        controller = s.hidden_controller;
        out.renounce_before_arming = true;
    }
    auto arm_call = [&](BackdoorAction a, BackdoorPayload p) {
        out.arming.push_back({controller, a, std::move(p)});
    };

    switch (*cat) {
    case Category::EP: {
        PermissionTrap p{ListKind::whitelist, {s.owner}, name_from(kWhitelists), g.coin(0.5)};
        s.traps.permission = p;
        break;
    }
    case Category::ES: {
        s.traps.suspension = SuspensionTrap{false, name_from(kSwitches), true, TrapScope::non_buys};
        BackdoorPayload p;
        p.flag = true;
        arm_call(BackdoorAction::set_switch, p);
        break;
    }
    case Category::AL: {
        s.traps.amount_limit = AmountLimitTrap{s.total_supply, name_from(kLimits), true, TrapScope::non_buys};
        BackdoorPayload p;
        p.limit = static_cast<Amount>(g.between(1, 200));
        arm_call(BackdoorAction::set_limit, p);
        break;
    }
    case Category::FM: {
        const auto initial = static_cast<std::uint32_t>(g.between(0, 500));
        s.traps.fee = FeeTrap{initial, initial, name_from(kFees), true};
        BackdoorPayload p;
        p.buy_fee_bps = static_cast<std::uint32_t>(g.between(0, 500));
        p.sell_fee_bps = s.has(Concealment::numeric_exception) ? static_cast<std::uint32_t>(g.between(10001, 20000))
                                                               : static_cast<std::uint32_t>(g.between(3500, 10000));
        arm_call(BackdoorAction::set_fee, p);
        break;
    }
    case Category::IC: {
        const auto list = name_from(kBotLists);
        s.traps.permission = PermissionTrap{ListKind::blacklist, {s.id}, list, true};
        s.traps.callback = CallbackTrap{true, g.pick(kCallbacks), "_transfer"};
        break;
    }
    }
    out.stub_seed = g.next();
    return out;
}

} // namespace

ClassCounts parse_class_counts(std::string_view text) {
    ClassCounts out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw Error("expected KEY=COUNT, got " + std::string(item));
        const std::string key(item.substr(0, eq));
        if (key != "benign" && !semantic::parse_category(key)) throw Error("unknown class " + key);
        std::size_t n = 0;
        const auto v = item.substr(eq + 1);
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
        if (ec != std::errc{} || p != v.data() + v.size()) throw Error("bad count for " + key);
        out[key] = n;
    }
    return out;
}

std::vector<SynthToken> synthesize_corpus(std::uint64_t seed, const ClassCounts& counts) {
    for (const auto& [k, _] : counts) {
        if (k != "benign" && !semantic::parse_category(k)) throw Error("unknown class " + k);
    }
    std::vector<SynthToken> out;
    std::uint64_t index = 0;
    auto count_of = [&](const std::string& k) {
        auto it = counts.find(k);
        return it == counts.end() ? std::size_t{0} : it->second;
    };
    for (std::size_t i = 0, n = count_of("benign"); i < n; ++i) {
        out.push_back(make_token(seed, index++, std::nullopt));
    }
    for (auto c : {Category::EP, Category::ES, Category::AL, Category::FM, Category::IC}) {
        for (std::size_t i = 0, n = count_of(std::string(semantic::to_string(c))); i < n; ++i) {
            out.push_back(make_token(seed, index++, c));
        }
    }
    return out;
}

bool arm(TokenInstance& token, const SynthToken& synth) {
    bool ok = true;
    if (synth.renounce_before_arming) ok = renounce(token, token.owner) && ok;
    for (const auto& call : synth.arming) ok = invoke_backdoor(token, call) == BackdoorStatus::applied && ok;
    return ok;
}

void to_json(nlohmann::json& j, const SynthToken& t) {
    nlohmann::json cats = nlohmann::json::array();
    for (auto c : t.categories) cats.push_back(semantic::to_string(c));
    j = {{"spec", t.spec},
         {"categories", cats},
         {"renounce_before_arming", t.renounce_before_arming},
         {"arming", t.arming},
         {"stub_seed", t.stub_seed}};
}

void from_json(const nlohmann::json& j, SynthToken& t) {
    t = {};
    t.spec = j.at("spec").get<TokenSpec>();
    for (const auto& c : j.value("categories", nlohmann::json::array())) {
        auto cat = semantic::parse_category(c.get<std::string>());
        if (!cat) throw Error("unknown category " + c.dump());
        t.categories.insert(*cat);
    }
    t.renounce_before_arming = j.value("renounce_before_arming", false);
    t.arming = j.value("arming", std::vector<BackdoorCall>{});
    t.stub_seed = j.value("stub_seed", std::uint64_t{0});
}

} // namespace trapdoor::tokenvm
