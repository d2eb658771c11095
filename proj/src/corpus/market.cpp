#include <trapdoor/corpus/market.hpp>

#include <trapdoor/corpus/analytics.hpp>
#include <trapdoor/mlkit/opcodes.hpp>
#include <trapdoor/parallel.hpp>
#include <trapdoor/tokenvm/bytecode_stub.hpp>
#include <trapdoor/tokenvm/contract_fixture.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace trapdoor::corpus {

namespace {

__extension__ typedef unsigned __int128 u128;

class Rng {
public:
    Rng(std::uint64_t a, std::uint64_t b) {
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), 0x6d6bu};
        rng_.seed(seq);
    }
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
    }
    bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

private:
    std::mt19937_64 rng_;
};

Amount share(Amount total, std::uint64_t num, std::uint64_t den) {
    return static_cast<Amount>(static_cast<u128>(total) * num / den);
}

void next_block(probe::Market& m, std::uint64_t step) {
    m.block += step;
    m.next_log_index = 0;
}

std::string file_stem(const Address& a) { return a.str(); }

} // namespace

const HighValueToken& weth() {
    static const HighValueToken t{derive_address("token:WETH"), "Wrapped Ether", "WETH", 5.0e9, 100'000};
    return t;
}

MarketHistory simulate_market(const tokenvm::SynthToken& truth, std::uint64_t seed, const MarketConfig& config) {
    Rng rng(seed, truth.stub_seed);
    const auto& spec = truth.spec;
    const bool trapped = !truth.benign();

    MarketHistory h;
    h.creation_block = config.first_block + rng.between(0, config.block_span);
    EventRecord mint;
    mint.kind = EventKind::Transfer;
    mint.block = h.creation_block;
    mint.contract = spec.id;
    mint.from = kZeroAddress;
    mint.to = spec.owner;
    mint.amount = spec.total_supply;

    const Amount token_liq = share(spec.total_supply, rng.between(40, 80), 100);
    const Amount quote_liq = rng.between(10'000'000'000'000'000ULL, 1'000'000'000'000'000'000ULL);
    probe::Market m = probe::open_market(tokenvm::deploy(spec), weth().token_id, token_liq, quote_liq,
                                         h.creation_block + rng.between(1, 50));
    m.record_events = true;

    bool armed = false;
    auto arm_now = [&] {
        if (armed) return;
        if (!tokenvm::arm(m.token, truth)) throw Error("arming rejected for " + spec.id.str());
        armed = true;
    };

    const auto n = static_cast<std::size_t>(rng.between(config.min_investors, config.max_investors));
    const auto arm_after = static_cast<std::size_t>(rng.between(0, 3));
    const std::uint64_t max_step = trapped ? 900 : 12'000;
    std::vector<Address> holders;
    for (std::size_t k = 0; k < n; ++k) {
        next_block(m, rng.between(1, max_step));
        if (trapped && k == arm_after) arm_now();
        const Address investor = derive_address("investor:" + spec.id.str() + ":" + std::to_string(k));
        const Amount amount = std::max<Amount>(1, share(m.token_reserve(), rng.between(1, 50), 10'000));
        if (probe::buy(m, investor, amount).ok) holders.push_back(investor);
        if (!holders.empty() && rng.coin(0.35)) {
            const auto& seller = holders[rng.between(0, holders.size() - 1)];
            const Amount bal = m.token.balance_of(seller);
            if (bal > 0) probe::sell(m, seller, std::max<Amount>(1, share(bal, rng.between(20, 100), 100)));
        }
    }
    if (trapped) {
        arm_now();
        next_block(m, rng.between(1, max_step));
        const Amount bal = m.token.balance_of(spec.owner);
        if (bal > 0) probe::sell(m, spec.owner, std::max<Amount>(1, share(bal, rng.between(50, 100), 100)));
    }

    h.token_events.push_back(mint);
    h.token_events.insert(h.token_events.end(), m.token_events.begin(), m.token_events.end());
    h.pool_events = std::move(m.pool_events);
    m.token_events.clear();
    m.pool_events.clear();
    m.record_events = false;
    h.snapshot = std::move(m);
    return h;
}

TokenInputs load_inputs(const TokenRecord& record, const std::filesystem::path& base) {
    TokenInputs in;
    in.record = record;
    auto attempt = [&](const char* what, const std::optional<std::string>& path, auto&& fn) {
        if (!path) return;
        try {
            fn(read_file(resolve(base, *path)));
        } catch (const std::exception& e) {
            in.load_errors.push_back(std::string(what) + ": " + e.what());
        }
    };
    attempt("ast", record.paths.ast, [&](const std::string& text) { in.ast = nlohmann::json::parse(text); });
    attempt("bytecode", record.paths.bytecode, [&](const std::string& text) {
        auto code = normalize_bytecode(text);
        mlkit::decode_hex(code);
        in.bytecode = "0x" + code;
    });
    attempt("events", record.paths.events, [&](const std::string& text) {
        std::istringstream ss(text);
        in.events = read_events_jsonl(ss);
    });
    attempt("snapshot", record.paths.snapshot,
            [&](const std::string& text) { in.market = nlohmann::json::parse(text).get<probe::Market>(); });
    return in;
}

std::vector<SyntheticToken> build_synthetic(std::uint64_t seed, const tokenvm::ClassCounts& counts,
                                            unsigned threads, const MarketConfig& config) {
    auto truths = tokenvm::synthesize_corpus(seed, counts);
    std::vector<SyntheticToken> out(truths.size());
    parallel_for(truths.size(), threads, [&](std::size_t i) {
        auto& t = out[i];
        t.truth = std::move(truths[i]);
        const auto& spec = t.truth.spec;
        auto history = simulate_market(t.truth, seed, config);

        TokenRecord& r = t.inputs.record;
        r.token_id = spec.id;
        r.name = spec.name;
        r.symbol = spec.symbol;
        r.creator = spec.owner;
        r.creation_block = history.creation_block;
        r.has_source = true;
        r.pools = {{history.snapshot.pool_address, weth().token_id}};
        const auto stem = file_stem(spec.id);
        r.paths.ast = "ast/" + stem + ".json";
        r.paths.bytecode = "bytecode/" + stem + ".hex";
        r.paths.events = "events/" + stem + ".jsonl";
        r.paths.snapshot = "snapshots/" + stem + ".json";

        t.inputs.ast = tokenvm::contract_fixture(spec);
        t.inputs.bytecode = tokenvm::bytecode_stub(spec, t.truth.stub_seed);
        std::vector<EventRecord> events = std::move(history.token_events);
        events.insert(events.end(), history.pool_events.begin(), history.pool_events.end());
        std::sort(events.begin(), events.end(), [](const EventRecord& a, const EventRecord& b) {
            return std::tie(a.block, a.log_index) < std::tie(b.block, b.log_index);
        });
        t.inputs.events = std::move(events);
        t.inputs.market = std::move(history.snapshot);
    });
    return out;
}

void write_synthetic(const std::filesystem::path& dir, const std::vector<SyntheticToken>& tokens) {
    std::ostringstream manifest, truth;
    for (const auto& t : tokens) {
        const auto& in = t.inputs;
        const auto& r = in.record;
        manifest << nlohmann::json(r).dump() << '\n';
        truth << nlohmann::json(t.truth).dump() << '\n';
        if (in.ast) write_file_atomic(dir / *r.paths.ast, in.ast->dump());
        if (in.bytecode) write_file_atomic(dir / *r.paths.bytecode, *in.bytecode + "\n");
        if (in.events) {
            std::ostringstream ev;
            write_events_jsonl(ev, *in.events);
            write_file_atomic(dir / *r.paths.events, ev.str());
        }
        if (in.market) write_file_atomic(dir / *r.paths.snapshot, nlohmann::json(*in.market).dump());
    }
    write_file_atomic(dir / "manifest.jsonl", manifest.str());
    write_file_atomic(dir / "truth.jsonl", truth.str());
}

mlkit::Dataset synthetic_opcode_dataset(std::span<const tokenvm::SynthToken> tokens,
                                        std::optional<semantic::Category> category) {
    mlkit::Dataset d;
    d.feature_names = mlkit::canonical_mnemonics();
    for (const auto& t : tokens) {
        if (category && t.benign()) continue;
        const auto code = tokenvm::bytecode_stub(t.spec, t.stub_seed);
        const int label = category ? static_cast<int>(t.categories.count(*category)) : static_cast<int>(!t.benign());
        d.samples.push_back({t.spec.id.str(), mlkit::opcode_features(mlkit::disassemble(code)).dense(), label});
    }
    return d;
}

} // namespace trapdoor::corpus
