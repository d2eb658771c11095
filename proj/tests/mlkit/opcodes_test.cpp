#include <trapdoor/mlkit/dataset.hpp>
#include <trapdoor/mlkit/exchange_features.hpp>
#include <trapdoor/mlkit/opcodes.hpp>
#include <trapdoor/tokenvm/bytecode_stub.hpp>
#include <trapdoor/tokenvm/synth.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace trapdoor;
using namespace trapdoor::mlkit;

TEST(Disassemble, WorkedExamples) {
    EXPECT_EQ(disassemble("0x6001600101"), (OpcodeSequence{"PUSH1", "PUSH1", "ADD"}));
    EXPECT_TRUE(disassemble("").empty());
    EXPECT_TRUE(disassemble("0x").empty());
    EXPECT_EQ(disassemble("0x61ffff"), (OpcodeSequence{"PUSH2"}));
    EXPECT_EQ(disassemble("5F"), (OpcodeSequence{"PUSH0"}));
}

TEST(Disassemble, TruncatedPushAndUnknownBytes) {
    const auto code = decode_hex("0x63aabb");
    const auto ins = disassemble_bytes(code);
    ASSERT_EQ(ins.size(), 1u);
    EXPECT_EQ(ins[0].mnemonic, "PUSH4");
    EXPECT_EQ(ins[0].immediate_len, 2u);
    EXPECT_EQ(disassemble("0x0c"), (OpcodeSequence{"INVALID"}));
}

TEST(Disassemble, RejectsBadHex) {
    EXPECT_THROW(decode_hex("0x123"), Error);
    EXPECT_THROW(decode_hex("zz"), Error);
    EXPECT_EQ(encode_hex(decode_hex("0xDEADbeef")), "0xdeadbeef");
}

TEST(Disassemble, TotalOnRandomBytes) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::uint8_t> code(std::uniform_int_distribution<std::size_t>(0, 300)(rng));
        for (auto& b : code) b = static_cast<std::uint8_t>(rng());
        const auto ins = disassemble_bytes(code);
        std::size_t len = 0;
        for (const auto& in : ins) {
            ASSERT_EQ(in.offset, len);
            len += 1 + in.immediate_len;
        }
        ASSERT_EQ(len, code.size());
        const auto seq = disassemble(encode_hex(code));
        const auto v = opcode_features(seq);
        std::uint64_t sum = 0;
        for (const auto& [_, c] : v.counts) sum += c;
        ASSERT_EQ(sum, seq.size());
        ASSERT_EQ(v.total_ops, seq.size());
    }
}

TEST(OpcodeTable, ShippedCsvMatchesBuiltIn) {
    EXPECT_EQ(load_opcode_table(default_opcode_table_path()), opcode_table());
    EXPECT_EQ(canonical_mnemonics().size(), opcode_table().size());
    EXPECT_THROW(load_opcode_table("/nonexistent/opcodes.csv"), Error);
}

TEST(OpcodeFeatures, Counting) {
    const auto v = opcode_features({"PUSH1", "PUSH1", "ADD"});
    EXPECT_EQ(v.count("PUSH1"), 2u);
    EXPECT_EQ(v.count("ADD"), 1u);
    EXPECT_EQ(v.count("SLOAD"), 0u);
    EXPECT_EQ(v.total_ops, 3u);
    const auto dense = v.dense();
    EXPECT_EQ(dense.size(), canonical_mnemonics().size());
    double sum = 0;
    for (double d : dense) sum += d;
    EXPECT_EQ(sum, 3.0);

    const auto empty = opcode_features({});
    EXPECT_EQ(empty.total_ops, 0u);
    for (double d : empty.dense()) EXPECT_EQ(d, 0.0);
}

TEST(OpcodeFeatures, PermissionStubOutweighsItsBenignTwin) {
    for (const auto& t : tokenvm::synthesize_corpus(17, {{"EP", 25}})) {
        auto benign = t.spec;
        benign.traps = {};
        benign.concealment.clear();
        const auto trapped = opcode_features(disassemble(tokenvm::bytecode_stub(t.spec, t.stub_seed)));
        const auto plain = opcode_features(disassemble(tokenvm::bytecode_stub(benign, t.stub_seed)));
        EXPECT_GT(trapped.count("SLOAD"), plain.count("SLOAD"));
        EXPECT_GT(trapped.count("ISZERO"), plain.count("ISZERO"));
    }
}

TEST(OpcodeFeatures, TrapdoorStubsUseMoreGuardOpcodes) {
    const auto tokens = tokenvm::synthesize_corpus(
        19, {{"benign", 200}, {"EP", 40}, {"ES", 40}, {"AL", 40}, {"FM", 40}, {"IC", 40}});
    std::map<std::string, double> trap_sum, benign_sum;
    for (const auto& t : tokens) {
        const auto v = opcode_features(disassemble(tokenvm::bytecode_stub(t.spec, t.stub_seed)));
        auto& sum = t.benign() ? benign_sum : trap_sum;
        for (const char* op : {"SLOAD", "EQ", "ISZERO"}) sum[op] += static_cast<double>(v.count(op));
    }
    for (const char* op : {"SLOAD", "EQ", "ISZERO"}) {
        EXPECT_GT(trap_sum[op] / 200, benign_sum[op] / 200) << op;
    }
}

namespace {

EventRecord transfer(std::uint64_t block, const char* from, const char* to) {
    EventRecord e;
    e.kind = EventKind::Transfer;
    e.block = block;
    e.contract = Address{"0xtok"};
    e.from = Address{from};
    e.to = Address{to};
    e.amount = 10;
    return e;
}

EventRecord buy_swap(std::uint64_t block, const char* buyer) {
    EventRecord e;
    e.kind = EventKind::Swap;
    e.block = block;
    e.contract = Address{"0xpool"};
    e.token0 = Address{"0xtok"};
    e.token1 = Address{"0xweth"};
    e.from = Address{"0xrouter"};
    e.to = Address{buyer};
    e.amount1_in = 5;
    e.amount0_out = 7;
    return e;
}

} // namespace

TEST(ExchangeFeatures, EmptyHistoryIsZero) {
    const auto f = exchange_features({}, {}, Address{"0xtok"}, Address{"0xc"}, Address{"0xpool"});
    EXPECT_EQ(f, ExchangeFeatures{});
    for (double d : f.to_vector()) EXPECT_EQ(d, 0.0);
    EXPECT_EQ(ExchangeFeatures::names().size(), f.to_vector().size());
}

TEST(ExchangeFeatures, HandCountedLog) {
    const std::vector<EventRecord> tok{transfer(100, "0x0", "0xc"), transfer(101, "0xc", "0xtok"),
                                       transfer(102, "0xtok", "0xa"), transfer(150, "0xa", "0xb"),
                                       transfer(168, "0xb", "0xd")};
    const std::vector<EventRecord> pool{buy_swap(120, "0xa"), buy_swap(130, "0xb")};
    const auto f = exchange_features(tok, pool, Address{"0xtok"}, Address{"0xc"}, Address{"0xpool"});
    EXPECT_EQ(f.n_transfers, 5u);
    EXPECT_EQ(f.n_token_transfers, 2u);
    EXPECT_DOUBLE_EQ(f.r_token_transfers, 0.4);
    EXPECT_EQ(f.n_creator_transfers, 2u);
    EXPECT_EQ(f.n_swap, 2u);
    EXPECT_EQ(f.n_buyers, 2u);
    EXPECT_EQ(f.n_sellers, 0u);
    EXPECT_EQ(f.n_users, 2u);
    EXPECT_EQ(f.buy_amt, 14u);
    EXPECT_EQ(f.life_time, 68u);
    EXPECT_EQ(f.pool_life_time, 10u);
}

TEST(ExchangeFeatures, RejectsUnorderedLogs) {
    const std::vector<EventRecord> tok{transfer(5, "0x0", "0xc"), transfer(4, "0xc", "0xa")};
    EXPECT_THROW(exchange_features(tok, {}, Address{"0xtok"}, Address{"0xc"}, Address{"0xpool"}), Error);
}

TEST(DatasetCsv, RoundTripAndValidation) {
    Dataset d;
    d.feature_names = {"a", "b"};
    d.samples = {{"0x1", {1.5, 0}, 1}, {"0x2", {0.1, 1e-7}, 0}};
    std::stringstream ss;
    write_csv(ss, d);
    const auto back = read_csv(ss);
    EXPECT_EQ(back.feature_names, d.feature_names);
    EXPECT_EQ(back.samples, d.samples);
    EXPECT_EQ(back.count(1), 1u);

    d.samples[0].label = 2;
    EXPECT_THROW(d.validate(), Error);
    std::stringstream bad("token_id,label,a\n0x1,1,2,3\n");
    EXPECT_THROW(read_csv(bad), Error);
}
