#include <trapdoor/tokenvm/bytecode_stub.hpp>

#include <trapdoor/mlkit/opcodes.hpp>

#include <map>
#include <random>
#include <sstream>

namespace trapdoor::tokenvm {

namespace {

// Motifs are whitespace-separated mnemonics. "PUSHn:hex" pushes a fixed
// value; a bare "PUSHn" pushes random bytes.
constexpr const char* kPrologue =
    "PUSH1:80 PUSH1:40 MSTORE CALLVALUE DUP1 ISZERO PUSH2 JUMPI PUSH1:00 DUP1 REVERT JUMPDEST POP "
    "PUSH1:04 CALLDATASIZE LT PUSH2 JUMPI PUSH1:00 CALLDATALOAD PUSH1:e0 SHR";
constexpr const char* kDispatch = "DUP1 PUSH4 EQ PUSH2 JUMPI";
constexpr const char* kDispatchEnd = "JUMPDEST PUSH1:00 DUP1 REVERT";

const std::vector<const char*> kBenign = {
    // balanceOf
    "JUMPDEST PUSH1:00 DUP1 DUP4 PUSH20 AND PUSH20 AND DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE "
    "PUSH1:20 ADD PUSH1:00 SHA3 SLOAD SWAP1 POP SWAP2 SWAP1 POP JUMP",
    // transfer core
    "JUMPDEST DUP1 PUSH1:00 DUP1 DUP7 PUSH20 AND DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE PUSH1:20 "
    "ADD PUSH1:00 SHA3 SLOAD LT ISZERO PUSH2 JUMPI PUSH1:40 MLOAD PUSH3 DUP2 MSTORE PUSH1:04 ADD "
    "PUSH2 SWAP1 PUSH2 JUMP JUMPDEST DUP1 PUSH1:00 DUP1 DUP8 SUB SWAP3 POP POP DUP2 SWAP1 SSTORE POP "
    "DUP1 PUSH1:00 DUP1 DUP7 ADD SWAP3 POP POP DUP2 SWAP1 SSTORE POP DUP4 PUSH20 AND DUP6 PUSH20 AND "
    "PUSH32 DUP6 PUSH1:40 MLOAD PUSH2 SWAP2 SWAP1 PUSH2 JUMP JUMPDEST PUSH1:40 MLOAD DUP1 SWAP2 SUB "
    "SWAP1 LOG3 POP POP POP POP JUMP",
    // allowance / approve
    "JUMPDEST PUSH1:00 DUP1 DUP5 PUSH20 AND DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE PUSH1:20 ADD "
    "PUSH1:00 SHA3 PUSH1:00 DUP4 PUSH20 AND DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE PUSH1:20 ADD "
    "PUSH1:00 SHA3 DUP2 SWAP1 SSTORE POP DUP2 PUSH20 AND DUP4 PUSH20 AND PUSH32 DUP4 PUSH1:40 MLOAD "
    "PUSH2 SWAP2 SWAP1 PUSH2 JUMP JUMPDEST PUSH1:40 MLOAD DUP1 SWAP2 SUB SWAP1 LOG3 POP POP POP JUMP",
    // return uint256
    "JUMPDEST PUSH1:40 MLOAD PUSH2 SWAP2 SWAP1 PUSH2 JUMP JUMPDEST PUSH1:40 MLOAD DUP1 SWAP2 SUB SWAP1 "
    "RETURN",
    // string getter
    "JUMPDEST PUSH1:60 PUSH1:03 DUP1 SLOAD PUSH2 SWAP1 PUSH2 JUMP JUMPDEST DUP1 PUSH1:1f ADD PUSH1:20 "
    "DUP1 SWAP2 DIV MUL PUSH1:20 ADD PUSH1:40 MLOAD SWAP1 DUP2 ADD PUSH1:40 MSTORE DUP1 SWAP3 SWAP2 SWAP1 "
    "DUP2 DUP2 MSTORE PUSH1:20 ADD DUP3 DUP1 SLOAD MLOAD CODECOPY POP POP POP POP JUMP",
    // abi decode helpers
    "JUMPDEST PUSH1:00 DUP2 CALLDATALOAD SWAP1 POP PUSH2 DUP2 PUSH2 JUMP JUMPDEST SWAP3 SWAP2 POP POP "
    "JUMP JUMPDEST PUSH1:00 PUSH1:20 DUP3 DUP5 SUB SLT ISZERO PUSH2 JUMPI PUSH2 PUSH2 JUMP JUMPDEST "
    "PUSH1:00 PUSH2 DUP5 DUP3 DUP6 ADD PUSH2 JUMP JUMPDEST SWAP2 POP POP SWAP3 SWAP2 POP POP JUMP",
    // overflow-checked add
    "JUMPDEST PUSH1:00 DUP3 DUP3 ADD SWAP1 POP DUP1 DUP3 GT ISZERO PUSH2 JUMPI PUSH2 PUSH2 JUMP "
    "JUMPDEST SWAP3 SWAP2 POP POP JUMP",
};

// Ownable: caller compared against the stored owner.
constexpr const char* kOnlyOwner =
    "JUMPDEST CALLER PUSH20 AND PUSH1:00 DUP1 SLOAD SWAP1 PUSH2 EXP SWAP1 DIV PUSH20 AND PUSH20 AND "
    "EQ PUSH2 JUMPI PUSH1:40 MLOAD PUSH3 DUP2 MSTORE PUSH1:04 ADD PUSH2 SWAP1 PUSH2 JUMP JUMPDEST "
    "PUSH1:40 MLOAD DUP1 SWAP2 SUB SWAP1 REVERT JUMPDEST";
constexpr const char* kRenounce =
    "JUMPDEST PUSH1:00 DUP1 PUSH1:00 SWAP1 SLOAD SWAP1 PUSH2 EXP SWAP1 DIV PUSH20 AND PUSH20 AND PUSH32 "
    "PUSH1:40 MLOAD PUSH1:40 MLOAD DUP1 SWAP2 SUB SWAP1 LOG3 PUSH1:00 DUP1 PUSH1:00 PUSH2 EXP DUP2 SLOAD "
    "DUP2 PUSH20 MUL NOT AND SWAP1 DUP4 PUSH20 AND MUL OR SWAP1 SSTORE POP JUMP";
constexpr const char* kScaledSupply =
    "JUMPDEST PUSH1:12 PUSH1:0a PUSH2 SWAP2 SWAP1 PUSH2 JUMP JUMPDEST PUSH4 PUSH2 SWAP2 SWAP1 PUSH2 JUMP "
    "JUMPDEST DUP2 DUP2 MUL DUP4 ISZERO DUP3 DUP5 DIV DUP5 EQ OR PUSH2 JUMPI JUMPDEST SWAP3 SWAP2 POP POP JUMP";

// Setter body guarded by an owner check.
constexpr const char* kSetter = "JUMPDEST DUP1 PUSH1 SSTORE POP JUMP";

// Sell-side list lookup: to == pair, then list[from].
constexpr const char* kListCheck =
    "JUMPDEST PUSH1 PUSH1:00 SWAP1 SLOAD SWAP1 PUSH2 EXP SWAP1 DIV PUSH20 AND PUSH20 AND DUP4 PUSH20 AND "
    "EQ DUP1 ISZERO PUSH2 JUMPI POP PUSH1:00 SLOAD PUSH20 AND DUP5 PUSH20 AND EQ ISZERO JUMPDEST ISZERO "
    "PUSH2 JUMPI PUSH1 PUSH1:00 DUP7 PUSH20 AND PUSH20 AND DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE "
    "PUSH1:20 ADD PUSH1:00 SHA3 PUSH1:00 SWAP1 SLOAD SWAP1 PUSH2 EXP SWAP1 DIV PUSH1:ff AND ISZERO "
    "PUSH2 JUMPI PUSH1:40 MLOAD PUSH3 DUP2 MSTORE PUSH1:04 ADD PUSH2 SWAP1 PUSH2 JUMP JUMPDEST";
// Packed bool switch with owner exemption and a cooldown timestamp.
constexpr const char* kSwitchCheck =
    "JUMPDEST PUSH1:00 SLOAD PUSH20 AND DUP5 PUSH20 AND EQ ISZERO DUP1 ISZERO PUSH2 JUMPI POP PUSH1:00 "
    "SLOAD PUSH20 AND DUP4 PUSH20 AND EQ ISZERO JUMPDEST ISZERO PUSH2 JUMPI PUSH1 SLOAD PUSH1:a0 SHR "
    "PUSH1:ff AND ISZERO PUSH2 JUMPI TIMESTAMP PUSH1 PUSH1:00 DUP7 DUP2 MSTORE PUSH1:20 ADD SWAP1 "
    "DUP2 MSTORE PUSH1:20 ADD PUSH1:00 SHA3 SLOAD LT PUSH2 JUMPI PUSH1:40 MLOAD PUSH3 DUP2 MSTORE "
    "PUSH1:04 ADD PUSH2 SWAP1 PUSH2 JUMP JUMPDEST TIMESTAMP PUSH1 ADD DUP2 SSTORE JUMPDEST";
// amount <= limit unless the owner sends.
constexpr const char* kLimitCheck =
    "JUMPDEST PUSH1:00 SLOAD PUSH20 AND DUP5 PUSH20 AND EQ PUSH2 JUMPI PUSH1 SLOAD DUP3 GT ISZERO PUSH2 "
    "JUMPI PUSH1:40 MLOAD PUSH3 DUP2 MSTORE PUSH1:04 ADD PUSH2 SWAP1 PUSH2 JUMP JUMPDEST PUSH1 SLOAD "
    "DUP3 PUSH2 DUP7 PUSH2 JUMP JUMPDEST GT ISZERO PUSH2 JUMPI JUMPDEST";
// balanceOf(to) + amount <= wallet cap, buys only.
constexpr const char* kWalletCap =
    "JUMPDEST PUSH1 SLOAD PUSH20 AND DUP5 PUSH20 AND EQ ISZERO PUSH2 JUMPI PUSH1 SLOAD DUP3 PUSH1:00 "
    "DUP1 DUP8 PUSH20 AND DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE PUSH1:20 ADD PUSH1:00 SHA3 SLOAD "
    "ADD GT ISZERO PUSH2 JUMPI PUSH1:40 MLOAD PUSH3 DUP2 MSTORE PUSH1:04 ADD PUSH2 SWAP1 PUSH2 JUMP JUMPDEST";
// fee = amount * rate / 10000; amount -= fee; credit the sink.
constexpr const char* kFeeUpdate =
    "JUMPDEST PUSH1 SLOAD PUSH20 AND DUP4 PUSH20 AND EQ DUP1 PUSH2 JUMPI POP PUSH1 SLOAD PUSH20 AND "
    "DUP5 PUSH20 AND EQ JUMPDEST ISZERO PUSH2 JUMPI PUSH2:2710 PUSH1 SLOAD DUP5 PUSH2 SWAP2 SWAP1 PUSH2 "
    "JUMP JUMPDEST PUSH2 SWAP2 SWAP1 PUSH2 JUMP JUMPDEST SWAP1 POP DUP1 DUP4 PUSH2 SWAP2 SWAP1 PUSH2 "
    "JUMP JUMPDEST SWAP3 POP DUP1 PUSH1:00 DUP1 PUSH2:dead DUP2 MSTORE PUSH1:20 ADD SWAP1 DUP2 MSTORE "
    "PUSH1:20 ADD PUSH1:00 SHA3 PUSH1:00 DUP3 DUP3 SLOAD ADD SWAP3 POP POP DUP2 SWAP1 SSTORE POP "
    "JUMPDEST DUP2 DUP2 MUL DUP3 DUP5 DIV JUMPDEST DUP2 DUP2 SUB";
// Sell hook that re-enters the transfer from the contract's own address.
constexpr const char* kCallback =
    "JUMPDEST PUSH1 SLOAD PUSH20 AND DUP4 PUSH20 AND EQ ISZERO PUSH2 JUMPI PUSH2 PUSH2 JUMP JUMPDEST "
    "JUMPDEST PUSH2 ADDRESS PUSH1 SLOAD PUSH20 AND PUSH1:00 PUSH2 JUMP JUMPDEST ADDRESS BALANCE "
    "PUSH2 PUSH2 JUMP JUMPDEST JUMP";
// Call into a separate guard contract.
constexpr const char* kExternalCall =
    "JUMPDEST PUSH1 SLOAD PUSH20 AND PUSH4 DUP5 DUP5 DUP5 PUSH1:40 MLOAD DUP5 PUSH4 AND PUSH1:e0 SHL "
    "DUP2 MSTORE PUSH1:04 ADD PUSH2 SWAP4 SWAP3 SWAP2 SWAP1 PUSH2 JUMP JUMPDEST PUSH1:20 PUSH1:40 MLOAD "
    "DUP1 DUP4 SUB DUP2 PUSH1:00 DUP8 DUP1 EXTCODESIZE ISZERO DUP1 ISZERO PUSH2 JUMPI PUSH1:00 DUP1 "
    "REVERT JUMPDEST POP GAS CALL ISZERO DUP1 ISZERO PUSH2 JUMPI RETURNDATASIZE PUSH1:00 DUP1 "
    "RETURNDATACOPY RETURNDATASIZE PUSH1:00 REVERT JUMPDEST POP POP POP POP PUSH1:40 MLOAD RETURNDATASIZE "
    "PUSH1:1f NOT PUSH1:1f DUP3 ADD AND DUP3 ADD DUP1 PUSH1:40 MSTORE POP DUP2 ADD SWAP1 PUSH2 SWAP2 "
    "SWAP1 PUSH2 JUMP JUMPDEST";
constexpr const char* kInternalHop = "JUMPDEST PUSH2 DUP5 DUP5 DUP5 PUSH2 JUMP JUMPDEST POP POP POP JUMP";

class Assembler {
public:
    explicit Assembler(std::mt19937_64& rng) : rng_(&rng) {
        for (const auto& op : mlkit::opcode_table()) ops_.emplace(op.mnemonic, op);
    }

    /// Generator for immediates of subsequent motifs.
    void use(std::mt19937_64& rng) { rng_ = &rng; }

    void emit(const char* motif) {
        std::istringstream in(motif);
        std::string tok;
        while (in >> tok) {
            const auto colon = tok.find(':');
            const auto mnemonic = tok.substr(0, colon);
            const auto& info = ops_.at(mnemonic);
            code_.push_back(info.byte);
            if (colon != std::string::npos) {
                const auto value = mlkit::decode_hex(tok.substr(colon + 1));
                for (std::size_t i = value.size(); i < info.immediate_len; ++i) code_.push_back(0);
                code_.insert(code_.end(), value.begin(), value.end());
            } else {
                for (int i = 0; i < info.immediate_len; ++i) code_.push_back(static_cast<std::uint8_t>((*rng_)()));
            }
        }
    }

    void raw(std::uint8_t b) { code_.push_back(b); }
    std::string hex() const { return mlkit::encode_hex(code_); }

private:
    std::mt19937_64* rng_;
    std::map<std::string, mlkit::OpcodeInfo, std::less<>> ops_;
    std::vector<std::uint8_t> code_;
};

} // namespace

std::string bytecode_stub(const TokenSpec& spec, std::uint64_t seed) {
    // The ERC-20 body draws from `rng` only, so a spec and its trap-free twin
    // share it; everything traps or concealments add draws from `extra`.
    std::mt19937_64 rng(seed);
    std::mt19937_64 extra(seed ^ 0x9e3779b97f4a7c15ULL);
    auto between = [](std::mt19937_64& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); };
    Assembler a(rng);
    const auto& t = spec.traps;

    int setters = 0;
    if (t.permission && t.permission->has_setter) ++setters;
    if (t.suspension && t.suspension->has_setter) ++setters;
    if (t.amount_limit && t.amount_limit->has_setter) ++setters;
    if (t.fee && t.fee->has_setter) ++setters;
    const bool dummies = spec.has(Concealment::dummy_function);

    a.emit(kPrologue);
    for (int f = 0, n = between(rng, 9, 14); f < n; ++f) a.emit(kDispatch);
    a.use(extra);
    for (int f = 0, n = setters + (dummies ? between(extra, 2, 4) : 0); f < n; ++f) a.emit(kDispatch);
    a.use(rng);
    a.emit(kDispatchEnd);

    for (int i = 0, n = between(rng, 14, 26); i < n; ++i) {
        a.emit(kBenign[std::uniform_int_distribution<std::size_t>(0, kBenign.size() - 1)(rng)]);
    }
    for (int i = 0, n = between(rng, 1, 3); i < n; ++i) a.emit(kOnlyOwner);
    a.emit(kRenounce);
    if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.3) a.emit(kScaledSupply);

    a.use(extra);
    for (int i = 0, n = dummies ? between(extra, 3, 6) : 0; i < n; ++i) {
        a.emit(kBenign[std::uniform_int_distribution<std::size_t>(0, kBenign.size() - 1)(extra)]);
    }
    if (spec.has(Concealment::incomplete_renouncement)) a.emit(kOnlyOwner);

    const bool trapped = !t.empty();
    const int sites = !trapped || spec.placement == Placement::inline_check ? 1 : between(extra, 1, 2);
    for (int s = 0; trapped && s < sites; ++s) {
        if (spec.placement == Placement::via_external_contract) {
            a.emit(kExternalCall);
        } else if (spec.placement != Placement::inline_check) {
            for (int d = 0; d < spec.nesting_depth; ++d) a.emit(kInternalHop);
        }
        if (t.permission) a.emit(kListCheck);
        if (t.suspension) a.emit(kSwitchCheck);
        if (t.amount_limit) {
            a.emit(kLimitCheck);
            a.emit(kWalletCap);
        }
        if (t.fee) {
            // Buy and sell rates get separate branches.
            a.emit(kFeeUpdate);
            a.emit(kFeeUpdate);
        }
    }
    if (t.callback && t.callback->enabled) a.emit(kCallback);
    for (int i = 0; i < setters; ++i) {
        a.emit(kOnlyOwner);
        a.emit(kSetter);
    }
    a.use(rng);

    // CBOR metadata tail: {"ipfs": <34 bytes>, "solc": 0.8.x}
    for (std::uint8_t b : {0xfe, 0xa2, 0x64, 0x69, 0x70, 0x66, 0x73, 0x58, 0x22}) a.raw(b);
    for (int i = 0; i < 34; ++i) a.raw(static_cast<std::uint8_t>(rng()));
    for (std::uint8_t b : {0x64, 0x73, 0x6f, 0x6c, 0x63, 0x43, 0x00, 0x08}) a.raw(b);
    a.raw(static_cast<std::uint8_t>(between(rng, 4, 20)));
    for (std::uint8_t b : {0x00, 0x33}) a.raw(b);
    return a.hex();
}

} // namespace trapdoor::tokenvm
