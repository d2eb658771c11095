#include <trapdoor/mlkit/opcodes.hpp>

#include <array>
#include <fstream>
#include <sstream>

#ifndef TRAPDOOR_DATA_DIR
#define TRAPDOOR_DATA_DIR "data"
#endif

namespace trapdoor::mlkit {

namespace {

std::vector<OpcodeInfo> build_table() {
    std::vector<OpcodeInfo> t;
    auto add = [&](std::uint8_t b, std::string m, std::uint8_t imm = 0) {
        t.push_back({std::move(m), b, imm});
    };
    const std::pair<std::uint8_t, const char*> fixed[] = {
        {0x00, "STOP"},         {0x01, "ADD"},           {0x02, "MUL"},
        {0x03, "SUB"},          {0x04, "DIV"},           {0x05, "SDIV"},
        {0x06, "MOD"},          {0x07, "SMOD"},          {0x08, "ADDMOD"},
        {0x09, "MULMOD"},       {0x0a, "EXP"},           {0x0b, "SIGNEXTEND"},
        {0x10, "LT"},           {0x11, "GT"},            {0x12, "SLT"},
        {0x13, "SGT"},          {0x14, "EQ"},            {0x15, "ISZERO"},
        {0x16, "AND"},          {0x17, "OR"},            {0x18, "XOR"},
        {0x19, "NOT"},          {0x1a, "BYTE"},          {0x1b, "SHL"},
        {0x1c, "SHR"},          {0x1d, "SAR"},           {0x20, "SHA3"},
        {0x30, "ADDRESS"},      {0x31, "BALANCE"},       {0x32, "ORIGIN"},
        {0x33, "CALLER"},       {0x34, "CALLVALUE"},     {0x35, "CALLDATALOAD"},
        {0x36, "CALLDATASIZE"}, {0x37, "CALLDATACOPY"},  {0x38, "CODESIZE"},
        {0x39, "CODECOPY"},     {0x3a, "GASPRICE"},      {0x3b, "EXTCODESIZE"},
        {0x3c, "EXTCODECOPY"},  {0x3d, "RETURNDATASIZE"}, {0x3e, "RETURNDATACOPY"},
        {0x3f, "EXTCODEHASH"},  {0x40, "BLOCKHASH"},     {0x41, "COINBASE"},
        {0x42, "TIMESTAMP"},    {0x43, "NUMBER"},        {0x44, "DIFFICULTY"},
        {0x45, "GASLIMIT"},     {0x46, "CHAINID"},       {0x47, "SELFBALANCE"},
        {0x48, "BASEFEE"},      {0x49, "BLOBHASH"},      {0x4a, "BLOBBASEFEE"},
        {0x50, "POP"},          {0x51, "MLOAD"},         {0x52, "MSTORE"},
        {0x53, "MSTORE8"},      {0x54, "SLOAD"},         {0x55, "SSTORE"},
        {0x56, "JUMP"},         {0x57, "JUMPI"},         {0x58, "PC"},
        {0x59, "MSIZE"},        {0x5a, "GAS"},           {0x5b, "JUMPDEST"},
        {0x5c, "TLOAD"},        {0x5d, "TSTORE"},        {0x5e, "MCOPY"},
        {0x5f, "PUSH0"},
    };
    for (const auto& [b, m] : fixed) add(b, m);
    for (int i = 1; i <= 32; ++i) {
        add(static_cast<std::uint8_t>(0x5f + i), "PUSH" + std::to_string(i),
            static_cast<std::uint8_t>(i));
    }
    for (int i = 1; i <= 16; ++i) add(static_cast<std::uint8_t>(0x7f + i), "DUP" + std::to_string(i));
    for (int i = 1; i <= 16; ++i) add(static_cast<std::uint8_t>(0x8f + i), "SWAP" + std::to_string(i));
    for (int i = 0; i <= 4; ++i) add(static_cast<std::uint8_t>(0xa0 + i), "LOG" + std::to_string(i));
    const std::pair<std::uint8_t, const char*> tail[] = {
        {0xf0, "CREATE"},  {0xf1, "CALL"},       {0xf2, "CALLCODE"},
        {0xf3, "RETURN"},  {0xf4, "DELEGATECALL"}, {0xf5, "CREATE2"},
        {0xfa, "STATICCALL"}, {0xfd, "REVERT"},  {0xfe, "INVALID"},
        {0xff, "SELFDESTRUCT"},
    };
    for (const auto& [b, m] : tail) add(b, m);
    return t;
}

struct ByteMap {
    std::array<const OpcodeInfo*, 256> entries{};
    const OpcodeInfo* invalid = nullptr;
};

const ByteMap& byte_map() {
    static const ByteMap m = [] {
        ByteMap out;
        for (const auto& op : opcode_table()) {
            out.entries[op.byte] = &op;
            if (op.mnemonic == "INVALID") out.invalid = &op;
        }
        return out;
    }();
    return m;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

const std::vector<OpcodeInfo>& opcode_table() {
    static const std::vector<OpcodeInfo> table = build_table();
    return table;
}

std::vector<OpcodeInfo> load_opcode_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open opcode table " + path);
    std::vector<OpcodeInfo> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line_no == 1) continue;  // header
        std::stringstream ss(line);
        std::string mnemonic, byte_text, imm_text;
        if (!std::getline(ss, mnemonic, ',') || !std::getline(ss, byte_text, ',') ||
            !std::getline(ss, imm_text)) {
            throw Error("opcode table line " + std::to_string(line_no) + ": expected 3 fields");
        }
        try {
            const auto b = std::stoul(byte_text, nullptr, 0);
            const auto imm = std::stoul(imm_text);
            if (b > 0xff || imm > 32) throw std::out_of_range("range");
            out.push_back({mnemonic, static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(imm)});
        } catch (const std::logic_error&) {
            throw Error("opcode table line " + std::to_string(line_no) + ": bad number");
        }
    }
    return out;
}

std::string default_opcode_table_path() { return std::string(TRAPDOOR_DATA_DIR) + "/opcodes.csv"; }

const std::vector<std::string>& canonical_mnemonics() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& op : opcode_table()) out.push_back(op.mnemonic);
        return out;
    }();
    return names;
}

std::vector<std::uint8_t> decode_hex(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) throw Error("bytecode hex has odd length");
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_value(hex[i]);
        const int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) throw Error("bytecode contains non-hex characters");
        out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return out;
}

std::string encode_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<Instruction> disassemble_bytes(std::span<const std::uint8_t> code) {
    const auto& map = byte_map();
    std::vector<Instruction> out;
    for (std::size_t pc = 0; pc < code.size();) {
        const OpcodeInfo* op = map.entries[code[pc]];
        if (op == nullptr) op = map.invalid;
        const std::size_t imm = std::min<std::size_t>(op->immediate_len, code.size() - pc - 1);
        out.push_back({pc, code[pc], op->mnemonic, imm});
        pc += 1 + imm;
    }
    return out;
}

OpcodeSequence disassemble(std::string_view hex) {
    const auto bytes = decode_hex(hex);
    OpcodeSequence seq;
    for (const auto& ins : disassemble_bytes(bytes)) seq.push_back(ins.mnemonic);
    return seq;
}

std::uint64_t OpcodeVector::count(std::string_view mnemonic) const {
    auto it = counts.find(std::string(mnemonic));
    return it == counts.end() ? 0 : it->second;
}

std::vector<double> OpcodeVector::dense() const {
    const auto& names = canonical_mnemonics();
    std::vector<double> out(names.size(), 0.0);
    for (std::size_t i = 0; i < names.size(); ++i) out[i] = static_cast<double>(count(names[i]));
    return out;
}

OpcodeVector opcode_features(const OpcodeSequence& sequence) {
    OpcodeVector v;
    for (auto m : sequence) ++v.counts[std::string(m)];
    v.total_ops = sequence.size();
    return v;
}

} // namespace trapdoor::mlkit
