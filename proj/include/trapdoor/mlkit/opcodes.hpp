#pragma once

#include <trapdoor/common.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trapdoor::mlkit {

struct OpcodeInfo {
    std::string mnemonic;
    std::uint8_t byte = 0;
    std::uint8_t immediate_len = 0;

    bool operator==(const OpcodeInfo&) const = default;
};

/// Built-in EVM table (through Cancun), sorted by byte. Bytes not listed
/// disassemble to INVALID.
const std::vector<OpcodeInfo>& opcode_table();

/// Reads a `mnemonic,byte,immediate_len` file. Throws Error on bad rows.
std::vector<OpcodeInfo> load_opcode_table(const std::string& path);
/// Location of the shipped data/opcodes.csv.
std::string default_opcode_table_path();

/// Mnemonics in table order; this is the opcode feature space.
const std::vector<std::string>& canonical_mnemonics();

using OpcodeSequence = std::vector<std::string_view>;

struct Instruction {
    std::size_t offset = 0;
    std::uint8_t byte = 0;
    std::string_view mnemonic;
    std::size_t immediate_len = 0;  // bytes actually consumed (short at end of code)
};

/// Even-length hex, optional 0x prefix. Throws Error otherwise.
std::vector<std::uint8_t> decode_hex(std::string_view hex);
std::string encode_hex(std::span<const std::uint8_t> bytes);

/// Linear sweep. A PUSH running past the end consumes what is left.
std::vector<Instruction> disassemble_bytes(std::span<const std::uint8_t> code);
OpcodeSequence disassemble(std::string_view hex);

struct OpcodeVector {
    std::map<std::string, std::uint64_t> counts;  // only non-zero entries
    std::uint64_t total_ops = 0;

    std::uint64_t count(std::string_view mnemonic) const;
    /// Counts laid out over canonical_mnemonics().
    std::vector<double> dense() const;
};

OpcodeVector opcode_features(const OpcodeSequence& sequence);

} // namespace trapdoor::mlkit
