#pragma once

#include <trapdoor/tokenvm/token.hpp>

#include <cstdint>
#include <string>

namespace trapdoor::tokenvm {

/// Runtime-bytecode stand-in for a spec, as 0x-prefixed hex. A randomized
/// ERC-20 body (dispatcher, balance and allowance logic, ownable checks,
/// metadata tail) plus guard or arithmetic motifs for each configured trap.
/// Deterministic in (spec, seed).
std::string bytecode_stub(const TokenSpec& spec, std::uint64_t seed);

} // namespace trapdoor::tokenvm
