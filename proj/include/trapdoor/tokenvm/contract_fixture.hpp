#pragma once

#include <trapdoor/tokenvm/token.hpp>

#include <string>
#include <string_view>

namespace trapdoor::tokenvm {

struct FixtureOptions {
    /// When false, a via_external_contract spec calls a contract whose source
    /// is absent from the document.
    bool include_external_source = true;
};

/// AST document (schema_version 1) of an ERC-20 contract carrying the spec's
/// traps at its placement, plus the guard contract for external placement.
nlohmann::json contract_fixture(const TokenSpec& spec, const FixtureOptions& options = {});

/// "setX" for identifier "_x" / "x".
std::string setter_name(std::string_view identifier);

} // namespace trapdoor::tokenvm
