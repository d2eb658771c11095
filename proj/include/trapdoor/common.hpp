#pragma once

#include <nlohmann/json.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trapdoor {

/// Token quantities in base units.
using Amount = std::uint64_t;

/// Account, contract or pool address. Token identifiers are their contract
/// addresses, so the same type is used for both.
class Address {
public:
    Address() = default;
    explicit Address(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    auto operator<=>(const Address&) const = default;

private:
    std::string value_;
};

inline const Address kZeroAddress{"0x0000000000000000000000000000000000000000"};

/// Deterministic pseudo-address: "0x" followed by 40 hex digits derived from
/// a label. Used for pools and synthetic accounts.
Address derive_address(std::string_view label);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void to_json(nlohmann::json& j, const Address& a);
void from_json(const nlohmann::json& j, Address& a);

} // namespace trapdoor

template <>
struct std::hash<trapdoor::Address> {
    std::size_t operator()(const trapdoor::Address& a) const noexcept {
        return std::hash<std::string>{}(a.str());
    }
};
