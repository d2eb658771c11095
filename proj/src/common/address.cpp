#include <trapdoor/common.hpp>

#include <array>

namespace trapdoor {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

Address derive_address(std::string_view label) {
    static constexpr std::array<char, 16> hex = {'0', '1', '2', '3', '4', '5', '6', '7',
                                                 '8', '9', 'a', 'b', 'c', 'd', 'e', 'f'};
    std::string out = "0x";
    out.reserve(42);
    // 40 hex digits from three independently salted 64-bit hashes.
    for (std::uint64_t salt = 0; out.size() < 42; ++salt) {
        std::uint64_t h = fnv1a(label, salt * 0x9e3779b97f4a7c15ULL);
        for (int i = 0; i < 16 && out.size() < 42; ++i) {
            out.push_back(hex[h & 0xF]);
            h >>= 4;
        }
    }
    return Address{std::move(out)};
}

void to_json(nlohmann::json& j, const Address& a) { j = a.str(); }

void from_json(const nlohmann::json& j, Address& a) { a = Address{j.get<std::string>()}; }

} // namespace trapdoor
