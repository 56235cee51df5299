#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace csales {

// Error taxonomy: fatal misuse vs. recoverable runtime trouble. Callers that
// can continue (episode workers) catch GatewayError; everything else unwinds.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw)
        : Error(what), raw_text(std::move(raw)) {}
    std::string raw_text;  // kept for forensics
};

class GatewayError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// FNV-1a, used for stable config hashes and the hash embedder. Fixed
// constants so snapshots and fixtures replay across platforms.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : text) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

// Lowercased alphanumeric tokens; everything else is a separator.
std::vector<std::string> tokenize(std::string_view text);

// Monetary rendering: "$54.50". Prices are plain doubles everywhere; only
// formatting rounds.
std::string format_price(double value);

// "[$29.99, $31.92]"
std::string format_price_range(double lo, double hi);

std::string lowercase(std::string_view text);
std::string trim(std::string_view text);

// deterministic counter-free RNG helper: splitmix64 over a seed stream
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace csales
