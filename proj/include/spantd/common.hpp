#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spantd {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;

// Input or state errors that callers are expected to handle.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// The input graph cannot have treewidth <= k; carries the failed bound.
struct TreewidthExceeded : Error {
    int k;
    explicit TreewidthExceeded(int k_)
        : Error("treewidth of G is larger than " + std::to_string(k_)), k(k_) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

// Internal invariant check; violations are bugs, not input errors.
#define SPANTD_CHECK(cond, msg) \
    do { \
        if (!(cond)) ::spantd::fail(msg); \
    } while (0)

}  // namespace spantd
