#pragma once

// Shared error machinery and integer aliases.  Every library entry point
// reports contract violations through Error instead of asserting, so the
// CLI and the python module can map them to exit codes / exceptions.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cyclix {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

enum class ErrKind {
    precondition,  // caller broke a documented precondition
    unsupported,   // input is valid but outside implemented range
    internal,      // invariant of our own violated; a bug
};

struct Error : std::runtime_error {
    ErrKind kind;
    Error(ErrKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] inline void fail_pre(const std::string& msg) {
    throw Error(ErrKind::precondition, msg);
}
[[noreturn]] inline void fail_unsupported(const std::string& msg) {
    throw Error(ErrKind::unsupported, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
    throw Error(ErrKind::internal, msg);
}

// always-on internal invariant check (release builds included)
inline void check_internal(bool ok, const char* what) {
    if (!ok) fail_internal(what);
}

// process exit code for an error category, used by the CLI
inline int exit_code(ErrKind k) {
    switch (k) {
        case ErrKind::precondition: return 2;
        case ErrKind::unsupported: return 3;
        case ErrKind::internal: return 1;
    }
    return 1;
}

}  // namespace cyclix
