#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace oulevy::cli {

// Exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1; // a verified property failed
inline constexpr int exit_usage = 2;
inline constexpr int exit_runtime = 3;

struct CommonFlags {
    std::string config; // file path or preset name
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replicas;
    std::string out; // directory; empty writes to stdout
    unsigned threads = 0;
};

struct TraceFlags {
    std::optional<double> horizon;
    std::uint64_t count = 16;
};

// Each returns an exit status; std::invalid_argument escapes as a usage error.
int cmd_verify(const std::string& suite, const CommonFlags& flags);
int cmd_tv_decay(const CommonFlags& flags);
int cmd_bounds(const CommonFlags& flags);
int cmd_couple_trace(const CommonFlags& flags, const TraceFlags& trace);

// --threads, overridden by OU_LEVY_THREADS; 0 means all hardware threads.
unsigned resolve_threads(unsigned requested);

} // namespace oulevy::cli
