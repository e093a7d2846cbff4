#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oulevy {

// One checked property: pass iff statistic <= threshold.
struct Property {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<Property> properties;

    bool pass() const;
    // All properties whose name starts with `prefix` pass (and there is one).
    bool pass(std::string_view prefix) const;
};

struct SuiteOptions {
    std::uint64_t seed = 1;
    std::uint64_t replicas = 100000; // base budget; path-identity suites use ten times this
    unsigned threads = 1;
};

inline constexpr std::uint64_t min_suite_replicas = 1000;

// cm, mecke, mineka, lemma31, decomposition, gradient.
const std::vector<std::string>& suite_names();

// Runs one suite, or every suite for "all". Throws std::invalid_argument for
// an unknown name or a budget below min_suite_replicas.
std::vector<SuiteReport> run_suite(std::string_view name, const SuiteOptions& options);

} // namespace oulevy
