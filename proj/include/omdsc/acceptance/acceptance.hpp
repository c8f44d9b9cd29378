#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace omdsc::acceptance {

// Pinned tolerances.
inline constexpr double kFloatSlack = 1e-9;       // slack on inequalities evaluated in double
inline constexpr double kOptLowerBoundCap = 4.0;  // criterion 8: OPT on the lower-bound instance
inline constexpr double kPhaseAlphaCeiling = 30;  // criterion 6: phase cost / alpha
inline constexpr double kAlphaTol = 1e-12;        // criterion 11

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    nlohmann::json measured = nlohmann::json::object();
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;
    /// FNV-1a over every transcript produced, in order.
    std::uint64_t digest = 0;
    double seconds = 0;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

/// Progress hook, called after each criterion.
using Progress = std::function<void(const CriterionResult&)>;

/// Criteria 1-11 on the exact backend.
SuiteResult run_suite(const Progress& progress = {});

/// Criteria 1-11, then criterion 12 by re-running them and comparing digests.
SuiteResult run_all(const Progress& progress = {});

/// One line per criterion: "[PASS] 3 ceil_div ratio <= 2: ...".
std::string format_line(const CriterionResult& r);

}  // namespace omdsc::acceptance
