#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace instanton {

enum class Tier { fast, full };

Tier parse_tier(const std::string& text);

/// One quantity of a criterion; passes when lower <= value <= upper.
/// A NaN value never passes.
struct Measurement {
    std::string metric;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass() const;
};

struct CriterionResult {
    std::string id;
    std::string title;
    std::vector<Measurement> measurements;
    bool pass = false;
    bool timed_out = false;
    double runtime = 0.0;  ///< seconds
    double budget = 0.0;   ///< seconds
    std::string note;      ///< error text or diagnostics
};

struct AcceptanceSummary {
    Tier tier = Tier::fast;
    std::vector<CriterionResult> criteria;
    bool pass = false;  ///< every criterion passed
    double runtime = 0.0;
    std::string to_json() const;
};

struct CriterionSpec {
    std::string id;
    std::string title;
    Tier tier = Tier::fast;
    double budget = 60.0;  ///< wall-clock limit, seconds
    std::function<std::vector<Measurement>(std::string& note)> body;
};

/// The registered criteria A1..A9 in order.
const std::vector<CriterionSpec>& acceptance_criteria();

struct AcceptanceOptions {
    Tier tier = Tier::fast;
    /// Runs exactly these ids, whatever their tier; empty runs the whole tier.
    std::vector<std::string> only;
    /// Run each criterion in a forked child so a timeout can be enforced.
    bool isolate = true;
    /// Multiplies every budget (slow machines, sanitizers).
    double budget_scale = 1.0;
    /// One line per finished criterion; null for silence.
    std::ostream* log = nullptr;
};

/// Runs the tier. Failures, exceptions and timeouts mark the criterion as
/// failed and the suite continues.
AcceptanceSummary run_acceptance(const AcceptanceOptions& options);

/// Runs one criterion in the current process without a time limit.
CriterionResult run_criterion(const CriterionSpec& spec);

/// "A3 PASS  action=0.4987 in [0.475, 0.525]  (12.3 s)"
std::string format_line(const CriterionResult& result);

} // namespace instanton
