#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sparcas::cli {

struct VerifyOptions {
    // Acceptance-sized sweeps instead of the quick defaults.
    bool full = false;
    // "", "tie-break" or "payment-sign".
    std::string mutate;
    std::filesystem::path output = "verify-out";
};

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
    // Written to <output>/counterexample-<name>.txt on failure.
    std::string counterexample;
};

std::vector<CheckResult> run_verify(const VerifyOptions& options, std::ostream& log);

}  // namespace sparcas::cli
