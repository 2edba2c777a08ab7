#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace neutro {

struct VerifyOptions {
    std::uint64_t seed = 1;
    int instances = 20;
    int n = 10;
    int k = 3;
    int d = 2;
    // Perturbs the analytic gradient and the membership update so the
    // checks can be shown to fail.
    bool inject_fault = false;
};

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    int instances = 0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

// Runs the gradient (central finite differences of the Lagrangian), the
// membership and centre stationarity checks and the constraint check on
// random instances.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace neutro
