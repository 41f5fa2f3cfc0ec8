#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/params.hpp"

namespace muskat {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed() const;
};

/// Names accepted by run_suite: operators, rellich, plemelj, dispersion.
const std::vector<std::string>& suite_names();

/// Runs a named property suite on the built-in test family. Throws
/// InvalidConfiguration for an unknown name.
SuiteReport run_suite(const std::string& name);

nlohmann::json to_json(const SuiteReport& r);

struct RateMeasurement {
    double k = 0.0;
    double predicted = 0.0;
    double measured = 0.0;
    double relative_error = 0.0;
};

/// Evolves a small wave packet of carrier wavenumber k (which must be a
/// grid wavenumber) and fits the decay rate of that Fourier coefficient
/// over one e-folding time of the predicted rate. Negative rates mean
/// growth. `enforce_rt` is disabled so unstable configurations can be
/// measured.
RateMeasurement measure_rate(const FluidParams& p, double k, double eps = 1e-4, double L = 8.0 * 3.14159265358979323846,
                             std::size_t N = 256);

}  // namespace muskat
