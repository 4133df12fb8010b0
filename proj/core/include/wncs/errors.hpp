#pragma once
#include <stdexcept>
#include <string>

namespace wncs {

// Bad scenario file, invalid geometry, infeasible defaults. CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime fault while simulating (non-finite input, failed decomposition).
// Halts the run; CLI exit code 2.
struct SimulationFault : std::runtime_error {
  explicit SimulationFault(const std::string& msg) : std::runtime_error(msg) {}
};

// Gain synthesis did not converge within its iteration budget.
struct SynthesisError : SimulationFault {
  explicit SynthesisError(const std::string& msg) : SimulationFault(msg) {}
};

// Numerically singular innovation covariance or similar estimator failure.
struct EstimationFault : SimulationFault {
  explicit EstimationFault(const std::string& msg) : SimulationFault(msg) {}
};

}  // namespace wncs
