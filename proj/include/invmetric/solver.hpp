#pragma once

// Solver configuration and diagnostics shared by the extremal solvers.

#include <string>

#include "invmetric/core.hpp"

namespace invmetric {

struct SolverConfig {
  int degree = 8;
  int boundary_samples = 128;
  int restarts = 8;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  double min_delta = 1e-4;
  int path_nodes = 16;
  int laurent_degree = 12;
  int patience = 2;  // restarts without improvement before stopping early

  void validate() const {
    if (degree < 1 || degree > 64) throw InputError("degree must lie in [1, 64]");
    if (boundary_samples < 8) throw InputError("boundary_samples must be at least 8");
    if (restarts < 1) throw InputError("restarts must be positive");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (!(min_delta >= 0.0)) throw InputError("min_delta must be nonnegative");
    if (path_nodes < 2) throw InputError("path_nodes must be at least 2");
    if (laurent_degree < 1 || laurent_degree > 64) throw InputError("laurent_degree must lie in [1, 64]");
  }
};

enum class Direction { Upper, Lower };

inline const char* direction_name(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }

struct SolveDiagnostics {
  std::string method;
  int restarts_run = 0;
  int certified = 0;
  int evaluations = 0;
  double shrink = 0.0;
  double max_violation = 0.0;
};
}  // namespace invmetric
