#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lossyint/metrology.hpp"
#include "lossyint/spin_space.hpp"

namespace lossyint {

// Nelder-Mead minimization with dimension-adaptive coefficients.
struct SimplexOptions {
  double initial_step = 0.1;
  int max_iterations = 5000;
  // Stop once the spread of simplex values is below tol * max(1, |f_best|).
  double tolerance = 1e-11;
};

struct SimplexResult {
  RealVector x;
  double value = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const RealVector&)>& objective, const RealVector& start,
                          const SimplexOptions& options);

struct OptimizerOptions {
  int restarts = 16;
  // Simplex iterations allowed per restart.
  int max_iters = 20000;
  double tol = 1e-11;
  // Constrain amplitudes to c_m = c_{-m}.
  bool symmetric = false;
  // Optimize complex amplitudes instead of real nonnegative ones.
  bool allow_phases = false;
  std::uint64_t seed = 1;
  // Restarts evaluated concurrently; results do not depend on it.
  int jobs = 1;
};

struct OptimizationResult {
  SpinKet state;
  PrecisionRecord record;
  // Best Fisher information after each restart, in restart order.
  std::vector<double> best_history;
};

// Maximizes the lossy QFI over N-photon inputs by multi-start simplex search.
// Restart 0 is the N00N state, a handful of structured profiles follow, and
// the rest are random; all randomness derives from options.seed. Throws
// std::domain_error unless N >= 1 and 0 < eta <= 1.
OptimizationResult optimize_input_state(int n_photons, double eta, const OptimizerOptions& options = {});

}  // namespace lossyint
