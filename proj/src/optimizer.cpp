#include "lossyint/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lossyint {

SimplexResult nelder_mead(const std::function<double(const RealVector&)>& objective, const RealVector& start,
                          const SimplexOptions& options) {
  const int n = static_cast<int>(start.size());
  if (n == 0) throw std::invalid_argument("empty start vector");
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  SimplexResult res;
  auto eval = [&](const RealVector& x) {
    ++res.evaluations;
    return objective(x);
  };

  std::vector<RealVector> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  vals[0] = eval(start);
  for (int i = 0; i < n; ++i) {
    pts[i + 1](i) += options.initial_step;
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<int> order(n + 1);
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front(), worst = order.back(), second = order[n - 1];
    if (vals[worst] - vals[best] <= options.tolerance * std::max(1.0, std::abs(vals[best]))) {
      res.converged = true;
      break;
    }
    RealVector centroid = RealVector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[order[i]];
    centroid /= n;

    const RealVector xr = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const RealVector xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const RealVector xc = outside ? RealVector(centroid + gamma * (xr - centroid))
                                  : RealVector(centroid + gamma * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (outside ? fc <= fr : fc < vals[worst]) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      const int idx = order[i];
      pts[idx] = pts[best] + delta * (pts[idx] - pts[best]);
      vals[idx] = eval(pts[idx]);
    }
  }
  const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[best];
  res.value = vals[best];
  return res;
}

namespace {

// Maps simplex coordinates to amplitude vectors and back.
class Parametrization {
 public:
  Parametrization(int n_photons, bool symmetric, bool phases)
      : n_(n_photons), symmetric_(symmetric), phases_(phases) {}

  int free_count() const { return symmetric_ ? n_ / 2 + 1 : n_ + 1; }
  int size() const { return phases_ ? 2 * free_count() : free_count(); }

  ComplexVector amplitudes(const RealVector& x) const {
    ComplexVector c(n_ + 1);
    const int f = free_count();
    for (int k = 0; k <= n_; ++k) {
      const int src = (symmetric_ && k > n_ / 2) ? n_ - k : k;
      c(k) = phases_ ? Complex(x(src), x(src + f)) : Complex(std::abs(x(src)), 0.0);
    }
    return c;
  }

  RealVector coordinates(const ComplexVector& c) const {
    RealVector x = RealVector::Zero(size());
    const int f = free_count();
    for (int k = 0; k < f; ++k) {
      x(k) = phases_ ? c(k).real() : std::abs(c(k));
      if (phases_) x(k + f) = c(k).imag();
    }
    return x;
  }

 private:
  int n_;
  bool symmetric_;
  bool phases_;
};

ComplexVector structured_start(int n_photons, int which) {
  ComplexVector c = ComplexVector::Zero(n_photons + 1);
  const double j = 0.5 * n_photons;
  if (which == 0) {
    c(0) = c(n_photons) = 1.0;
  } else if (which == 1) {
    c.setOnes();
  } else {
    // Gaussian profiles in m of increasing width
    static constexpr double kWidths[] = {0.3, 0.6, 1.0, 1.6};
    const double s = kWidths[(which - 2) % 4] * std::sqrt(std::max(1.0, j));
    for (int k = 0; k <= n_photons; ++k) {
      const double m = k - j;
      c(k) = std::exp(-m * m / (4.0 * s * s));
    }
  }
  return c / c.norm();
}

constexpr int kStructuredStarts = 6;

struct RestartOutcome {
  ComplexVector amplitudes;
  double fisher = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

RestartOutcome run_restart(const LossyQfi& qfi, const Parametrization& param, const OptimizerOptions& options,
                           int index) {
  const int n = qfi.n_photons();
  ComplexVector start;
  if (index < kStructuredStarts) {
    start = structured_start(n, index);
  } else {
    std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    start.resize(n + 1);
    for (int k = 0; k <= n; ++k)
      start(k) = options.allow_phases ? Complex(normal(rng), normal(rng)) : Complex(std::abs(normal(rng)), 0.0);
    if (options.symmetric)
      for (int k = n / 2 + 1; k <= n; ++k) start(k) = start(n - k);
    start /= start.norm();
  }

  const auto objective = [&](const RealVector& x) {
    const ComplexVector c = param.amplitudes(x);
    if (c.squaredNorm() == 0.0) return 0.0;
    return options.allow_phases ? -qfi(c) : -qfi(RealVector(c.real()));
  };

  RestartOutcome out;
  RealVector x = param.coordinates(start);
  x /= x.norm();
  double best = objective(x);
  ++out.evaluations;
  SimplexOptions so;
  so.tolerance = options.tol;
  so.initial_step = 0.1;
  long budget = options.max_iters;
  // Re-seed the simplex around the incumbent until it stops improving.
  while (budget > 0) {
    so.max_iterations = static_cast<int>(budget);
    const SimplexResult r = nelder_mead(objective, x, so);
    out.iterations += r.iterations;
    out.evaluations += r.evaluations;
    budget -= std::max<long>(r.iterations, 1);
    const double gain = best - r.value;
    if (r.value < best) {
      best = r.value;
      x = r.x / param.amplitudes(r.x).norm();
    }
    out.converged = r.converged;
    if (!r.converged || gain <= options.tol * std::max(1.0, std::abs(best))) break;
    so.initial_step = std::max(1e-4, 0.5 * so.initial_step);
  }
  ComplexVector c = param.amplitudes(x);
  c /= c.norm();
  out.amplitudes = c;
  out.fisher = -best;
  return out;
}

}  // namespace

OptimizationResult optimize_input_state(int n_photons, double eta, const OptimizerOptions& options) {
  if (n_photons < 1) throw std::domain_error("optimization needs N >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("optimization needs 0 < eta <= 1");
  if (options.restarts < 1) throw std::domain_error("need at least one restart");
  const LossyQfi qfi(n_photons, eta);
  const Parametrization param(n_photons, options.symmetric, options.allow_phases);

  std::vector<RestartOutcome> outcomes(options.restarts);
  const int jobs = std::max(1, options.jobs);
  for (int first = 0; first < options.restarts; first += jobs) {
    const int last = std::min(options.restarts, first + jobs);
    if (jobs == 1) {
      outcomes[first] = run_restart(qfi, param, options, first);
      continue;
    }
    std::vector<std::future<RestartOutcome>> pending;
    for (int i = first; i < last; ++i)
      pending.push_back(std::async(std::launch::async, run_restart, std::cref(qfi), std::cref(param),
                                   std::cref(options), i));
    for (int i = first; i < last; ++i) outcomes[i] = pending[i - first].get();
  }

  int best = 0;
  std::vector<double> history;
  OptimizerMeta meta;
  meta.restarts = options.restarts;
  for (int i = 0; i < options.restarts; ++i) {
    if (outcomes[i].fisher > outcomes[best].fisher) best = i;
    history.push_back(outcomes[best].fisher);
    meta.iterations += outcomes[i].iterations;
    meta.evaluations += outcomes[i].evaluations;
  }
  meta.converged = outcomes[best].converged;

  ComplexVector c = outcomes[best].amplitudes;
  if (options.allow_phases) {
    // fix the global phase: largest amplitude real and positive
    int k;
    c.cwiseAbs().maxCoeff(&k);
    c *= std::polar(1.0, -std::arg(c(k)));
  }
  SpinKet state(c);
  PrecisionRecord record = make_precision_record(state, eta);
  record.optimizer = meta;
  return {std::move(state), record, std::move(history)};
}

}  // namespace lossyint
