#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace smtlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points; cached, thread-safe.
const GaussRule& gauss_legendre(int n);

/// Adaptive Gauss-Legendre (20 vs 2x20 points) on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-14, int max_depth = 40);

/// Sum of term(i) for i in [0, n), evaluated in fixed-size chunks whose partial
/// sums are added in chunk order. The result does not depend on the thread count.
double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Runs body(i) for i in [0, n) across workers; body must only write state owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Worker count, from SMTLAB_THREADS (default 1).
int thread_count();

}  // namespace smtlab
