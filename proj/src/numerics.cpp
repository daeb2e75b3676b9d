#include "smtlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace smtlab {

namespace {

GaussRule make_gauss(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, const GaussRule& g) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
  return s * half;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double whole,
                     double abs_tol, int depth, const GaussRule& g) {
  double mid = 0.5 * (a + b);
  double left = gauss_panel(f, a, mid, g);
  double right = gauss_panel(f, mid, b, g);
  if (depth <= 0 || std::abs(left + right - whole) <= abs_tol) return left + right;
  return adaptive_step(f, a, mid, left, 0.5 * abs_tol, depth - 1, g) +
         adaptive_step(f, mid, b, right, 0.5 * abs_tol, depth - 1, g);
}

constexpr std::size_t kChunk = 4096;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          int max_depth) {
  const GaussRule& g = gauss_legendre(20);
  double whole = gauss_panel(f, a, b, g);
  double abs_tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return adaptive_step(f, a, b, whole, abs_tol, max_depth, g);
}

int thread_count() {
  static const int count = [] {
    const char* env = std::getenv("SMTLAB_THREADS");
    int n = env ? std::atoi(env) : 1;
    return std::clamp(n, 1, 256);
  }();
  return count;
}

double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  auto work = [&](std::size_t c) {
    double s = 0.0;
    std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) s += term(i);
    partial[c] = s;
  };
  int threads = std::min<int>(thread_count(), static_cast<int>(chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) work(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < chunks; c += threads) work(c);
      });
    for (auto& th : pool) th.join();
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t chunks = (n + kChunk - 1) / kChunk;
  int threads = std::min<int>(thread_count(), static_cast<int>(chunks));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += threads) {
        std::size_t end = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) body(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace smtlab
