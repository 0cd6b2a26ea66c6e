#include "core/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace distex {

namespace {

void check_config(const BaselineConfig& config, size_t dim) {
  if (config.ig_steps < 1) throw InvalidArgumentError("ig_steps must be at least 1");
  if (config.shap_permutations < 1)
    throw InvalidArgumentError("shap_permutations must be at least 1");
  if (!config.occlusion_fill.empty() && config.occlusion_fill.size() != dim)
    throw DimensionError("occlusion fill length does not match the input");
}

std::vector<double> fill_or_zeros(const BaselineConfig& config, size_t dim) {
  return config.occlusion_fill.empty() ? std::vector<double>(dim, 0.0) : config.occlusion_fill;
}

// d! when it fits comfortably, otherwise a sentinel larger than any
// reasonable permutation budget
long factorial_capped(size_t d) {
  long f = 1;
  for (size_t i = 2; i <= d; ++i) {
    f *= static_cast<long>(i);
    if (f > 1'000'000L) return 1'000'001L;
  }
  return f;
}

}  // namespace

std::vector<double> gradient_x_input(const GradientFn& grad, std::span<const double> x) {
  std::vector<double> g = grad(x);
  if (g.size() != x.size()) throw DimensionError("gradient length does not match the input");
  for (size_t k = 0; k < x.size(); ++k) g[k] *= x[k];
  return g;
}

std::vector<double> integrated_gradients(const GradientFn& grad, std::span<const double> x,
                                         const BaselineConfig& config) {
  check_config(config, x.size());
  std::vector<double> acc(x.size(), 0.0);
  std::vector<double> point(x.size());
  for (int t = 1; t <= config.ig_steps; ++t) {
    const double s = (t - 0.5) / config.ig_steps;
    for (size_t k = 0; k < x.size(); ++k) point[k] = s * x[k];
    const std::vector<double> g = grad(point);
    for (size_t k = 0; k < x.size(); ++k) acc[k] += g[k];
  }
  for (size_t k = 0; k < x.size(); ++k) acc[k] = x[k] * acc[k] / config.ig_steps;
  return acc;
}

std::vector<double> sensitivity(const GradientFn& grad, std::span<const double> x) {
  std::vector<double> g = grad(x);
  for (double& v : g) v *= v;
  return g;
}

std::vector<double> occlusion(const ScalarFn& f, std::span<const double> x,
                              const BaselineConfig& config) {
  check_config(config, x.size());
  const std::vector<double> fill = fill_or_zeros(config, x.size());
  const double fx = f(x);
  std::vector<double> relevance(x.size());
  std::vector<double> probe(x.begin(), x.end());
  for (size_t k = 0; k < x.size(); ++k) {
    const double keep = probe[k];
    probe[k] = fill[k];
    relevance[k] = fx - f(probe);
    probe[k] = keep;
  }
  return relevance;
}

std::vector<double> shapley_sampling(const ScalarFn& f, std::span<const double> x,
                                     const BaselineConfig& config) {
  check_config(config, x.size());
  const size_t d = x.size();
  const std::vector<double> fill = fill_or_zeros(config, d);

  std::vector<std::vector<int>> orders;
  if (factorial_capped(d) <= config.shap_permutations) {
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      orders.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    Rng rng(mix_seed({config.rng_seed, 0x73686170ULL}));
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    for (int p = 0; p < config.shap_permutations; ++p) {
      rng.shuffle(perm);
      orders.push_back(perm);
    }
  }

  std::vector<double> relevance(d, 0.0);
  std::vector<double> probe(d);
  for (const auto& order : orders) {
    std::copy(x.begin(), x.end(), probe.begin());
    double previous = f(probe);
    for (int k : order) {
      probe[k] = fill[k];
      const double current = f(probe);
      relevance[k] += previous - current;
      previous = current;
    }
  }
  for (double& v : relevance) v /= static_cast<double>(orders.size());
  return relevance;
}

}  // namespace distex
