#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace distex {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

struct BaselineConfig {
  int ig_steps = 10;
  int shap_permutations = 10;
  std::vector<double> occlusion_fill;  // empty means zeros
  uint64_t rng_seed = 0;
};

// x (.) grad f(x)
std::vector<double> gradient_x_input(const GradientFn& grad, std::span<const double> x);

// Straight path from the origin, midpoint quadrature with ig_steps points:
// x (.) mean_t grad f(((t - 0.5)/steps) x).
std::vector<double> integrated_gradients(const GradientFn& grad, std::span<const double> x,
                                         const BaselineConfig& config);

// Element-wise squared gradient.
std::vector<double> sensitivity(const GradientFn& grad, std::span<const double> x);

// relevance_k = f(x) - f(x with feature k set to the fill value)
std::vector<double> occlusion(const ScalarFn& f, std::span<const double> x,
                              const BaselineConfig& config);

// Shapley value sampling over feature-removal orders: walk each sampled
// permutation replacing features with fill values and average the marginal
// drops. All d! orders are enumerated when there are no more of them than
// requested permutations. Deterministic for a fixed rng_seed.
std::vector<double> shapley_sampling(const ScalarFn& f, std::span<const double> x,
                                     const BaselineConfig& config);

}  // namespace distex
