#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/baselines.hpp"
#include "core/matrix.hpp"

namespace distex {

// Gaussian-product KDE over reference points, used to resample removed
// features conditioned on the kept ones.
struct KdeInpainter {
  Matrix reference;
  std::vector<double> bandwidth;  // per feature, > 0
  uint64_t rng_seed = 0;
};

// Silverman's rule per feature on the reference data.
KdeInpainter make_kde_inpainter(const Matrix& reference, uint64_t seed);

struct InpaintResult {
  std::vector<double> values;
  bool uniform_fallback = false;  // conditioning weights were numerically zero
};

// Replaces the removed coordinates: reference points are weighted by the
// Gaussian kernel product over the kept coordinates, one point is sampled
// by weight, and the removed entries take that point's values plus
// bandwidth-scaled noise. Kept coordinates are returned bit-identical.
InpaintResult inpaint(const KdeInpainter& inpainter, std::span<const double> x,
                      std::span<const int> removed, uint64_t call_seed);

struct FlippingCurve {
  std::vector<double> outcomes;  // one entry per removal step, in [-1, 1]
  double aufc = 0.0;             // mean of outcomes
};

// Removes features in descending relevance order (ties toward the lower
// feature index); at step t the top-t set is inpainted jointly, and the
// outcome is +1 when the classification matches the unperturbed prediction,
// -1 otherwise, averaged over `repeats` inpainting draws.
FlippingCurve flip(const ScalarFn& decider, std::span<const double> relevance,
                   std::span<const double> x, const KdeInpainter& inpainter, int repeats,
                   uint64_t seed, uint64_t salt);

struct MethodEvaluation {
  double mean_aufc = 0.0;
  double std_aufc = 0.0;  // across samples, n-1 normalization
  int samples = 0;
  Matrix curves;  // samples x features
};

using BatchExplainFn =
    std::function<std::vector<double>(std::span<const double> x, uint64_t salt)>;

// Flipping curves for every row of `samples`; parallel across samples with
// per-sample derived seeds, so results do not depend on the thread count.
MethodEvaluation evaluate_method(const ScalarFn& decider, const BatchExplainFn& explain_fn,
                                 const Matrix& samples, const KdeInpainter& inpainter,
                                 int repeats, uint64_t seed, int threads);

}  // namespace distex
