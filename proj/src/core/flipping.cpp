#include "core/flipping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace distex {

KdeInpainter make_kde_inpainter(const Matrix& reference, uint64_t seed) {
  if (reference.rows() < 1) throw InvalidArgumentError("inpainter needs reference data");
  KdeInpainter inp;
  inp.reference = reference;
  inp.rng_seed = seed;
  const int n = reference.rows();
  const double factor = 0.9 * std::pow(static_cast<double>(n), -0.2);
  inp.bandwidth.resize(reference.cols());
  for (int k = 0; k < reference.cols(); ++k) {
    std::vector<double> col = reference.column(k);
    const double sigma = sample_stddev(col);
    const double iqr = quantile(col, 0.75) - quantile(col, 0.25);
    double spread = sigma;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    double h = factor * spread;
    if (!(h > 0.0)) h = 1e-9;  // constant feature
    inp.bandwidth[k] = h;
  }
  return inp;
}

InpaintResult inpaint(const KdeInpainter& inpainter, std::span<const double> x,
                      std::span<const int> removed, uint64_t call_seed) {
  const int d = inpainter.reference.cols();
  if (static_cast<int>(x.size()) != d) throw DimensionError("input dimension mismatch");
  if (removed.empty()) throw InvalidArgumentError("removed set must be nonempty");
  std::vector<char> is_removed(d, 0);
  for (int k : removed) {
    if (k < 0 || k >= d) throw InvalidArgumentError("removed feature index out of range");
    is_removed[k] = 1;
  }

  const int n = inpainter.reference.rows();
  std::vector<double> log_w(n, 0.0);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r) {
    const auto u = inpainter.reference.row(r);
    double lw = 0.0;
    for (int k = 0; k < d; ++k) {
      if (is_removed[k]) continue;
      const double z = (x[k] - u[k]) / inpainter.bandwidth[k];
      lw -= 0.5 * z * z;
    }
    log_w[r] = lw;
    max_lw = std::max(max_lw, lw);
  }

  InpaintResult out;
  std::vector<double> weights(n);
  double total = 0.0;
  if (std::isfinite(max_lw)) {
    for (int r = 0; r < n; ++r) {
      weights[r] = std::exp(log_w[r] - max_lw);
      total += weights[r];
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    total = static_cast<double>(n);
    out.uniform_fallback = true;
  }

  Rng rng(mix_seed({inpainter.rng_seed, call_seed}));
  const double u = rng.uniform() * total;
  int pick = n - 1;
  double acc = 0.0;
  for (int r = 0; r < n; ++r) {
    acc += weights[r];
    if (u < acc) {
      pick = r;
      break;
    }
  }

  out.values.assign(x.begin(), x.end());
  const auto ref = inpainter.reference.row(pick);
  for (int k = 0; k < d; ++k)
    if (is_removed[k]) out.values[k] = ref[k] + inpainter.bandwidth[k] * rng.normal();
  return out;
}

FlippingCurve flip(const ScalarFn& decider, std::span<const double> relevance,
                   std::span<const double> x, const KdeInpainter& inpainter, int repeats,
                   uint64_t seed, uint64_t salt) {
  const int d = static_cast<int>(x.size());
  if (static_cast<int>(relevance.size()) != d)
    throw DimensionError("explanation length does not match the input");
  for (double v : relevance)
    if (std::isnan(v)) throw InvalidArgumentError("explanation contains NaN");
  if (repeats < 1) throw InvalidArgumentError("repeats must be at least 1");

  const int base_sign = decider(x) >= 0.0 ? 1 : -1;

  // importance is read toward the predicted class: for negatively classified
  // samples the decisive features carry the most negative scores
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = base_sign * relevance[a];
    const double rb = base_sign * relevance[b];
    if (ra != rb) return ra > rb;
    return a < b;
  });

  FlippingCurve curve;
  curve.outcomes.resize(d);
  std::vector<int> removed;
  removed.reserve(d);
  for (int t = 1; t <= d; ++t) {
    removed.push_back(order[t - 1]);
    double outcome = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const uint64_t call_seed =
          mix_seed({seed, salt, static_cast<uint64_t>(t), static_cast<uint64_t>(r)});
      const InpaintResult probe = inpaint(inpainter, x, removed, call_seed);
      const int sign = decider(probe.values) >= 0.0 ? 1 : -1;
      outcome += sign == base_sign ? 1.0 : -1.0;
    }
    curve.outcomes[t - 1] = outcome / repeats;
  }
  curve.aufc = mean(curve.outcomes);
  return curve;
}

MethodEvaluation evaluate_method(const ScalarFn& decider, const BatchExplainFn& explain_fn,
                                 const Matrix& samples, const KdeInpainter& inpainter,
                                 int repeats, uint64_t seed, int threads) {
  if (samples.rows() == 0) throw InvalidArgumentError("empty evaluation split");
  const int n = samples.rows();
  const int d = samples.cols();

  MethodEvaluation eval;
  eval.samples = n;
  eval.curves = Matrix(n, d);
  std::vector<double> aufc(n);

  parallel_for(n, threads, [&](int i) {
    const auto x = samples.row(i);
    const std::vector<double> relevance = explain_fn(x, static_cast<uint64_t>(i));
    const FlippingCurve curve =
        flip(decider, relevance, x, inpainter, repeats, seed, static_cast<uint64_t>(i));
    aufc[i] = curve.aufc;
    auto dst = eval.curves.row(i);
    std::copy(curve.outcomes.begin(), curve.outcomes.end(), dst.begin());
  });

  eval.mean_aufc = mean(aufc);
  eval.std_aufc = sample_stddev(aufc);
  return eval;
}

}  // namespace distex
