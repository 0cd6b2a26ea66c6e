#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/lrp.hpp"
#include "support.hpp"

using namespace distex;
using namespace distex::test;

namespace {

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("smooth pooling probabilities match hand-computed softmax") {
  const NeuralizedNet net = neuralize_svm(two_sv_fixture());
  const std::vector<double> x{0.3, -0.2};
  const ForwardTrace trace = forward(net, x);
  const PoolingProbabilities probs = pooling_probabilities_smooth(net, trace, 1.0);
  // singleton pools
  CHECK(probs.positive[0] == doctest::Approx(1.0));
  CHECK(probs.negative[0] == doctest::Approx(1.0));

  // two equal scores split evenly regardless of beta
  const SvmModel twin = make_svm(Matrix::from_rows({{1., 0.}, {1., 0.}, {-1., 0.}}),
                                 {1., 1., 1.}, {1, 1, -1}, 1.0, 0.0);
  const NeuralizedNet tnet = neuralize_svm(twin);
  const ForwardTrace ttrace = forward(tnet, x);
  for (double beta : {0.3, 1.0, 7.0}) {
    const auto p = pooling_probabilities_smooth(tnet, ttrace, beta);
    CHECK(p.positive[0] == doctest::Approx(0.5));
    CHECK(p.positive[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("softmax of scores (0,1) at beta 1") {
  // scores s = (0, 1) arise from points at distances 1 and 0 on a line
  const SvmModel m = make_svm(Matrix::from_rows({{0.0}, {1.0}, {-3.0}}),
                              {1.0, 1.0, 1.0}, {1, 1, -1}, 1.0, 0.0);
  const NeuralizedNet net = neuralize_svm(m);
  const std::vector<double> x{1.0};
  const ForwardTrace trace = forward(net, x);
  CHECK(trace.point_scores[0] == doctest::Approx(-1.0));
  CHECK(trace.point_scores[1] == doctest::Approx(0.0));
  const PoolingProbabilities probs = pooling_probabilities_smooth(net, trace, 1.0);
  CHECK(probs.positive[0] == doctest::Approx(0.268941421369995).epsilon(1e-9));
  CHECK(probs.positive[1] == doctest::Approx(0.731058578630005).epsilon(1e-9));
}

TEST_CASE("banded probabilities on the knn fixture") {
  const NeuralizedNet net = neuralize_knn(knn_line_fixture(1));
  const std::vector<double> x{0.5};
  const ForwardTrace trace = forward(net, x);
  const PoolingProbabilities probs = pooling_probabilities_ranked(net, trace, 0);
  CHECK(probs.positive[0] == doctest::Approx(1.0));  // point at 1
  CHECK(probs.positive[1] == doctest::Approx(0.0));
  CHECK(probs.negative[0] == doctest::Approx(1.0));  // point at -1
  CHECK(probs.negative[1] == doctest::Approx(0.0));

  // band wider than the pool saturates to uniform
  const PoolingProbabilities wide = pooling_probabilities_ranked(net, trace, 10);
  CHECK(wide.positive[0] == doctest::Approx(0.5));
  CHECK(wide.positive[1] == doctest::Approx(0.5));
  CHECK(wide.negative[0] == doctest::Approx(0.5));
  CHECK(wide.negative[1] == doctest::Approx(0.5));
}

TEST_CASE("value ties at the band boundary are all included") {
  // two positive points equidistant from x, k=1 so the band is rank 1 only
  const KnnModel m = make_knn(Matrix::from_rows({{1.0}, {-1.0}, {-4.0}, {5.0}}),
                              {1, 1, -1, -1}, 1);
  const NeuralizedNet net = neuralize_knn(m);
  const std::vector<double> x{0.0};
  const ForwardTrace trace = forward(net, x);
  const PoolingProbabilities probs = pooling_probabilities_ranked(net, trace, 0);
  CHECK(probs.positive[0] == doctest::Approx(0.5));
  CHECK(probs.positive[1] == doctest::Approx(0.5));
}

TEST_CASE("pooling probabilities sum to one") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const double theta = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 0.5 : -0.5);
    const SvmModel m = random_svm(rng, 6 + rng.uniform_int(30), 4, 0.5, theta);
    const NeuralizedNet net = neuralize_svm(m);
    std::vector<double> x(4);
    for (auto& v : x) v = rng.normal();
    const ForwardTrace trace = forward(net, x);
    const auto probs = pooling_probabilities_smooth(net, trace, 0.2 + 3.0 * rng.uniform());
    CHECK(std::abs(sum(probs.positive) - 1.0) < 1e-10);
    CHECK(std::abs(sum(probs.negative) - 1.0) < 1e-10);

    const KnnModel knn = random_knn(rng, 10 + rng.uniform_int(20), 4, 1 + 2 * rng.uniform_int(3));
    const NeuralizedNet knet = neuralize_knn(knn);
    const ForwardTrace ktrace = forward(knet, x);
    const auto kprobs = pooling_probabilities_ranked(knet, ktrace, rng.uniform_int(4));
    CHECK(std::abs(sum(kprobs.positive) - 1.0) < 1e-10);
    CHECK(std::abs(sum(kprobs.negative) - 1.0) < 1e-10);
  }
}

TEST_CASE("explain on the fixture gives (4, 0) for any eta") {
  const NeuralizedNet net = neuralize_svm(two_sv_fixture());
  const std::vector<double> x{1.0, 0.0};
  for (double eta : {0.0, 0.3, 0.7, 1.0}) {
    const Explanation e = explain(net, x, {eta, 1.0, 0});
    CHECK(e.relevance[0] == doctest::Approx(4.0));
    CHECK(e.relevance[1] == doctest::Approx(0.0));
    CHECK(e.g_value == doctest::Approx(4.0));
  }
}

TEST_CASE("degenerate probabilities reduce to a single pair's contribution") {
  Rng rng(19);
  const SvmModel m = random_svm(rng, 8, 3, 1.0, 0.0);
  const NeuralizedNet net = neuralize_svm(m);
  std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
  PoolingProbabilities probs;
  probs.positive.assign(net.positive_pool.size(), 0.0);
  probs.negative.assign(net.negative_pool.size(), 0.0);
  probs.positive[2] = 1.0;
  probs.negative[1] = 1.0;
  const double eta = 0.6;
  const auto rel = explain_fast_path(net, x, probs, eta);
  const PairParams p = pair_params(net, net.positive_pool[2], net.negative_pool[1]);
  for (int k = 0; k < 3; ++k)
    CHECK(rel[k] == doctest::Approx((x[k] - eta * p.midpoint[k]) * p.weight[k]).epsilon(1e-12));
}

TEST_CASE("fast path agrees with the brute-force double sum") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const double theta = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 0.4 : -0.7);
    const int n = 4 + rng.uniform_int(26);
    const int d = 1 + rng.uniform_int(8);
    const SvmModel m = random_svm(rng, n, d, 0.3 + 2.0 * rng.uniform(), theta);
    const NeuralizedNet net = neuralize_svm(m);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.normal();
    const ForwardTrace trace = forward(net, x);
    const auto probs = pooling_probabilities_smooth(net, trace, 0.5 + rng.uniform());
    for (double eta : {0.0, 0.3, 0.6, 1.0}) {
      const auto fast = explain_fast_path(net, x, probs, eta);
      const auto brute = brute_force_relevance(net, x, probs, eta);
      CHECK(max_rel_error(fast, brute, 1e-6) < 1e-10);
    }
  }
}

TEST_CASE("fast path agrees with brute force for banded knn explanations") {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const KnnModel m = random_knn(rng, 12 + rng.uniform_int(20), 4, 1 + 2 * rng.uniform_int(3));
    const NeuralizedNet net = neuralize_knn(m);
    std::vector<double> x(4);
    for (auto& v : x) v = rng.normal();
    const ForwardTrace trace = forward(net, x);
    const auto probs = pooling_probabilities_ranked(net, trace, rng.uniform_int(3));
    const double eta = rng.uniform();
    const auto fast = explain_fast_path(net, x, probs, eta);
    const auto brute = brute_force_relevance(net, x, probs, eta);
    CHECK(max_rel_error(fast, brute, 1e-6) < 1e-10);
  }
}

TEST_CASE("explanations interpolate their eta endpoints") {
  Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const SvmModel m = random_svm(rng, 5 + rng.uniform_int(20), 3, 1.0, 0.0);
    const NeuralizedNet net = neuralize_svm(m);
    std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
    const double eta = rng.uniform();
    const double beta = 0.5 + rng.uniform();
    const auto mid = explain(net, x, {eta, beta, 0}).relevance;
    const auto lo = explain(net, x, {0.0, beta, 0}).relevance;
    const auto hi = explain(net, x, {1.0, beta, 0}).relevance;
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(mid[k] - ((1.0 - eta) * lo[k] + eta * hi[k])) < 1e-12);
  }
}

TEST_CASE("large beta concentrates the pool on its argmax") {
  Rng rng(41);
  const SvmModel m = random_svm(rng, 20, 4, 1.0, 0.0);
  const NeuralizedNet net = neuralize_svm(m);
  std::vector<double> x{0.1, -0.4, 0.9, 0.0};
  const ForwardTrace trace = forward(net, x);
  const auto probs = pooling_probabilities_smooth(net, trace, 1e6);
  const double top = *std::max_element(probs.positive.begin(), probs.positive.end());
  CHECK(top > 1.0 - 1e-6);
}

TEST_CASE("kappa 0 with q 1 depends only on the selected pair") {
  const KnnModel m = make_knn(
      Matrix::from_rows({{1.0, 0.0}, {3.0, 1.0}, {-1.0, 0.5}, {-2.5, -1.0}}), {1, 1, -1, -1}, 1);
  const NeuralizedNet net = neuralize_knn(m);
  const std::vector<double> x{0.25, 0.125};
  const auto before = explain(net, x, {0.8, 1.0, 0}).relevance;

  // move both non-selected points; the explanation must not change at all
  KnnModel moved = m;
  moved.points(1, 0) = 7.5;
  moved.points(3, 1) = -4.25;
  const KnnModel remade = make_knn(moved.points, moved.labels, 1);
  const NeuralizedNet net2 = neuralize_knn(remade);
  const auto after = explain(net2, x, {0.8, 1.0, 0}).relevance;
  CHECK(before[0] == after[0]);
  CHECK(before[1] == after[1]);
}

TEST_CASE("eta 1 explanations are translation covariant") {
  // dyadic coordinates keep the arithmetic exact under integer shifts
  const KnnModel m = make_knn(
      Matrix::from_rows({{0.5, 1.25}, {2.0, -0.75}, {-1.5, 0.25}, {-3.0, -2.5}}),
      {1, 1, -1, -1}, 1);
  const NeuralizedNet net = neuralize_knn(m);
  const std::vector<double> x{0.25, -0.5};
  const auto base = explain(net, x, {1.0, 1.0, 0}).relevance;

  const std::vector<double> delta{3.0, -2.0};
  Matrix shifted = m.points;
  for (int r = 0; r < shifted.rows(); ++r)
    for (int c = 0; c < 2; ++c) shifted(r, c) += delta[c];
  const KnnModel m2 = make_knn(shifted, m.labels, 1);
  const NeuralizedNet net2 = neuralize_knn(m2);
  const std::vector<double> x2{x[0] + delta[0], x[1] + delta[1]};
  const auto moved = explain(net2, x2, {1.0, 1.0, 0}).relevance;
  CHECK(base[0] == moved[0]);
  CHECK(base[1] == moved[1]);

  // smooth pools carry softmax weights, equal up to rounding
  Rng rng(47);
  const SvmModel svm = random_svm(rng, 10, 2, 1.0, 0.0);
  const NeuralizedNet snet = neuralize_svm(svm);
  std::vector<double> sx{rng.normal(), rng.normal()};
  const auto sbase = explain(snet, sx, {1.0, 1.0, 0}).relevance;
  SvmModel svm2 = svm;
  for (int r = 0; r < svm2.support_vectors.rows(); ++r)
    for (int c = 0; c < 2; ++c) svm2.support_vectors(r, c) += delta[c];
  const SvmModel svm2r = make_svm(svm2.support_vectors, svm2.dual_coeffs, svm2.labels,
                                  svm2.gamma, svm2.bias);
  const NeuralizedNet snet2 = neuralize_svm(svm2r);
  std::vector<double> sx2{sx[0] + delta[0], sx[1] + delta[1]};
  const auto smoved = explain(snet2, sx2, {1.0, 1.0, 0}).relevance;
  CHECK(max_rel_error(smoved, sbase, 1e-6) < 1e-9);
}

TEST_CASE("hyperparameter heuristics follow the model scale") {
  const auto low = heuristic_params(make_svm(Matrix::from_rows({{0.}, {1.}}), {1., 1.},
                                             {1, -1}, 0.01, 0.0));
  CHECK(low.eta == doctest::Approx(0.0));
  CHECK(low.beta == doctest::Approx(0.01));

  const auto unit = heuristic_params(make_svm(Matrix::from_rows({{0.}, {1.}}), {1., 1.},
                                              {1, -1}, 1.0, 0.0));
  CHECK(unit.eta == doctest::Approx(0.4));

  const auto high = heuristic_params(make_svm(Matrix::from_rows({{0.}, {1.}}), {1., 1.},
                                              {1, -1}, 10.0, 0.0));
  CHECK(high.eta == doctest::Approx(0.8));
  CHECK(high.beta == doctest::Approx(10.0));

  Rng rng(3);
  const auto knn = heuristic_params(random_knn(rng, 20, 3, 9));
  CHECK(knn.eta == doctest::Approx(0.8));
  CHECK(knn.kappa == 4);
}

TEST_CASE("invalid hyperparameters are rejected before computation") {
  const NeuralizedNet net = neuralize_svm(two_sv_fixture());
  const std::vector<double> x{0.5, 0.5};
  CHECK_THROWS_AS(explain(net, x, {-0.1, 1.0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(explain(net, x, {1.5, 1.0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(explain(net, x, {0.5, 0.0, 0}), InvalidArgumentError);

  const NeuralizedNet knet = neuralize_knn(knn_line_fixture(1));
  const std::vector<double> kx{0.5};
  CHECK_THROWS_AS(explain(knet, kx, {0.5, 1.0, -1}), InvalidArgumentError);
}

TEST_CASE("bias unit keeps its pool mass but no feature relevance") {
  const SvmModel biased = two_sv_fixture(0.5);
  const NeuralizedNet net = neuralize_svm(biased);
  const std::vector<double> x{1.0, 0.0};
  const Explanation e = explain(net, x, {0.0, 1.0, 0});
  REQUIRE(e.probabilities.positive.size() == 2);  // SV slot + bias slot
  CHECK(std::abs(sum(e.probabilities.positive) - 1.0) < 1e-10);
  // relevance equals the single real pair scaled by its joint probability
  const double pp = e.probabilities.positive[0] * e.probabilities.negative[0];
  CHECK(e.relevance[0] == doctest::Approx(4.0 * x[0] * pp).epsilon(1e-10));
}
