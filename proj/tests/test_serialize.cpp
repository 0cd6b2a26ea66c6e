#include <doctest.h>

#include <charconv>
#include <cstdio>

#include "core/serialize.hpp"
#include "support.hpp"

using namespace distex;
using namespace distex::test;

TEST_CASE("format_double round-trips arbitrary values") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = std::exp(20.0 * (rng.uniform() - 0.5)) * (rng.uniform() < 0.5 ? -1 : 1);
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("svm model json round-trip is exact") {
  Rng rng(14);
  SvmModel m = random_svm(rng, 7, 3, 2.345678901234567, -0.123456789012345);
  m.feature_names = {"alcohol", "ph", "sugar"};
  const std::string text = model_to_json(Model{m});
  const Model back = model_from_json(text);
  const auto& s = std::get<SvmModel>(back);
  CHECK(s.gamma == m.gamma);
  CHECK(s.bias == m.bias);
  CHECK(s.support_vectors.data() == m.support_vectors.data());
  CHECK(s.dual_coeffs == m.dual_coeffs);
  CHECK(s.labels == m.labels);
  CHECK(s.feature_names == m.feature_names);
  // decisions agree bit-for-bit
  std::vector<double> x{0.1, -0.2, 0.3};
  CHECK(svm_decision(s, x) == svm_decision(m, x));
}

TEST_CASE("knn and krr models round-trip") {
  Rng rng(15);
  const KnnModel knn = random_knn(rng, 9, 2, 3);
  const Model kback = model_from_json(model_to_json(Model{knn}));
  CHECK(std::get<KnnModel>(kback).k == 3);
  CHECK(std::get<KnnModel>(kback).points.data() == knn.points.data());

  Matrix pts(5, 2);
  for (auto& v : pts.data()) v = rng.normal();
  const KrrModel krr = make_krr(pts, {0.1, -0.2, 0.3, -0.4, 0.5}, 1.5, 0.01);
  const Model rback = model_from_json(model_to_json(Model{krr}));
  CHECK(std::get<KrrModel>(rback).coeffs == krr.coeffs);
  CHECK(std::get<KrrModel>(rback).gamma == krr.gamma);
  CHECK(std::get<KrrModel>(rback).ridge == krr.ridge);
}

TEST_CASE("model json parse errors are typed") {
  CHECK_THROWS_AS(model_from_json("not json"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"kind":"forest"})"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"kind":"svm"})"), ParseError);
  // payload violating model invariants surfaces the validation error
  CHECK_THROWS(model_from_json(
      R"({"kind":"svm","gamma":-1,"bias":0,"points":{"rows":1,"cols":1,"data":[0]},)"
      R"("coeffs":[1],"labels":[1],"feature_names":[]})"));
}

TEST_CASE("model save and load through files") {
  const SvmModel m = two_sv_fixture(0.25);
  const std::string path = "/tmp/distex_test_model.json";
  save_model(Model{m}, path);
  const Model back = load_model(path);
  const auto& s = std::get<SvmModel>(back);
  CHECK(s.bias == 0.25);
  CHECK(hash_file(path) == fnv1a_hash(read_file(path)));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_model("/tmp/does_not_exist_distex.json"), IoError);
}

TEST_CASE("net json carries the pooling structure") {
  const NeuralizedNet net = neuralize_svm(two_sv_fixture(0.5));
  const std::string text = net_to_json(net);
  CHECK(text.find("\"neural-svm\"") != std::string::npos);
  CHECK(text.find("\"smooth\"") != std::string::npos);
  CHECK(text.find("\"bias_unit\"") != std::string::npos);
  CHECK(text.find("\"positive\"") != std::string::npos);

  const NeuralizedNet knet = neuralize_knn(knn_line_fixture(3));
  const std::string ktext = net_to_json(knet);
  CHECK(ktext.find("\"neural-knn\"") != std::string::npos);
  CHECK(ktext.find("\"ranked\"") != std::string::npos);
  CHECK(ktext.find("\"q\": 2") != std::string::npos);
}

TEST_CASE("normalization json round-trips") {
  Normalization norm;
  norm.mean = {1.5, -0.25};
  norm.stddev = {2.0, 0.5};
  norm.scale = 0.3333333333333333;
  norm.feature_names = {"a", "b"};
  norm.dropped_features = {"flat"};
  norm.kept_columns = {0, 2};
  const Normalization back = normalization_from_json(normalization_to_json(norm));
  CHECK(back.mean == norm.mean);
  CHECK(back.stddev == norm.stddev);
  CHECK(back.scale == norm.scale);
  CHECK(back.feature_names == norm.feature_names);
  CHECK(back.dropped_features == norm.dropped_features);
  CHECK(back.kept_columns == norm.kept_columns);
}
