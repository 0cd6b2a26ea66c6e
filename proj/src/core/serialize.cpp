#include "core/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace distex {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

uint64_t fnv1a_hash(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t hash_file(const std::string& path) { return fnv1a_hash(read_file(path)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
}

namespace {

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.data().size()) throw ParseError("matrix payload size mismatch");
  m.data() = data;
  return m;
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j;
  if (const auto* svm = std::get_if<SvmModel>(&model)) {
    j["kind"] = "svm";
    j["gamma"] = svm->gamma;
    j["bias"] = svm->bias;
    j["points"] = matrix_to_json(svm->support_vectors);
    j["coeffs"] = svm->dual_coeffs;
    j["labels"] = svm->labels;
    j["feature_names"] = svm->feature_names;
  } else if (const auto* knn = std::get_if<KnnModel>(&model)) {
    j["kind"] = "knn";
    j["k"] = knn->k;
    j["points"] = matrix_to_json(knn->points);
    j["labels"] = knn->labels;
    j["feature_names"] = knn->feature_names;
  } else {
    const auto& krr = std::get<KrrModel>(model);
    j["kind"] = "krr";
    j["gamma"] = krr.gamma;
    j["ridge"] = krr.ridge;
    j["points"] = matrix_to_json(krr.points);
    j["coeffs"] = krr.coeffs;
    j["feature_names"] = krr.feature_names;
  }
  return j.dump(2);
}

Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model JSON: ") + e.what());
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    auto names = j.value("feature_names", std::vector<std::string>{});
    if (kind == "svm") {
      return make_svm(matrix_from_json(j.at("points")), j.at("coeffs").get<std::vector<double>>(),
                      j.at("labels").get<std::vector<int>>(), j.at("gamma").get<double>(),
                      j.value("bias", 0.0), std::move(names));
    }
    if (kind == "knn") {
      return make_knn(matrix_from_json(j.at("points")), j.at("labels").get<std::vector<int>>(),
                      j.at("k").get<int>(), std::move(names));
    }
    if (kind == "krr") {
      return make_krr(matrix_from_json(j.at("points")), j.at("coeffs").get<std::vector<double>>(),
                      j.at("gamma").get<double>(), j.value("ridge", 0.0), std::move(names));
    }
    throw ParseError("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model JSON: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  write_file(path, model_to_json(model) + "\n");
}

Model load_model(const std::string& path) { return model_from_json(read_file(path)); }

std::string net_to_json(const NeuralizedNet& net) {
  json j;
  j["kind"] = net.pool_kind == PoolKind::smooth ? "neural-svm" : "neural-knn";
  if (net.pool_kind == PoolKind::smooth)
    j["pooling"] = {{"kind", "smooth"}, {"gamma", net.gamma}};
  else
    j["pooling"] = {{"kind", "ranked"}, {"q", net.rank_q}};
  j["points"] = matrix_to_json(net.points);
  j["log_coeffs"] = net.log_coeffs;
  j["positive_pool"] = net.positive_pool;
  j["negative_pool"] = net.negative_pool;
  j["feature_names"] = net.feature_names;
  if (net.has_bias) {
    // the stored value is the unit's constant squared distance; its pooled
    // score is the negative of this
    j["bias_unit"] = {{"value", -net.bias_score},
                      {"pool", net.bias_in_positive ? "positive" : "negative"}};
  }
  return j.dump(2);
}

std::string normalization_to_json(const Normalization& norm) {
  json j;
  j["mean"] = norm.mean;
  j["stddev"] = norm.stddev;
  j["scale"] = norm.scale;
  j["feature_names"] = norm.feature_names;
  j["dropped_features"] = norm.dropped_features;
  j["kept_columns"] = norm.kept_columns;
  return j.dump(2);
}

Normalization normalization_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Normalization norm;
    norm.mean = j.at("mean").get<std::vector<double>>();
    norm.stddev = j.at("stddev").get<std::vector<double>>();
    norm.scale = j.at("scale").get<double>();
    norm.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    norm.dropped_features = j.value("dropped_features", std::vector<std::string>{});
    norm.kept_columns = j.at("kept_columns").get<std::vector<int>>();
    return norm;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid normalization JSON: ") + e.what());
  }
}

}  // namespace distex
