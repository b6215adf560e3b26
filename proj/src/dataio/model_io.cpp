#include "cae/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cae/errors.hpp"

namespace cae::io {

using json = nlohmann::ordered_json;

namespace {

json matrix_to_json(const num::Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

num::Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j[0].size();
  num::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError(std::string(what) + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw FormatError(std::string(what) + " holds a non-numeric entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("model file is missing '") + key + "'");
  return *it;
}

}  // namespace

std::string model_to_json(const CaeModel& model) {
  model.validate();
  json doc;
  doc["format"] = "concrete-autoencoder";
  doc["version"] = kModelFormatVersion;
  doc["mode"] = mode_name(model.mode);
  doc["d"] = model.d;
  doc["k"] = model.k;
  doc["num_classes"] = model.num_classes;
  doc["alpha"] = matrix_to_json(model.selector.alpha);

  json decoder;
  decoder["hidden_sizes"] = model.decoder_spec.hidden_sizes;
  decoder["output_dim"] = model.decoder_spec.output_dim;
  decoder["dropout"] = model.decoder_spec.dropout;
  json layers = json::array();
  for (const auto& layer : model.decoder) {
    json l;
    l["activation"] = std::string(nn::activation_name(layer.activation));
    l["weights"] = matrix_to_json(layer.weights);
    l["bias"] = layer.bias;
    layers.push_back(std::move(l));
  }
  decoder["layers"] = std::move(layers);
  doc["decoder"] = std::move(decoder);
  doc["feature_names"] = model.feature_names;

  if (model.normalization) {
    json norm;
    norm["kind"] = norm_kind_name(model.normalization->kind);
    norm["shift"] = model.normalization->shift;
    norm["scale"] = model.normalization->scale;
    doc["normalization"] = std::move(norm);
  } else {
    doc["normalization"] = nullptr;
  }
  return doc.dump(1) + "\n";
}

CaeModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("model file must hold a JSON object");

  CaeModel model;
  try {
    const int version = field(doc, "version").get<int>();
    if (version != kModelFormatVersion) {
      throw FormatError("unsupported model format version " + std::to_string(version) + " (this build reads " +
                        std::to_string(kModelFormatVersion) + ")");
    }
    model.mode = mode_from_name(field(doc, "mode").get<std::string>());
    model.d = field(doc, "d").get<std::size_t>();
    model.k = field(doc, "k").get<std::size_t>();
    model.num_classes = field(doc, "num_classes").get<std::size_t>();
    model.selector.alpha = matrix_from_json(field(doc, "alpha"), "alpha");

    const json& dec = field(doc, "decoder");
    model.decoder_spec.hidden_sizes = field(dec, "hidden_sizes").get<std::vector<std::size_t>>();
    model.decoder_spec.output_dim = field(dec, "output_dim").get<std::size_t>();
    model.decoder_spec.dropout = field(dec, "dropout").get<double>();
    for (const json& l : field(dec, "layers")) {
      nn::DenseLayer layer;
      layer.activation = nn::activation_from_name(field(l, "activation").get<std::string>());
      layer.weights = matrix_from_json(field(l, "weights"), "decoder weights");
      layer.bias = field(l, "bias").get<std::vector<double>>();
      model.decoder.push_back(std::move(layer));
    }
    model.feature_names = field(doc, "feature_names").get<std::vector<std::string>>();

    const json& norm = field(doc, "normalization");
    if (!norm.is_null()) {
      Normalization n;
      n.kind = norm_kind_from_name(field(norm, "kind").get<std::string>());
      n.shift = field(norm, "shift").get<std::vector<double>>();
      n.scale = field(norm, "scale").get<std::vector<double>>();
      if (n.kind != NormKind::none && (n.shift.size() != model.d || n.scale.size() != model.d)) {
        throw FormatError("normalization record does not have d entries");
      }
      model.normalization = std::move(n);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const ParameterError& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
  try {
    model.validate();
  } catch (const ShapeError& e) {
    throw FormatError(std::string("inconsistent model file: ") + e.what());
  } catch (const ParameterError& e) {
    throw FormatError(std::string("inconsistent model file: ") + e.what());
  }
  return model;
}

void save_model(const CaeModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model));
}

CaeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace cae::io
