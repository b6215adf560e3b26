#include <algorithm>
#include <sstream>

#include "cae/errors.hpp"
#include "cae/model.hpp"

namespace cae {

std::string mode_name(Mode mode) { return mode == Mode::supervised ? "supervised" : "unsupervised"; }

Mode mode_from_name(const std::string& name) {
  if (name == "unsupervised" || name == "unsup") return Mode::unsupervised;
  if (name == "supervised" || name == "sup") return Mode::supervised;
  throw ParameterError("unknown mode '" + name + "' (expected unsup or sup)");
}

std::size_t TrainConfig::effective_max_epochs() const noexcept {
  return max_epochs > 0 ? max_epochs : 3 * schedule.total_epochs;
}

std::vector<std::size_t> TrainConfig::effective_hidden_sizes() const {
  if (hidden_sizes) return *hidden_sizes;
  if (mode == Mode::supervised) return {std::max<std::size_t>(1, 3 * k / 2)};
  return {};
}

void TrainConfig::validate(std::size_t d) const {
  if (k == 0) throw ParameterError("k must be at least 1");
  if (k > d) throw ParameterError("k=" + std::to_string(k) + " exceeds the number of features d=" + std::to_string(d));
  schedule.validate();
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (batch_size == 0) throw ParameterError("batch size must be at least 1");
  if (!(stop_threshold > 0.0 && stop_threshold <= 1.0)) throw ParameterError("stop threshold must lie in (0, 1]");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("dropout must lie in [0, 1)");
  if (hidden_sizes) {
    for (std::size_t h : *hidden_sizes) {
      if (h == 0) throw ParameterError("hidden layer sizes must be at least 1");
    }
  }
}

void CaeModel::validate() const {
  selector.validate();
  if (selector.k() != k || selector.d() != d) {
    throw FormatError("selector shape " + selector.alpha.shape_string() + " does not match k=" + std::to_string(k) +
                      ", d=" + std::to_string(d));
  }
  decoder_spec.validate();
  if (decoder.size() != decoder_spec.hidden_sizes.size() + 1) throw FormatError("decoder depth does not match its spec");
  std::size_t width = k;
  for (std::size_t l = 0; l < decoder.size(); ++l) {
    decoder[l].validate();
    const std::size_t expected_out = l + 1 < decoder.size() ? decoder_spec.hidden_sizes[l] : decoder_spec.output_dim;
    if (decoder[l].in_dim() != width || decoder[l].out_dim() != expected_out) {
      throw FormatError("decoder layer " + std::to_string(l) + " has shape " + decoder[l].weights.shape_string());
    }
    width = expected_out;
  }
  if (mode == Mode::unsupervised && decoder_spec.output_dim != d) {
    throw FormatError("unsupervised decoder must output d=" + std::to_string(d) + " columns");
  }
  if (mode == Mode::supervised && decoder_spec.output_dim != num_classes) {
    throw FormatError("supervised decoder must output one score per class");
  }
  if (!feature_names.empty() && feature_names.size() != d) throw FormatError("feature name count differs from d");
}

std::string TrainReport::to_csv() const {
  std::ostringstream out;
  out << "epoch,temperature,mean_max_prob,train_loss,val_loss\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << io::format_double(e.temperature, 6) << ',' << io::format_double(e.mean_max_prob, 6) << ','
        << io::format_double(e.train_loss, 6) << ',' << io::format_double(e.val_loss, 6) << '\n';
  }
  return out.str();
}

sel::TestSelection select_features(const CaeModel& model, const num::Matrix& x) {
  if (x.cols() != model.d) {
    throw ShapeError("select_features: model expects " + std::to_string(model.d) + " columns, data is " +
                     x.shape_string());
  }
  return sel::selector_forward_test(x, model.selector);
}

num::Matrix impute(const CaeModel& model, const num::Matrix& x_selected) {
  if (model.mode != Mode::unsupervised) throw ModeError("impute needs an unsupervised (reconstruction) model");
  if (x_selected.cols() != model.k) {
    throw ShapeError("impute: model expects " + std::to_string(model.k) + " selected columns, got " +
                     x_selected.shape_string());
  }
  return nn::decoder_forward(model.decoder_spec, model.decoder, x_selected);
}

num::Matrix predict_logits(const CaeModel& model, const num::Matrix& x) {
  if (model.mode != Mode::supervised) throw ModeError("predict needs a supervised model");
  const auto sel = select_features(model, x);
  return nn::decoder_forward(model.decoder_spec, model.decoder, sel.selected);
}

std::vector<int> predict_labels(const CaeModel& model, const num::Matrix& x) {
  const auto logits = predict_logits(model, x);
  std::vector<int> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

}  // namespace cae
