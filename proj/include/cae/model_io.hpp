#pragma once
// Versioned JSON model files. A file holds everything needed to run selection,
// imputation or prediction: the selector weights, decoder spec and weights,
// feature names and the normalisation fitted on the training split.

#include <filesystem>
#include <string>

#include "cae/model.hpp"

namespace cae::io {

inline constexpr int kModelFormatVersion = 1;

/// Serialised document; doubles use the shortest round-trip-exact form.
std::string model_to_json(const CaeModel& model);
/// Throws ParseError for malformed text and FormatError for a well-formed
/// document that is not a valid model (wrong version, missing fields, shapes).
CaeModel model_from_json(const std::string& text);

/// Atomic write (temp file + rename).
void save_model(const CaeModel& model, const std::filesystem::path& path);
CaeModel load_model(const std::filesystem::path& path);

}  // namespace cae::io
