#pragma once

#include "esn/baselines.hpp"
#include "esn/reservoir.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace esn {

// Matrices are stored as {"rows", "cols", "data"} where data is base64 of the
// row-major little-endian float64 values. Round trips are bit-exact.

std::string encode_f64_base64(const Matrix& m);
Matrix decode_f64_base64(const std::string& text, Eigen::Index rows, Eigen::Index cols);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const EsnConfig& c);
EsnConfig config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const EsnModel& model);
EsnModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const EsnModel& model);
EsnModel load_model(const std::filesystem::path& path);

nlohmann::json mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const nlohmann::json& j);

}  // namespace esn
