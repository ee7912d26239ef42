#include "esn/persistence.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <fstream>
#include <vector>

namespace esn {

using nlohmann::json;

std::string encode_f64_base64(const Matrix& m)
{
    std::vector<unsigned char> raw;
    raw.reserve(static_cast<std::size_t>(m.size()) * 8);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const auto bits = std::bit_cast<std::uint64_t>(m(i, j));
            for (int b = 0; b < 8; ++b) {
                raw.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xff));
            }
        }
    }
    std::string out(4 * ((raw.size() + 2) / 3), '\0');
    const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), raw.data(),
                                        static_cast<int>(raw.size()));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

Matrix decode_f64_base64(const std::string& text, Eigen::Index rows, Eigen::Index cols)
{
    require(rows >= 0 && cols >= 0, "decode: negative matrix shape");
    const auto expected = static_cast<std::size_t>(rows * cols) * 8;
    if (text.size() % 4 != 0) {
        throw DataError("model file: base64 payload length is not a multiple of 4");
    }
    std::vector<unsigned char> raw(text.size() / 4 * 3);
    const int decoded = EVP_DecodeBlock(raw.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                        static_cast<int>(text.size()));
    if (decoded < 0) {
        throw DataError("model file: invalid base64 payload");
    }
    // EVP_DecodeBlock counts padding as zero bytes.
    std::size_t size = static_cast<std::size_t>(decoded);
    if (!text.empty() && text.back() == '=') {
        --size;
        if (text.size() >= 2 && text[text.size() - 2] == '=') {
            --size;
        }
    }
    if (size != expected) {
        throw DataError("model file: payload has " + std::to_string(size) + " bytes, shape needs " +
                        std::to_string(expected));
    }
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) {
                bits |= static_cast<std::uint64_t>(raw[k++]) << (8 * b);
            }
            m(i, j) = std::bit_cast<double>(bits);
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m)
{
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_f64_base64(m)}};
}

Matrix matrix_from_json(const json& j)
{
    return decode_f64_base64(j.at("data").get<std::string>(), j.at("rows").get<Eigen::Index>(),
                             j.at("cols").get<Eigen::Index>());
}

json config_to_json(const EsnConfig& c)
{
    return {{"n_res", c.n_res},
            {"n_in", c.n_in},
            {"leak_rate", c.leak_rate},
            {"sparsity", c.sparsity},
            {"spectral_radius", c.spectral_radius},
            {"weight_range", c.weight_range},
            {"activation", std::string(to_string(c.activation))},
            {"seed", c.seed}};
}

EsnConfig config_from_json(const json& j)
{
    EsnConfig c;
    c.n_res = j.at("n_res").get<int>();
    c.n_in = j.at("n_in").get<int>();
    c.leak_rate = j.at("leak_rate").get<double>();
    c.sparsity = j.at("sparsity").get<double>();
    c.spectral_radius = j.at("spectral_radius").get<double>();
    c.weight_range = j.at("weight_range").get<double>();
    c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

namespace {

Vector as_vector(const Matrix& m)
{
    if (m.cols() != 1) {
        throw DataError("model file: expected a column vector");
    }
    return m.col(0);
}

}  // namespace

json model_to_json(const EsnModel& model)
{
    json j{{"format", "esn-model"},
           {"version", 1},
           {"config", config_to_json(model.config())},
           {"w_in", matrix_to_json(model.w_in())},
           {"b_in", matrix_to_json(model.b_in())},
           {"w_res", matrix_to_json(model.w_res())},
           {"b_res", matrix_to_json(model.b_res())}};
    if (model.trained()) {
        j["w_out"] = matrix_to_json(model.w_out());
        j["b_out"] = matrix_to_json(model.b_out());
    } else {
        j["w_out"] = nullptr;
        j["b_out"] = nullptr;
    }
    return j;
}

EsnModel model_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != "esn-model") {
            throw DataError("model file: not an esn-model document");
        }
        EsnModel model(config_from_json(j.at("config")), matrix_from_json(j.at("w_in")),
                       as_vector(matrix_from_json(j.at("b_in"))), matrix_from_json(j.at("w_res")),
                       as_vector(matrix_from_json(j.at("b_res"))));
        if (!j.at("w_out").is_null()) {
            model.set_readout(matrix_from_json(j.at("w_out")), as_vector(matrix_from_json(j.at("b_out"))));
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const EsnModel& model)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    out << model_to_json(model).dump(1) << '\n';
}

EsnModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(path.string() + ": cannot open model file");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

json mlp_to_json(const MlpModel& model)
{
    json weights = json::array();
    json biases = json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        weights.push_back(matrix_to_json(model.weights[l]));
        biases.push_back(matrix_to_json(model.biases[l]));
    }
    return {{"format", "mlp-model"},
            {"version", 1},
            {"layer_dims", model.layer_dims},
            {"activation", "identity"},
            {"weights", weights},
            {"biases", biases}};
}

MlpModel mlp_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != "mlp-model") {
            throw DataError("model file: not an mlp-model document");
        }
        MlpModel model;
        model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        for (const json& w : j.at("weights")) {
            model.weights.push_back(matrix_from_json(w));
        }
        for (const json& b : j.at("biases")) {
            model.biases.push_back(as_vector(matrix_from_json(b)));
        }
        if (model.weights.size() + 1 != model.layer_dims.size() || model.biases.size() != model.weights.size()) {
            throw DataError("model file: layer count mismatch");
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

}  // namespace esn
