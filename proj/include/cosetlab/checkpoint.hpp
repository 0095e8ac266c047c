#pragma once

// Checkpoint directories: manifest.json plus one little-endian float32
// row-major file per parameter matrix, and the training history as CSV.

#include "cosetlab/model.hpp"

#include "json.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cosetlab {

inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr const char* kCheckpointFormat = "coset-lab-checkpoint";

/// Shortest decimal that round-trips; "nan"/"inf" for non-finite values.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline void write_matrix(const std::filesystem::path& file, const Matrix& m) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(m.size()) * 4);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j)));
            for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
        }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + file.string());
}

inline Matrix read_matrix(const std::filesystem::path& file, Eigen::Index rows, Eigen::Index cols) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw CorruptArtifactError("missing tensor file " + file.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != static_cast<std::size_t>(rows * cols) * 4)
        throw CorruptArtifactError(file.string() + ": expected " + std::to_string(rows * cols * 4) + " bytes, found " +
                                   std::to_string(bytes.size()));
    Matrix m(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at++])) << (8 * b);
            const float v = std::bit_cast<float>(bits);
            if (!std::isfinite(v)) throw CorruptArtifactError(file.string() + ": non-finite value");
            m(i, j) = v;
        }
    return m;
}

} // namespace detail

/// Rounds every parameter to float32, the precision checkpoints store.
inline ModelParams to_float_precision(ModelParams p) {
    p.for_each_matrix([](const char*, Matrix& m) { m = m.cast<float>().cast<double>(); });
    return p;
}

/// Writes manifest.json and the five tensor files; `config` is recorded verbatim.
inline void save_checkpoint(const std::filesystem::path& dir, const ModelParams& params,
                            const nlohmann::json& config = nlohmann::json::object()) {
    params.check_shapes();
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["format"] = kCheckpointFormat;
    manifest["format_version"] = kCheckpointFormatVersion;
    manifest["n"] = params.n;
    manifest["d"] = params.d;
    manifest["w"] = params.w;
    manifest["config"] = config;
    nlohmann::ordered_json tensors;
    params.for_each_matrix([&](const char* name, const Matrix& m) {
        const std::string file = std::string(name) + ".bin";
        detail::write_matrix(dir / file, m);
        tensors[name] = {{"file", file}, {"rows", m.rows()}, {"cols", m.cols()}, {"dtype", "float32-le"}};
    });
    manifest["tensors"] = tensors;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest in " + dir.string());
}

struct Checkpoint {
    ModelParams params;
    nlohmann::json manifest;
};

/// Validates and loads a checkpoint; any inconsistency is a CorruptArtifactError.
inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    const auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw CorruptArtifactError("no manifest.json in " + dir.string());
    Checkpoint ck;
    try {
        ck.manifest = nlohmann::json::parse(in);
        if (ck.manifest.at("format").get<std::string>() != kCheckpointFormat)
            throw CorruptArtifactError("unknown checkpoint format");
        if (ck.manifest.at("format_version").get<int>() != kCheckpointFormatVersion)
            throw CorruptArtifactError("unsupported checkpoint format version");
        const int n = ck.manifest.at("n").get<int>();
        const int d = ck.manifest.at("d").get<int>();
        const int w = ck.manifest.at("w").get<int>();
        if (n < 2 || n > kMaxModelDegree || d < 1 || w < 1) throw CorruptArtifactError("manifest shape out of range");
        ck.params = ModelParams::zeros(n, d, w);
        const auto& tensors = ck.manifest.at("tensors");
        ck.params.for_each_matrix([&](const char* name, Matrix& m) {
            const auto& t = tensors.at(name);
            if (t.at("rows").get<Eigen::Index>() != m.rows() || t.at("cols").get<Eigen::Index>() != m.cols())
                throw CorruptArtifactError(std::string("tensor ") + name + " has the wrong shape");
            const auto file = t.at("file").get<std::string>();
            if (file.find('/') != std::string::npos || file.find('\\') != std::string::npos)
                throw CorruptArtifactError("tensor file names must be local");
            m = detail::read_matrix(dir / file, m.rows(), m.cols());
        });
    } catch (const nlohmann::json::exception& e) {
        throw CorruptArtifactError("bad manifest in " + dir.string() + ": " + e.what());
    } catch (const Error& e) {
        if (dynamic_cast<const CorruptArtifactError*>(&e)) throw;
        throw CorruptArtifactError(std::string("bad manifest: ") + e.what());
    }
    return ck;
}

inline const char* kHistoryHeader = "epoch,train_loss,test_loss,train_acc,test_acc,entropy_e_l,entropy_e_r,entropy_u";

inline void write_history_csv(const std::filesystem::path& file, const TrainHistory& h) {
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << kHistoryHeader << '\n';
    for (const auto& r : h.records)
        out << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.test_loss) << ','
            << format_double(r.train_acc) << ',' << format_double(r.test_acc) << ',' << format_double(r.entropy_e_l)
            << ',' << format_double(r.entropy_e_r) << ',' << format_double(r.entropy_u) << '\n';
}

} // namespace cosetlab
