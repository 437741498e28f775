#pragma once

/**
 * @file manifest.hpp
 * @brief Run manifests: config echo, version, stage timings and SHA-256
 *        digests of every emitted file.
 */

#include <lmgqpt/errors.hpp>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace lmgqpt::harness {

inline constexpr const char* kArtifactVersion = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct OutputRecord {
    std::string file;  ///< relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string experiment;
    std::string version = kArtifactVersion;
    std::string config;  ///< serialized configuration
    std::string output_directory;
    std::vector<StageTiming> stages;
    std::vector<OutputRecord> outputs;
    nlohmann::json summary = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["experiment"] = experiment;
        j["version"] = version;
        j["config"] = config;
        j["stages"] = nlohmann::json::array();
        for (const auto& s : stages) j["stages"].push_back({{"name", s.name}, {"seconds", s.seconds}});
        j["outputs"] = nlohmann::json::array();
        for (const auto& o : outputs)
            j["outputs"].push_back({{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
        j["summary"] = summary;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.experiment = j.at("experiment").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.config = j.at("config").get<std::string>();
        for (const auto& s : j.at("stages")) m.stages.push_back({s.at("name"), s.at("seconds")});
        for (const auto& o : j.at("outputs")) m.outputs.push_back({o.at("file"), o.at("sha256"), o.at("bytes")});
        if (j.contains("summary")) m.summary = j.at("summary");
        return m;
    }
};

/// Digest of `dir / file`, recorded into the manifest.
inline void record_output(RunManifest& manifest, const std::filesystem::path& dir, const std::string& file) {
    const std::string bytes = read_file_bytes(dir / file);
    manifest.outputs.push_back({file, sha256_hex(bytes), bytes.size()});
}

/// Names of the recorded outputs whose current content no longer matches the digest.
inline std::vector<std::string> verify_outputs(const RunManifest& manifest, const std::filesystem::path& dir) {
    std::vector<std::string> bad;
    for (const auto& o : manifest.outputs) {
        std::error_code ec;
        if (!std::filesystem::exists(dir / o.file, ec)) {
            bad.push_back(o.file);
            continue;
        }
        if (sha256_hex(read_file_bytes(dir / o.file)) != o.sha256) bad.push_back(o.file);
    }
    return bad;
}

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << manifest.to_json().dump(2) << '\n';
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
    return RunManifest::from_json(nlohmann::json::parse(read_file_bytes(path)));
}

}  // namespace lmgqpt::harness
