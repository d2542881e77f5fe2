#pragma once

#include <string>

#include <json.hpp>

#include "glass/complexity.hpp"
#include "glass/covariance.hpp"
#include "glass/mde.hpp"
#include "glass/model.hpp"
#include "glass/twopoint.hpp"

namespace glass {

inline constexpr int kSchemaVersion = 1;

/// SHA-1 hex digest of a byte string (content hash embedded in artifacts).
std::string sha1_hex(const std::string& data);

/// Fully serializable run configuration; embedded verbatim in every output.
struct RunConfig {
    ModelParams params;
    int grid = 2001;
    double eta = 2.5e-5;       // smallest eta of the schedule
    double tol = 1e-12;
    std::uint64_t seed = 1;
    int N = 400;
    int samples = 20;
    int restarts = 200;
    double eps = 0.1;
    int workers = 0;
    std::string format = "both";
    std::string out_dir = ".";

    nlohmann::json to_json() const;
    std::string content_hash() const;  // SHA-1 of the canonical JSON encoding
};

/// JSON skeleton shared by all artifacts: schema version, config, input hash.
nlohmann::json artifact_header(const RunConfig& cfg);

std::string measure_csv(const SpectralMeasure& m);
nlohmann::json measure_json(const RunConfig& cfg, const SpectralMeasure& m);

std::string complexity_csv(const ComplexityReport& rep);
nlohmann::json complexity_json(const RunConfig& cfg, const ComplexityReport& rep);

std::string surface_csv(const TwoPointSurface& surf);
nlohmann::json surface_json(const RunConfig& cfg, const TwoPointSurface& surf);

nlohmann::json covariance_json(const RunConfig& cfg, const CovarianceBundle& bundle);

void write_text_file(const std::string& path, const std::string& content);

/// Formats a double with round-trip precision (stable across reruns).
std::string format_double(double v);

}  // namespace glass
