#include "glass/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace glass {

// Plain SHA-1 (FIPS 180-1), enough for content addressing of small configs.
std::string sha1_hex(const std::string& data) {
    auto rol = [](std::uint32_t v, int s) { return (v << s) | (v >> (32 - s)); };
    std::uint32_t h0 = 0x67452301, h1 = 0xEFCDAB89, h2 = 0x98BADCFE, h3 = 0x10325476,
                  h4 = 0xC3D2E1F0;

    std::string msg = data;
    std::uint64_t bit_len = static_cast<std::uint64_t>(msg.size()) * 8;
    msg.push_back(static_cast<char>(0x80));
    while (msg.size() % 64 != 56) msg.push_back('\0');
    for (int i = 7; i >= 0; --i)
        msg.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xff));

    for (std::size_t chunk = 0; chunk < msg.size(); chunk += 64) {
        std::array<std::uint32_t, 80> w{};
        for (int i = 0; i < 16; ++i) {
            w[i] = (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i])) << 24) |
                   (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 1])) << 16) |
                   (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 2])) << 8) |
                   static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 3]));
        }
        for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h0, b = h1, c = h2, d = h3, e = h4;
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) { f = (b & c) | ((~b) & d); k = 0x5A827999; }
            else if (i < 40) { f = b ^ c ^ d; k = 0x6ED9EBA1; }
            else if (i < 60) { f = (b & c) | (b & d) | (c & d); k = 0x8F1BBCDC; }
            else { f = b ^ c ^ d; k = 0xCA62C1D6; }
            std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
            e = d; d = c; c = rol(b, 30); b = a; a = tmp;
        }
        h0 += a; h1 += b; h2 += c; h3 += d; h4 += e;
    }
    char buf[41];
    std::snprintf(buf, sizeof(buf), "%08x%08x%08x%08x%08x", h0, h1, h2, h3, h4);
    return std::string(buf);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

nlohmann::json RunConfig::to_json() const {
    return nlohmann::json{{"p", params.p},
                          {"q", params.q},
                          {"gamma", params.gamma},
                          {"grid", grid},
                          {"eta", eta},
                          {"tol", tol},
                          {"seed", seed},
                          {"N", N},
                          {"samples", samples},
                          {"restarts", restarts},
                          {"eps", eps},
                          {"format", format},
                          {"out_dir", out_dir}};
}

std::string RunConfig::content_hash() const { return sha1_hex(to_json().dump()); }

nlohmann::json artifact_header(const RunConfig& cfg) {
    return nlohmann::json{{"schema_version", kSchemaVersion},
                          {"config", cfg.to_json()},
                          {"input_hash", cfg.content_hash()}};
}

std::string measure_csv(const SpectralMeasure& m) {
    std::ostringstream os;
    os << "x,density,density0,density1\n";
    for (Eigen::Index i = 0; i < m.grid.size(); ++i)
        os << format_double(m.grid[i]) << ',' << format_double(m.density[i]) << ','
           << format_double(m.density0[i]) << ',' << format_double(m.density1[i]) << '\n';
    return os.str();
}

nlohmann::json measure_json(const RunConfig& cfg, const SpectralMeasure& m) {
    nlohmann::json j = artifact_header(cfg);
    j["edge"] = m.edge;
    j["eta_used"] = m.eta_used;
    j["mass"] = m.trapezoid_mass();
    j["mass0"] = m.trapezoid_mass(0);
    j["mass1"] = m.trapezoid_mass(1);
    return j;
}

std::string complexity_csv(const ComplexityReport& rep) {
    std::ostringstream os;
    os << "E,sigma,omega,upper_bound\n";
    for (Eigen::Index i = 0; i < rep.e_grid.size(); ++i)
        os << format_double(rep.e_grid[i]) << ',' << format_double(rep.sigma[i]) << ','
           << format_double(rep.omega[i]) << ',' << format_double(rep.upper_bound[i]) << '\n';
    return os.str();
}

nlohmann::json complexity_json(const RunConfig& cfg, const ComplexityReport& rep) {
    nlohmann::json j = artifact_header(cfg);
    j["e_inf"] = rep.e_inf;
    j["e_zero"] = rep.e_zero;
    j["e_th"] = rep.e_th;
    j["c_const"] = rep.c_const;
    nlohmann::json sc = nlohmann::json::array();
    for (auto& [lo, hi] : rep.sign_changes) sc.push_back({lo, hi});
    j["sigma_sign_change_brackets"] = sc;

    double bound_violation = -1e300, asym = 0.0;
    Eigen::Index n = rep.e_grid.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        bound_violation = std::max(bound_violation, rep.sigma[i] - rep.upper_bound[i]);
        asym = std::max(asym, std::abs(rep.sigma[i] - rep.sigma[n - 1 - i]));
    }
    j["upper_bound_max_violation"] = bound_violation;
    j["sigma_max_asymmetry"] = asym;
    j["checks"] = {{"e0_lt_eth", rep.e_zero < rep.e_th},
                   {"unique_sign_change", rep.sign_changes.size() == 1},
                   {"dominated_by_upper_bound", bound_violation <= 1e-8},
                   {"even", asym <= 1e-8}};
    j["e0_lt_eth"] = rep.e_zero < rep.e_th;
    return j;
}

std::string surface_csv(const TwoPointSurface& surf) {
    std::ostringstream os;
    os << "r,t,value\n";
    for (Eigen::Index i = 0; i < surf.r_grid.size(); ++i)
        for (Eigen::Index j = 0; j < surf.t_grid.size(); ++j)
            os << format_double(surf.r_grid[i]) << ',' << format_double(surf.t_grid[j]) << ','
               << format_double(surf.values(i, j)) << '\n';
    return os.str();
}

nlohmann::json surface_json(const RunConfig& cfg, const TwoPointSurface& surf) {
    nlohmann::json j = artifact_header(cfg);
    j["E1"] = surf.e1;
    j["E2"] = surf.e2;
    j["supremum"] = surf.supremum;
    j["argmax"] = {{"r", surf.argmax.r}, {"t", surf.argmax.t}};
    j["gap_vs_two_sigma"] = surf.gap;
    return j;
}

nlohmann::json covariance_json(const RunConfig& cfg, const CovarianceBundle& b) {
    auto mat = [](const auto& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json j = artifact_header(cfg);
    j["r"] = b.pt.r;
    j["t"] = b.pt.t;
    j["sigma_L"] = mat(b.sigma_L);
    j["sigma_E"] = mat(b.sigma_E);
    j["value_block"] = mat(b.value_block);
    j["cross_block"] = mat(b.cross_block);
    j["f_L"] = b.f_L_value;
    j["det_sigma_L_closed"] = b.det_closed;
    j["det_sigma_L_assembled"] = b.sigma_L.determinant();
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace glass
