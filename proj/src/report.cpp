#include "stableform/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"

namespace stableform {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_rec(const nlohmann::json& j, std::ostringstream& os, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in << nlohmann::json(it.key()).dump() << ": ";
                dump_rec(it.value(), os, indent, depth + 1);
            }
            os << "\n" << pad << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in;
                dump_rec(v, os, indent, depth + 1);
            }
            os << "\n" << pad << "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default: os << j.dump(); return;
    }
}

}  // namespace

std::string dump_pinned(const nlohmann::json& j, int indent) {
    std::ostringstream os;
    dump_rec(j, os, indent, 0);
    os << "\n";
    return os.str();
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << dump_pinned(j);
}

std::string config_hash(const nlohmann::json& canonical_config) {
    const std::string s = dump_pinned(canonical_config, 0);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", fnv1a64(s.data(), s.size()));
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

void write_curve_csv(const std::string& path, const RateCurve& curve) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : curve.samples) {
        const double v = std::isfinite(s.log_value) && s.log_value < 709.0
                             ? std::exp(s.log_value)
                             : kInf;
        rows.push_back({s.r, v, s.log_value});
    }
    write_csv(path, {"r", "value", "log_value"}, rows);
}

RateCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open curve file " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,", 0) != 0)
        throw ConfigError("curve file " + path + " lacks the r,value,log_value header");
    RateCurve c;
    c.kind = RateKind::ClosedForm;
    c.label = path;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ','))
            vals.push_back(cell == "inf" ? kInf : std::strtod(cell.c_str(), nullptr));
        if (vals.size() != 3) throw ConfigError("malformed curve row in " + path);
        c.samples.push_back({vals[0], vals[2]});
    }
    if (c.samples.size() < 2) throw ConfigError("curve file " + path + " too short");
    std::vector<double> lx, ly;
    for (const auto& s : c.samples)
        if (std::isfinite(s.log_value)) {
            lx.push_back(std::log(s.r));
            ly.push_back(s.log_value);
        }
    if (lx.size() >= 2) c.loglog_fit = fit_linear(lx, ly);
    return c;
}

nlohmann::json curve_to_json(const RateCurve& curve) {
    nlohmann::json j;
    j["kind"] = rate_kind_name(curve.kind);
    j["label"] = curve.label;
    j["points"] = curve.samples.size();
    j["r_min"] = curve.r_min();
    j["r_max"] = curve.r_max();
    j["slope_fit"] = {{"exponent", curve.loglog_fit.slope},
                      {"intercept", curve.loglog_fit.intercept},
                      {"residual_rms", curve.loglog_fit.residual_rms}};
    j["frozen_at_top"] = curve.frozen_at_top;
    return j;
}

}  // namespace stableform
