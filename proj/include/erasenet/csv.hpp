#pragma once

// CSV emission for sweep results.  One fixed schema for analytic, exact, and
// Monte-Carlo rows; numeric fields are rendered with 10 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <unistd.h>

namespace erasenet {

inline constexpr const char* kCsvHeader = "p,id,k,trials,value,ci_low,ci_high,source";

// %.10g rendering shared by every numeric CSV field.
inline std::string format_sig10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
}

struct CsvRow {
    double p = 0.0;
    std::string id;               // curve or scheme name
    std::optional<int> k;         // empty for analytic and per-block exact rows
    std::optional<int> trials;    // empty unless Monte-Carlo
    double value = 0.0;
    std::optional<double> ci_low;   // 95% interval, Monte-Carlo only
    std::optional<double> ci_high;
    std::string source;           // "analytic" | "exact" | "mc"

    std::string render() const {
        std::string row = format_sig10(p) + "," + id + ",";
        if (k) row += std::to_string(*k);
        row += ",";
        if (trials) row += std::to_string(*trials);
        row += "," + format_sig10(value) + ",";
        if (ci_low) row += format_sig10(*ci_low);
        row += ",";
        if (ci_high) row += format_sig10(*ci_high);
        row += "," + source;
        return row;
    }
};

// Writes content to path atomically: a temporary sibling file is written,
// flushed, and renamed over the target, so readers never see a partial file.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot replace '" + path + "': " + ec.message());
    }
}

}  // namespace erasenet
