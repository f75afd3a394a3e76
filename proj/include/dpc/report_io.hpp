#ifndef DPC_REPORT_IO_HPP
#define DPC_REPORT_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dpc/contract.hpp"

namespace dpc {

/// RFC-4180 field quoting: fields containing comma, quote, or newline are
/// wrapped in double quotes with inner quotes doubled.
inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

/// Accumulates a CSV document (CRLF rows, mandatory header) in memory.
class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out_ += ',';
            out_ += csv_quote(fields[i]);
        }
        out_ += "\r\n";
    }

    const std::string& str() const { return out_; }

private:
    std::string out_;
};

/// Full-precision decimal form that parses back to the identical double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Fixed-precision form for rendered artifacts (SVG), stable across runs.
inline std::string format_fixed(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
    return buf;
}

/// Write-to-temp-then-rename. Harness runs may be interrupted; readers never
/// observe a half-written file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw contract_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw contract_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw contract_error("rename failed: " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw contract_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace dpc

#endif
