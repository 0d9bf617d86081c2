#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace pctv::table {

/// Shortest text that reads back to the same double.
inline std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
inline std::string field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) { row(header); }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k) text_ += ',';
            text_ += field(fields[k]);
        }
        text_ += "\r\n";
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

}  // namespace pctv::table
