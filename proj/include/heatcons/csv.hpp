#pragma once

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace heatcons::csv {

/// Quotes a field when it contains a comma, quote or line break.
inline std::string field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// 17 significant digits, enough to round-trip any double.
inline std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Rows end in CRLF.
class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto n : names) {
            if (!first) os_ << ',';
            os_ << field(n);
            first = false;
        }
        os_ << "\r\n";
    }

    template <class... T>
    void row(const T&... values) {
        bool first = true;
        ((emit(values, first)), ...);
        os_ << "\r\n";
    }

private:
    void emit(double v, bool& first) { put(number(v), first); }
    void emit(int v, bool& first) { put(std::to_string(v), first); }
    void emit(std::size_t v, bool& first) { put(std::to_string(v), first); }
    void emit(std::string_view v, bool& first) { put(field(v), first); }
    void emit(const std::string& v, bool& first) { put(field(v), first); }
    void emit(const char* v, bool& first) { put(field(v), first); }
    void put(const std::string& s, bool& first) {
        if (!first) os_ << ',';
        os_ << s;
        first = false;
    }

    std::ostream& os_;
};

}  // namespace heatcons::csv
