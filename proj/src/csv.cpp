#include "sgvf/csv.hpp"

#include <charconv>
#include <cstdio>

#include "sgvf/errors.hpp"

namespace sgvf {

std::string format_double(double v) {
    char buf[32];
    // %.17g round-trips every finite double
    int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf, static_cast<std::size_t>(n));
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        int m = std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back;
        auto [ptr, ec] = std::from_chars(shorter, shorter + m, back);
        if (ec == std::errc() && ptr == shorter + m && back == v) {
            return std::string(shorter, static_cast<std::size_t>(m));
        }
    }
    return s;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    // strip trailing carriage return from files written on other platforms
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

double parse_double(const std::string& token, const std::string& where) {
    double v;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw FormatError(where + ": cannot parse '" + token + "' as a number");
    }
    return v;
}

long parse_long(const std::string& token, const std::string& where) {
    long v;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw FormatError(where + ": cannot parse '" + token + "' as an integer");
    }
    return v;
}

} // namespace sgvf
