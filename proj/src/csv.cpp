#include "pim/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pim::csv {

std::string format_real(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::string describe(std::string_view field, std::string_view context)
{
    std::string message = "invalid number '" + std::string(field) + "'";
    if (!context.empty()) message += " (" + std::string(context) + ")";
    return message;
}

} // namespace

double parse_real(std::string_view field, std::string_view context)
{
    const std::string text(trim(field));
    if (text.empty()) throw ParseError(describe(field, context));
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw ParseError(describe(field, context));
    }
    return value;
}

long long parse_integer(std::string_view field, std::string_view context)
{
    const std::string text(trim(field));
    if (text.empty()) throw ParseError(describe(field, context));
    errno = 0;
    char* end = nullptr;
    const long long value = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw ParseError(describe(field, context));
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char separator)
{
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(separator, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<std::string_view> lines(std::string_view text)
{
    std::vector<std::string_view> result;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        result.push_back(line);
        start = end + 1;
    }
    return result;
}

Vector read_column(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    std::vector<double> values;
    bool first = true;
    for (auto line : lines(text)) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        char* end = nullptr;
        const std::string field(line);
        const double value = std::strtod(field.c_str(), &end);
        if (end != field.c_str() + field.size()) {
            // Tolerate a single header line.
            if (first) {
                first = false;
                continue;
            }
            throw ParseError("invalid value '" + field + "' in " + path.string());
        }
        first = false;
        values.push_back(value);
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

} // namespace pim::csv
