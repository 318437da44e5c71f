#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace twinbeam::cli {

std::string format_number(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& field, long line)
{
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw CsvError(line, "cannot parse number '" + field + "'");
    return value;
}

}  // namespace

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

MeasurementFile read_measurements(std::istream& in)
{
    MeasurementFile file;
    bool header_seen = false;
    std::size_t expected_fields = 0;
    std::string line;
    long lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#')
            continue;

        const auto fields = split_fields(stripped);
        if (!header_seen) {
            if (fields.size() < 3 || fields[0] != "detuning_mhz" ||
                fields[1] != "gain_probe" || fields[2] != "gain_conjugate")
                throw CsvError(lineno,
                               "expected header detuning_mhz,gain_probe,gain_conjugate[,nf_db]");
            if (fields.size() == 4 && fields[3] == "nf_db")
                file.has_noise = true;
            else if (fields.size() != 3)
                throw CsvError(lineno, "unrecognised header columns");
            expected_fields = fields.size();
            header_seen = true;
            continue;
        }

        if (fields.size() != expected_fields)
            throw CsvError(lineno, "expected " + std::to_string(expected_fields) +
                                       " fields, found " + std::to_string(fields.size()));
        MeasurementRecord rec;
        rec.detuning_mhz = parse_double(fields[0], lineno);
        rec.gain_probe = parse_double(fields[1], lineno);
        rec.gain_conjugate = parse_double(fields[2], lineno);
        if (file.has_noise)
            rec.nf_db = parse_double(fields[3], lineno);
        file.records.push_back(rec);
    }

    if (!header_seen)
        throw CsvError(lineno, "missing header row");
    return file;
}

}  // namespace twinbeam::cli
