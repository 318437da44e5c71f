#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twinbeam/diagnostic.hpp"

namespace twinbeam::cli {

/// Malformed CSV input; line is 1-based.
struct CsvError : std::runtime_error {
    long line;
    CsvError(long line_, const std::string& msg) : std::runtime_error(msg), line(line_) {}
};

/// File could not be opened or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Locale-independent "%.Ng" formatting; non-finite values print as
/// "nan"/"inf".
std::string format_number(double v, int digits = 9);

/// Split one CSV line on commas and trim surrounding whitespace.
std::vector<std::string> split_fields(const std::string& line);

struct MeasurementFile {
    std::vector<MeasurementRecord> records;
    bool has_noise = false;  ///< optional nf_db column present
};

/// Parse a measurement CSV with header
/// detuning_mhz,gain_probe,gain_conjugate[,nf_db]. Lines starting with '#'
/// and blank lines are ignored. Throws CsvError with the offending line.
MeasurementFile read_measurements(std::istream& in);

}  // namespace twinbeam::cli
