#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace needles {

/// Fixed format with 17 significant digits, enough to round-trip a double.
std::string format_number(double v);

/// Comma-separated file with a header row. Throws IoError when the file
/// cannot be written.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
    /// Flushes and checks the stream.
    void close();

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::size_t columns_;
    std::ofstream out_;
};

}  // namespace needles
