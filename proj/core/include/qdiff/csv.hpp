#pragma once

// Deterministic text artifacts for the command-line tools.
//
// Every tool run writes <out>/<subcommand>/<UTC timestamp>/ containing
// result.csv, meta.json and summary.json.  The CSV body must be byte-stable
// across runs and worker counts, so numbers are always formatted with
// round-trip precision ("%.17g") independent of locale, and the timestamp
// appears only in the directory name and meta.json.

#include <cstddef>
#include <string>
#include <vector>

namespace qdiff {

// Round-trip decimal formatting of a double (locale independent).
std::string format_g17(double x);

// Minimal CSV assembler: fixed column count, LF line endings, no quoting
// (cells must not contain commas or newlines; numeric helpers guarantee it).
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);

    void row(const std::vector<std::string>& cells);
    void row_values(const std::vector<double>& cells);  // all cells via format_g17

    std::size_t rows() const { return nrows_; }
    const std::string& str() const { return buf_; }
    void write(const std::string& path) const;

  private:
    std::string buf_;
    std::size_t ncols_ = 0;
    std::size_t nrows_ = 0;
};

// "yyyymmddThhmmssZ" from the system clock.
std::string utc_timestamp();

struct ArtifactPaths {
    std::string dir;
    std::string csv;      // dir/result.csv
    std::string meta;     // dir/meta.json
    std::string summary;  // dir/summary.json
};

// Create <out_root>/<sub>/<timestamp>/ (parents included).  If the directory
// already exists (two runs in the same second) a "-1", "-2", ... suffix is
// appended.
ArtifactPaths make_artifact_dir(const std::string& out_root, const std::string& sub);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace qdiff
