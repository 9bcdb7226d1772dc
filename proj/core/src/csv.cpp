#include "qdiff/csv.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "qdiff/errors.hpp"

namespace qdiff {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : ncols_(columns.size()) {
    if (columns.empty()) throw ConfigInvalid("csv: need at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += columns[i];
    }
    buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) throw ConfigInvalid("csv: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
    ++nrows_;
}

void CsvWriter::row_values(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double x : cells) s.push_back(format_g17(x));
    row(s);
}

void CsvWriter::write(const std::string& path) const { write_text_file(path, buf_); }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

ArtifactPaths make_artifact_dir(const std::string& out_root, const std::string& sub) {
    namespace fs = std::filesystem;
    const std::string stamp = utc_timestamp();
    fs::path base = fs::path(out_root) / sub;
    fs::path dir = base / stamp;
    for (int k = 1; fs::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create artifact directory " + dir.string() + ": " + ec.message());
    ArtifactPaths p;
    p.dir = dir.string();
    p.csv = (dir / "result.csv").string();
    p.meta = (dir / "meta.json").string();
    p.summary = (dir / "summary.json").string();
    return p;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << contents;
    if (!out) throw Error("short write to " + path);
}

}  // namespace qdiff
