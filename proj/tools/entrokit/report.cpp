#include "report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace entrokit::cli {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()), header_(std::move(header)) {}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    rows_.back().reserve(width_);
    return *this;
}

CsvTable& CsvTable::add(const std::string& v) {
    rows_.back().push_back(v);
    return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_real(v)); }

CsvTable& CsvTable::add(std::uint64_t v) { return add(std::to_string(v)); }

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files, nlohmann::json manifest) {
    std::filesystem::create_directories(dir);
    nlohmann::json listed = nlohmann::json::array();
    for (const auto& f : files) {
        write_file(dir / f.name, f.bytes);
        listed.push_back({{"file", f.name}, {"sha256", sha256_hex(f.bytes)}, {"bytes", f.bytes.size()}});
    }
    manifest["outputs"] = listed;
    manifest["finished"] = utc_timestamp();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace entrokit::cli
