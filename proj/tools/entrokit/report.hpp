#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace entrokit::cli {

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_real(double v);

// JSON integers built in code are signed; parsed ones are unsigned.
inline bool is_non_negative_integer(const nlohmann::json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

/// Comma-separated rows with a header line, written into one string so the
/// bytes depend only on the values.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    CsvTable& row();
    CsvTable& add(const std::string& v);
    CsvTable& add(double v);
    CsvTable& add(std::uint64_t v);
    std::string str() const;

private:
    std::size_t width_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> header_;
};

std::string utc_timestamp();

struct OutputFile {
    std::string name;
    std::string bytes;
};

/// Writes the files into `dir` and a manifest.json listing each with its
/// digest. `manifest` carries everything else (command, model, params).
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files, nlohmann::json manifest);

}  // namespace entrokit::cli
