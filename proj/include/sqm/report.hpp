#ifndef SQM_REPORT_HPP
#define SQM_REPORT_HPP

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sqm/levy.hpp"
#include "sqm/path.hpp"
#include "sqm/sqrt_calculus.hpp"

namespace sqm {

using ordered_json = nlohmann::ordered_json;

/// 17 significant digits: round-trips any double and keeps artifact bytes
/// stable across runs.
std::string format_float(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_to_string(const CsvTable& table);
CsvTable csv_parse(std::istream& in);

/// Writes bytes produced by csv_to_string / ordered_json::dump. Throws
/// std::invalid_argument on an empty table and std::runtime_error on I/O
/// failure. Identical inputs yield byte-identical files.
void write_csv(const std::filesystem::path& file, const CsvTable& table);
void write_json(const std::filesystem::path& file, const ordered_json& j);

// ---- JSON formats ------------------------------------------------------------

ordered_json path_to_json(const Path& path);
Path path_from_json(const ordered_json& j);

ordered_json system_to_json(const MixtureSystem& system);
MixtureSystem system_from_json(const ordered_json& j);

ordered_json ensemble_to_json(const PathEnsemble& ensemble);
PathEnsemble ensemble_from_json(const ordered_json& j);

}  // namespace sqm

#endif  // SQM_REPORT_HPP
