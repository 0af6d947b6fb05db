#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fishpath/grid.hpp"
#include "fishpath/sde.hpp"
#include "fishpath/strategy.hpp"

namespace fishpath::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTrajectoryHeader = "path,step,time,fish,x,v,u";
inline constexpr const char* kGridHeader = "x,v,value";

/// Shortest text that is always 17 significant digits, so values round-trip.
std::string format_double(double value);

std::string trajectories_csv(const sde::PathEnsemble& ensemble);
std::string grid_csv(const ValueGrid& grid);
Json grid_header(const ValueGrid& grid);

/// Parses grid_csv output back (axes from the JSON header).
ValueGrid read_grid(const std::string& csv, const Json& header);

/// Tracks the files written by one run so a failed run can remove them.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path write_text(const std::string& name, const std::string& text);
  std::filesystem::path write_json(const std::string& name, const Json& value);
  const std::vector<std::filesystem::path>& written() const { return written_; }
  void remove_written();

 private:
  std::filesystem::path root_;
  bool created_root_ = false;
  std::vector<std::filesystem::path> written_;
};

Json case_report_json(const strategy::CaseReport& report);

std::string read_file(const std::filesystem::path& path);

}  // namespace fishpath::io
