#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fishpath::verify {

enum class Scale { quick, full };

Scale scale_from_string(const std::string& name);

struct SuiteResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double runtime_limit = 0.0;  // seconds, at full scale
  double seconds = 0.0;        // measured; kept out of the report
  std::string summary;
  nlohmann::ordered_json details;
};

std::vector<int> suite_ids();
std::string suite_name(int id);
double suite_runtime_limit(int id);

SuiteResult run_suite(int id, Scale scale, std::uint64_t seed);
std::vector<SuiteResult> run_all(Scale scale, std::uint64_t seed);

/// Deterministic report: verdicts and numbers, no timings.
nlohmann::ordered_json report_json(const std::vector<SuiteResult>& results, Scale scale,
                                   std::uint64_t seed);

}  // namespace fishpath::verify
