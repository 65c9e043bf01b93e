#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kslog::verify {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
  nlohmann::json measurements;  // configuration echo plus measured values
};

std::vector<std::string> suite_names();

/// Runs one named property suite at desk-scale resolution.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

}  // namespace kslog::verify
