#pragma once

#include <string>
#include <vector>

namespace pump {

struct VerifyRow {
  std::string test;
  std::string expected;
  std::string measured;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct VerifyResult {
  std::string suite;
  std::vector<VerifyRow> rows;
  bool all_pass = true;
  double seconds = 0.0;
};

// Built-in verification suites; "core" runs every acceptance criterion.
std::vector<std::string> suite_names();
VerifyResult run_suite(const std::string& name, unsigned seed = 20240809u);

std::string verify_csv(const VerifyResult& result);

}  // namespace pump
