#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qps {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  nlohmann::ordered_json details;
};

// The full verification battery.  Each entry checks one numbered contract of
// the artifact at its pinned tolerance; `jobs` parallelizes the instance
// loops without changing any output.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, int jobs,
                                            std::ostream* progress = nullptr);

// NDJSON, one line per criterion plus a summary line; returns a process exit
// code (0 iff everything passed).
int run_suite(std::uint64_t seed, int jobs, std::ostream& out);

} // namespace qps
