#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nodallab/report.hpp"

namespace nodallab::verify {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string suite;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  std::string error;  // set when the suite threw before finishing

  bool pass() const;
};

struct Config {
  std::vector<std::string> suites;  // empty selects every suite
  unsigned jobs = 1;
  double perturb = 0.0;             // relative amplitude added to every constructed profile
  std::uint64_t seed = 20240521;
  std::size_t arc_nodes = 2048;
  std::size_t grid = 512;           // marching-squares cells per side
};

struct Report {
  std::vector<Criterion> criteria;
  double seconds = 0.0;

  bool all_pass() const;
};

/// Suite names in criterion order (1..11).
const std::vector<std::string>& suite_names();

/// Runs the selected suites in criterion order. `on_done` fires after each.
Report run(const Config& config, const std::function<void(const Criterion&)>& on_done = {});

/// One line: "[PASS] 3 conservation: <title>" plus the failing checks, if any.
std::string summary_line(const Criterion& criterion);

report::Json to_json(const Report& report);

}  // namespace nodallab::verify
