// One line per acceptance criterion; exit status 1 when any fails.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "nodallab/verify.hpp"

int main(int argc, char** argv) {
  nodallab::verify::Config config;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--jobs" && i + 1 < argc) {
      config.jobs = static_cast<unsigned>(std::strtoul(argv[++i], nullptr, 10));
    } else if (arg == "--suite" && i + 1 < argc) {
      config.suites.emplace_back(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--jobs N] [--suite NAME]...\n";
      return 2;
    }
  }
  const auto report = nodallab::verify::run(config, [](const nodallab::verify::Criterion& c) {
    std::cout << nodallab::verify::summary_line(c) << std::endl;
  });
  std::size_t passed = 0;
  for (const auto& c : report.criteria) passed += c.pass() ? 1 : 0;
  std::printf("%zu/%zu criteria passed in %.1f s\n", passed, report.criteria.size(), report.seconds);
  return report.all_pass() ? 0 : 1;
}
