// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdlib>
#include <iostream>
#include <string>

#include "nonlocal/cli.hpp"

int main(int argc, char** argv) {
  nonlocal::VerifyConfig cfg;
  bool detail = false;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "-v" || a == "--verbose") detail = true;
  }
  int failed = 0;
  for (int id = 1; id <= static_cast<int>(nonlocal::criteria().size()); ++id) {
    const auto r = nonlocal::run_criterion(id, cfg);
    nonlocal::cli::print_result(std::cout, r, detail);
    if (!r.passed()) ++failed;
  }
  std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria" : "all criteria passed") << "\n";
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
