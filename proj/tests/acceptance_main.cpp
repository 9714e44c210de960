// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [--workers K] [--seed S] [--scratch DIR] [--only 1,2,...]

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "nbrw/acceptance.hpp"

namespace {

void print(const nbrw::CriterionResult& r) { std::cout << nbrw::format_result_line(r) << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  nbrw::AcceptanceOptions opts;
  if (const char* env = std::getenv("NBRW_WORKERS")) opts.workers = std::strtoull(env, nullptr, 10);
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i], value = argv[i + 1];
    if (key == "--workers") opts.workers = std::stoull(value);
    else if (key == "--seed") opts.seed = std::stoull(value);
    else if (key == "--scratch") opts.scratch = value;
    else if (key == "--only") {
      std::stringstream ss(value);
      for (std::string id; std::getline(ss, id, ',');) opts.only.push_back(std::stoi(id));
    } else {
      std::cerr << "unknown argument " << key << "\n";
      return 2;
    }
  }
  if (opts.workers == 0) opts.workers = 1;

  const auto results = nbrw::run_acceptance(opts, print);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
