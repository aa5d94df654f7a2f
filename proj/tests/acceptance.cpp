// Acceptance gate: runs the ten numbered criteria and prints one pass/fail
// line per criterion. Exits nonzero if any criterion fails.

#include <cstdlib>
#include <iostream>

#include "stx/selftest.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 0;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  const auto results = stx::selftest::run_all(seed, std::cout);
  int failed = 0;
  for (const auto& r : results)
    if (!r.pass) ++failed;
  if (failed > 0) {
    std::cout << failed << " criteria failed\n";
    return 1;
  }
  std::cout << "all 10 criteria passed\n";
  return 0;
}
