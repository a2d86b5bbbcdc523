#include <cstdio>
#include <iostream>

#include "dnf/acceptance.hpp"

int main() {
  const auto results = dnf::run_acceptance("acceptance-out", std::cout);
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
  }
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
  } else {
    std::cout << "all " << results.size() << " criteria passed\n";
  }
  return failures == 0 ? 0 : 1;
}
