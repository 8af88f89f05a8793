#include <iostream>
#include <string>

#include "pgrav/acceptance.hpp"

// Usage: acceptance [fast|full] [fixture.json]
int main(int argc, char** argv) {
  pgrav::AcceptanceOptions opt;
  if (argc > 1 && std::string(argv[1]) == "fast") opt.level = pgrav::AcceptanceLevel::fast;
  if (argc > 2) opt.fixture = pgrav::load_fixture_file(argv[2]);
  const auto results = pgrav::run_acceptance(opt, [](const pgrav::CriterionResult& r) {
    std::cout << pgrav::format_line(r) << std::endl;
  });
  const int bad = pgrav::unexpected_failures(results);
  std::cout << "unexpected failures: " << bad << '\n';
  return bad == 0 ? 0 : 4;
}
