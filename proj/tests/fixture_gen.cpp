#include <cstdio>
#include <exception>
#include <filesystem>

#include "bicrit/io.hpp"
#include "support/oracle_cases.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <fixture file>\n", argv[0]);
    return 1;
  }
  try {
    std::filesystem::path out(argv[1]);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    auto records = bicrit::testing::compute_oracle_records();
    bicrit::save_fixtures(out.string(), records);
    std::printf("wrote %zu oracle records to %s\n", records.size(), argv[1]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fixture generation failed: %s\n", e.what());
    return 1;
  }
  return 0;
}
