#include <cstdio>
#include <fmt/format.h>

#include "fishpath/verify/suites.hpp"

using namespace fishpath::verify;

int main(int argc, char** argv) {
  const Scale scale = argc > 1 ? scale_from_string(argv[1]) : Scale::full;
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240601;
  int failed = 0;
  for (int id : suite_ids()) {
    const auto r = run_suite(id, scale, seed);
    const bool in_time = r.seconds < r.runtime_limit;
    const bool ok = r.passed && in_time;
    if (!ok) ++failed;
    fmt::print("{} criterion {:2d} | {} | {} | {:.2f} s (limit {:.0f} s{})\n", ok ? "PASS" : "FAIL",
               id, r.name, r.summary, r.seconds, r.runtime_limit, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", 10 - failed, 10);
  return failed == 0 ? 0 : 1;
}
