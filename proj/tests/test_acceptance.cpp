// Acceptance criteria 1-12, one line each. Exit status is nonzero if any fails.

#include <cstdio>

#include "omdsc/acceptance/acceptance.hpp"

int main() {
    using namespace omdsc::acceptance;
    const auto suite = run_all([](const CriterionResult& r) {
        std::printf("%s\n", format_line(r).c_str());
        std::fflush(stdout);
    });
    std::printf("%s in %.1f s\n", suite.all_pass() ? "all criteria pass" : "SOME CRITERIA FAIL", suite.seconds);
    return suite.all_pass() ? 0 : 1;
}
