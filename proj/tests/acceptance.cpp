// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances live inside the verification suites and are not configurable.

#include <chrono>
#include <cstdio>

#include "shjb/verify.hpp"

int main() {
    using clock = std::chrono::steady_clock;
    const char* labels[] = {
        " 1 closed-form PDE match",
        " 2 Riccati oracle equivalence",
        " 3 truncation-level independence",
        " 4 singular limit vs coth",
        " 5 barrier certificates",
        " 6 comparison principle",
        " 7 MC value consistency",
        " 8 pathwise state decay",
        " 9 monotonization dominance",
        "10 thread-count determinism",
        "11 convergence orders",
    };
    const auto names = shjb::suite_names();
    bool all_pass = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto start = clock::now();
        shjb::SuiteResult r;
        try {
            r = shjb::run_suite(names[i]);
        } catch (const std::exception& e) {
            r.name = names[i];
            r.pass = false;
            r.detail = std::string("fault: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        all_pass = all_pass && r.pass;
        std::printf("[%s] %s (%s) [%.1fs] %s\n", r.pass ? "PASS" : "FAIL", labels[i],
                    r.name.c_str(), secs, r.detail.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
