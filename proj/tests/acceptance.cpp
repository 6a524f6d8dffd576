// Runs the full acceptance suite, printing one pass/fail line per criterion.
#include <iostream>

#include "fapchan/selftest.hpp"

int main() {
    return fapchan::selftest::run_selftest(std::cout, FAP_CLI_PATH) ? 0 : 1;
}
