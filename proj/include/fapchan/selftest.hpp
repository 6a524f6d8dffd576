#pragma once

#include <ostream>
#include <string>

// Full acceptance suite: one pass/fail line per criterion, covering special
// functions, density normalization and consistency, the characteristic
// function, moments, entropy, capacity bounds, the particle runs, weak
// stability, and byte-level determinism of the CLI.

namespace fapchan::selftest {

// cli_path: the fap executable, used by the determinism criterion.
// Returns true iff every criterion passed.
bool run_selftest(std::ostream& os, const std::string& cli_path);

} // namespace fapchan::selftest
