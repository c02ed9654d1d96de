#pragma once

// Command-line front end. Exposed as a function so tests can drive it
// in-process; tools/main.cpp is a thin wrapper.
//
// Exit codes: 0 holds/success, 2 config or schema error, 3 refuted,
// 4 inconclusive, 5 infeasible moment instance.

#include <iosfwd>

namespace fastrates {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastrates
