#pragma once

#include <iosfwd>

namespace lager::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumericalError = 2;

// Runs one `lager` invocation. argv[0] is the program name. Regular output
// goes to `out`, warnings and errors to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lager::cli
