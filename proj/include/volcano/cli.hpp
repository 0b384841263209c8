#ifndef VOLCANO_CLI_HPP
#define VOLCANO_CLI_HPP

//------------------------------------------------------------------------------
// cli.hpp
//
// Command-line front end.  Subcommands: potential, simulate, sweep, compare,
// classify.  Exit codes: 0 success, 1 usage/configuration error, 2 numerical
// failure (step collapse or closure breakdown).
//------------------------------------------------------------------------------

namespace volcano {

inline constexpr const char* kVersion = "0.1.0";

int run_cli(int argc, const char* const* argv);

} // namespace volcano

#endif // VOLCANO_CLI_HPP
