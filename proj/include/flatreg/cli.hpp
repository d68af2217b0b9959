#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flatreg/surface.hpp"

namespace flatreg {

inline constexpr const char* kVersion = "0.1.0";

// Runs one subcommand; args excludes the program name. Results go to `out` (or
// the --out file), errors to `err` as a JSON object. Returns the exit status:
// 0 ok, 1 runtime error, 2 configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "0.1", "0.1i", "0.3-0.2i", "0.05@1.2" (modulus@argument).
cplx parse_complex(const std::string& s);
std::vector<cplx> parse_complex_list(const std::string& s);
std::vector<double> parse_real_list(const std::string& s);

std::uint64_t fnv1a64(const std::string& s);

} // namespace flatreg
