#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clonedet {

// Missing or malformed input file. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Model and data disagree (dimensions, vocabulary). CLI exit code 3.
struct MismatchError : std::runtime_error {
  explicit MismatchError(const std::string& what) : std::runtime_error(what) {}
};

// Bad invocation (flags, argument shape). CLI exit code 4.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Parses a double written by format_double (fixed or scientific).
// Returns false when the field is not a complete number.
bool parse_double(std::string_view text, double& out);

std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t value);

std::string read_file(const std::string& path);  // throws InputError
std::string file_digest(const std::string& path);

}  // namespace clonedet
