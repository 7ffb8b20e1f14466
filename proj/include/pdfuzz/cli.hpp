#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdfuzz::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // verify mismatch, audit "suspicious"
inline constexpr int kExitError = 2;     // usage or data error; audit "manipulated"

inline constexpr int kSchemaVersion = 1;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdfuzz::cli
