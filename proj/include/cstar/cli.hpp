#pragma once

#include <string>
#include <vector>

namespace cstar::cli {

// Exit codes: 0 success, 1 usage error, 2 construction failure,
// 3 verification failure, 4 horizon or threshold failure.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

// SHA-256 of a byte string as lowercase hex.
std::string sha256_hex(const std::string& bytes);

}  // namespace cstar::cli
