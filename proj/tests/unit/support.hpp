#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cstar/map.hpp"

namespace testing {

inline cstar::CStarMap exp_map() { return cstar::parse_map("n=0; g=1z; h=-1w"); }

// log f(z) for exp(z - 1/z), computed directly from z = e^{L + i theta}.
inline std::complex<double> exp_map_log_image(double L, double theta) {
  const std::complex<double> z = std::exp(std::complex<double>(L, theta));
  return z - 1.0 / z;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cstar_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing
