#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

inline std::filesystem::path dir() { return FILMSCORE_FIXTURES; }

inline std::string read(const std::string& name) {
  std::ifstream in(dir() / name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
