#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "xfield/shapes.hpp"

namespace xf::test {

inline std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "xfield_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

inline std::string write_text(const std::string& name, const std::string& content) {
  std::string path = temp_path(name);
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace xf::test
