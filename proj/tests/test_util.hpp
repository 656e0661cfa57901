#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "core/errors.hpp"

// Shared helpers for the unit tests.
namespace testutil {

// A unique scratch directory, cleaned up on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag = "scratch") {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("eventkit_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path() const { return dir_.string(); }
  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
};

inline std::string write_file(const std::string& path,
                              const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

inline std::string write_file(const TempDir& dir, const std::string& name,
                              const std::string& content) {
  return write_file(dir.path(name), content);
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil

// Asserts that `expr` throws evk::Error with the given code.
#define CHECK_FAILS_WITH(expr, expected_code)                      \
  do {                                                             \
    bool caught_ = false;                                          \
    try {                                                          \
      (void)(expr);                                                \
    } catch (const evk::Error& e_) {                               \
      caught_ = true;                                              \
      CHECK(e_.code() == (expected_code));                         \
    }                                                              \
    CHECK_MESSAGE(caught_, "expected evk::Error from " #expr);     \
  } while (0)
