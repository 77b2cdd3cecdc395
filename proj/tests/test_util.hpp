#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "provcirc/error.hpp"

#ifndef PROVCIRC_TEST_DATA
#define PROVCIRC_TEST_DATA "tests/data"
#endif

inline std::string data_path(const std::string& name) { return std::string(PROVCIRC_TEST_DATA) + "/" + name; }

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs `f` and returns the error code it throws; fails the test if it returns.
template <typename F>
provcirc::ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const provcirc::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a provcirc::Error");
}
