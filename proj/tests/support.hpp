#pragma once

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "detline/errors.hpp"
#include "detline/matrix.hpp"

namespace testing {

inline auto has_code(detline::ErrorCode c) {
  return Catch::Matchers::Predicate<detline::Error>([c](const detline::Error& e) { return e.code() == c; },
                                                    std::string("error code ") + detline::to_string(c));
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}


}  // namespace testing
