#include "propsim/error.hpp"

#include <sstream>

namespace propsim {

namespace {

std::string window_message(double r, double r_max) {
  std::ostringstream os;
  os << "radius " << r << " lies outside the simulated disk of radius " << r_max;
  return os.str();
}

}  // namespace

OutOfWindowError::OutOfWindowError(double r, double r_max)
    : Error(window_message(r, r_max)), radius_(r), r_max_(r_max) {}

TruncationRiskError::TruncationRiskError(const std::string& what, double suggested_r_max)
    : Error(what), suggested_r_max_(suggested_r_max) {}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error(field + ": " + message), field_(std::move(field)) {}

}  // namespace propsim
