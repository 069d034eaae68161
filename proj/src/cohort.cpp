#include "rfm/cohort.hpp"

#include "rfm/error.hpp"

namespace rfm {

std::string to_string(Cohort c) {
  switch (c) {
    case Cohort::healthy: return "healthy";
    case Cohort::pneumonia: return "pneumonia";
    case Cohort::covid: return "covid";
  }
  return "unknown";
}

Cohort parse_cohort(std::string_view text) {
  if (text == "healthy") return Cohort::healthy;
  if (text == "pneumonia") return Cohort::pneumonia;
  if (text == "covid") return Cohort::covid;
  throw Error(ErrorCode::invalid_argument, "unknown class label '" + std::string(text) + "'");
}

}  // namespace rfm
