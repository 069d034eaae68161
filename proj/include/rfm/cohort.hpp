#pragma once

#include <array>
#include <string>
#include <string_view>

namespace rfm {

/// Diagnostic class; the numeric value is the class index used for argmax ties.
enum class Cohort { healthy = 0, pneumonia = 1, covid = 2 };

inline constexpr std::array<Cohort, 3> kCohorts = {Cohort::healthy, Cohort::pneumonia, Cohort::covid};

inline constexpr int index_of(Cohort c) noexcept { return static_cast<int>(c); }

std::string to_string(Cohort c);

/// Accepts "healthy", "pneumonia" or "covid".
Cohort parse_cohort(std::string_view text);

}  // namespace rfm
