#pragma once

#include <string_view>

namespace imstb::exam {

inline constexpr std::string_view kExamType = "application/exam+json";
inline constexpr std::string_view kResultType = "application/exam-result+json";
inline constexpr std::string_view kAnswersType = "application/exam-answers+json";
inline constexpr std::string_view kReceiptType = "application/exam-receipt+json";

}  // namespace imstb::exam
