#ifndef SPURIDIUM_VERSION_HPP
#define SPURIDIUM_VERSION_HPP

namespace spuridium {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "spuridium-report-v1";
inline constexpr const char* kSumruleSchema = "spuridium-sumrule-v1";

}  // namespace spuridium

#endif  // SPURIDIUM_VERSION_HPP
