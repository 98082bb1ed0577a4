#pragma once

namespace stig {

inline constexpr const char* kToolName = "stigtrend";
inline constexpr const char* kVersion = "0.1.0";

} // namespace stig
