#pragma once

namespace apdsync {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace apdsync
