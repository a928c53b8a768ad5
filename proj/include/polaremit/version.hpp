#pragma once

namespace polaremit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polaremit
