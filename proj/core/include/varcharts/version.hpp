#pragma once

namespace varcharts {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace varcharts
