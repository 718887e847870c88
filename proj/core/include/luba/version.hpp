#pragma once

namespace luba {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace luba
