#pragma once

namespace pacbayes {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pacbayes
