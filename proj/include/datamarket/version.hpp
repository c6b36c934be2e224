#pragma once

namespace datamarket {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace datamarket
