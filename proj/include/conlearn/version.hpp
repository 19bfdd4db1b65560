#pragma once

namespace conlearn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace conlearn
