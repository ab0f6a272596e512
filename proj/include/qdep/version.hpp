#pragma once

namespace qdep {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qdep
