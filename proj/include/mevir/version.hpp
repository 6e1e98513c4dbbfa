#pragma once

namespace mevir {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace mevir
