#pragma once

namespace skna {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace skna
