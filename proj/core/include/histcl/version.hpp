#pragma once

namespace histcl {

inline constexpr const char* version = "0.1.0";

}  // namespace histcl
