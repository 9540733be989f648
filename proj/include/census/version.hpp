#pragma once

namespace census {

inline constexpr const char* version = "0.1.0";

}
