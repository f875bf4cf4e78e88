#pragma once

namespace mfe {

inline constexpr const char* version = "0.1.0";

}
