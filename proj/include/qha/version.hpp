#pragma once

namespace qha {
inline constexpr const char *kVersion = "0.1.0";
}
