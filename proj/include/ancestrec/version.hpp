#pragma once

namespace ancestrec {

// Part of every cache key; bump when numerical output may change.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace ancestrec
