#pragma once

namespace qtomo {

inline constexpr const char* kVersion = "0.1.0";

// Bump when the on-disk layout of config / snapshot / summary files changes.
inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kSnapshotSchemaVersion = 1;

}  // namespace qtomo
