#pragma once

#include <filesystem>

#include "lht/forest.hpp"

namespace lht {

/// Model file format version. Files with any other version are rejected.
inline constexpr int kModelFormatVersion = 1;

/// Writes the forest as a self-contained JSON document: format_version,
/// params, normalizer, label_mapping, and per-class arrays of recursive node
/// records discriminated by node_kind. Reals keep full round-trip precision.
void save(const LhForest& forest, const std::filesystem::path& path);

/// Reads and validates a model file. Structural problems name the offending
/// node path; version mismatches and dimension inconsistencies are rejected.
LhForest load(const std::filesystem::path& path);

/// In-memory serialization used by save/load; exposed so round trips can be
/// checked without touching the filesystem.
std::string serialize(const LhForest& forest);
LhForest deserialize(const std::string& text);

}  // namespace lht
