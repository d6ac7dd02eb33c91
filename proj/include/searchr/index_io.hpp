#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "searchr/corpus.hpp"

namespace searchr {

/// On-disk container: 8 magic bytes, a little-endian u32 format version,
/// then (u32 tag, u64 length, payload) sections for metadata, documents,
/// trees, entities, chunks and embeddings in that order.
inline constexpr std::string_view kIndexMagic{"SRCHRIDX", 8};
inline constexpr std::uint32_t kIndexFormatVersion = 1;

std::string serialize_index(const Corpus& corpus);
Corpus deserialize_index(std::string_view bytes);

/// Writes atomically (temp file + rename).
void save_index(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_index(const std::filesystem::path& path);

}  // namespace searchr
