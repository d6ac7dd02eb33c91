#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace searchr::text {

/// Simple (one-to-one) Unicode case folding over UTF-8 for the Latin,
/// Greek, Cyrillic and Armenian blocks plus fullwidth ASCII. Code points
/// outside those blocks and invalid bytes pass through unchanged.
std::string case_fold(std::string_view s);

bool is_space(char32_t cp);

/// ASCII punctuation, Latin-1 punctuation and symbols, and the General
/// Punctuation block.
bool is_punct(char32_t cp);

std::vector<char32_t> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

/// Splits on Unicode whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// Trims ASCII and Unicode whitespace at both ends.
std::string trim(std::string_view s);

/// Entity normalization: case fold, collapse internal whitespace runs to one
/// space, strip leading and trailing punctuation. Idempotent.
std::string normalize_entity(std::string_view surface);

}  // namespace searchr::text
