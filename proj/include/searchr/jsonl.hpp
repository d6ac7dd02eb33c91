#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace searchr {

using Json = nlohmann::json;

/// Calls `fn(object, line_number)` for every non-blank line. Lines that are
/// not JSON objects raise ParseError with the 1-based line number.
void for_each_jsonl(std::istream& in, const std::function<void(const Json&, std::size_t)>& fn);

std::vector<Json> read_jsonl(std::istream& in);

/// Field accessors that turn a missing or mistyped field into a ParseError
/// citing `line`.
std::string require_string(const Json& obj, std::string_view key, std::size_t line);
long long require_int(const Json& obj, std::string_view key, std::size_t line);
std::vector<double> require_vector(const Json& obj, std::string_view key, std::size_t line);

/// Reads a whole file; throws UserError if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace searchr
