#include "searchr/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "searchr/error.hpp"

namespace searchr {

void for_each_jsonl(std::istream& in, const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
      throw ParseError(line_no, "expected a JSON object");
    }
    fn(obj, line_no);
  }
}

std::vector<Json> read_jsonl(std::istream& in) {
  std::vector<Json> out;
  for_each_jsonl(in, [&](const Json& obj, std::size_t) { out.push_back(obj); });
  return out;
}

std::string require_string(const Json& obj, std::string_view key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(line, "field '" + std::string(key) + "' must be a string");
  }
  return it->get<std::string>();
}

long long require_int(const Json& obj, std::string_view key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw ParseError(line, "field '" + std::string(key) + "' must be an integer");
  }
  return it->get<long long>();
}

std::vector<double> require_vector(const Json& obj, std::string_view key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw ParseError(line, "field '" + std::string(key) + "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const Json& v : *it) {
    if (!v.is_number()) {
      throw ParseError(line, "field '" + std::string(key) + "' must be an array of numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UserError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace searchr
