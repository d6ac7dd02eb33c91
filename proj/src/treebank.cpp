#include "searchr/treebank.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "searchr/error.hpp"

namespace searchr {

DependencyTree::DependencyTree(std::string sentence_id, std::vector<Token> tokens,
                               std::string text)
    : sentence_id_(std::move(sentence_id)),
      tokens_(std::move(tokens)),
      text_(std::move(text)) {
  const int n = static_cast<int>(tokens_.size());
  std::vector<std::vector<int>> children(n + 1);
  for (int i = 0; i < n; ++i) {
    const Token& tok = tokens_[i];
    if (tok.index != i + 1) {
      throw ContractViolation("sentence '" + sentence_id_ + "': token indices must be 1.." +
                              std::to_string(n) + ", found " + std::to_string(tok.index) +
                              " at position " + std::to_string(i + 1));
    }
    if (tok.head < 0 || tok.head > n) {
      throw StructuralError(sentence_id_, "token " + std::to_string(tok.index) +
                                              " has out-of-range head " +
                                              std::to_string(tok.head));
    }
    if (tok.head == tok.index) {
      throw StructuralError(sentence_id_,
                            "token " + std::to_string(tok.index) + " is its own head");
    }
    if (tok.head == 0) {
      if (root_ != 0) {
        throw StructuralError(sentence_id_, "multiple roots (tokens " +
                                                std::to_string(root_) + " and " +
                                                std::to_string(tok.index) + ")");
      }
      root_ = tok.index;
    }
    children[tok.head].push_back(tok.index);
  }
  if (n == 0) {
    return;
  }
  if (root_ == 0) {
    throw StructuralError(sentence_id_, "no root token (cycle through every token)");
  }

  // Breadth-first order from the root; tokens not reached sit on a cycle.
  std::vector<int> order;
  order.reserve(n);
  order.push_back(root_);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int child : children[order[i]]) {
      order.push_back(child);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw StructuralError(sentence_id_, "head links contain a cycle");
  }

  descendants_.assign(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Token& tok = tokens_[*it - 1];
    if (tok.head != 0) {
      descendants_[tok.head - 1] += 1 + descendants_[*it - 1];
    }
  }
}

int DependencyTree::descendant_count(int token_index) const {
  if (token_index < 1 || token_index > static_cast<int>(tokens_.size())) {
    throw ContractViolation("sentence '" + sentence_id_ + "': token index " +
                            std::to_string(token_index) + " out of range 1.." +
                            std::to_string(tokens_.size()));
  }
  return descendants_[token_index - 1];
}

std::string DependencyTree::joined_forms() const {
  std::string out;
  for (const Token& tok : tokens_) {
    if (!out.empty()) {
      out += ' ';
    }
    out += tok.form;
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) {
    return false;
  }
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Parses "# key = value"; false for any other comment.
bool comment_value(std::string_view line, std::string_view key, std::string& value) {
  line.remove_prefix(1);  // '#'
  line = trim(line);
  if (line.substr(0, key.size()) != key) {
    return false;
  }
  line.remove_prefix(key.size());
  line = trim(line);
  if (line.empty() || line.front() != '=') {
    return false;
  }
  line.remove_prefix(1);
  value = std::string(trim(line));
  return true;
}

struct PendingSentence {
  std::string sent_id;
  std::string text;
  std::vector<Token> tokens;
  bool active = false;
};

}  // namespace

std::vector<DependencyTree> parse_conllu(std::istream& in, std::string_view source_name) {
  std::vector<DependencyTree> trees;
  PendingSentence pending;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!pending.active) {
      return;
    }
    if (pending.tokens.empty()) {
      pending = PendingSentence{};  // comment-only block
      return;
    }
    std::string id = pending.sent_id.empty()
                         ? std::string(source_name) + ":" + std::to_string(trees.size())
                         : pending.sent_id;
    trees.emplace_back(std::move(id), std::move(pending.tokens), std::move(pending.text));
    pending = PendingSentence{};
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (trim(line).empty()) {
      flush();
      continue;
    }
    pending.active = true;
    if (line.front() == '#') {
      std::string value;
      if (comment_value(line, "sent_id", value)) {
        pending.sent_id = value;
      } else if (comment_value(line, "text", value)) {
        pending.text = value;
      }
      continue;
    }

    const auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                    std::to_string(cols.size()));
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      continue;  // multiword token range or empty node
    }
    Token tok;
    if (!parse_int(id, tok.index)) {
      throw ParseError(line_no, "non-integer ID '" + std::string(id) + "'");
    }
    if (tok.index != static_cast<int>(pending.tokens.size()) + 1) {
      throw ParseError(line_no, "token ID " + std::to_string(tok.index) +
                                    " breaks the 1..n sequence (expected " +
                                    std::to_string(pending.tokens.size() + 1) + ")");
    }
    if (!parse_int(cols[6], tok.head)) {
      throw ParseError(line_no, "non-integer HEAD '" + std::string(cols[6]) + "'");
    }
    tok.form = std::string(cols[1]);
    tok.deprel = std::string(cols[7]);
    pending.tokens.push_back(std::move(tok));
  }
  flush();
  return trees;
}

std::vector<DependencyTree> parse_conllu_string(std::string_view text,
                                                std::string_view source_name) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in, source_name);
}

void write_conllu(std::ostream& out, const std::vector<DependencyTree>& trees) {
  for (const DependencyTree& tree : trees) {
    out << "# sent_id = " << tree.sentence_id() << '\n';
    if (!tree.text().empty()) {
      out << "# text = " << tree.text() << '\n';
    }
    for (const Token& tok : tree.tokens()) {
      out << tok.index << '\t' << tok.form << "\t_\t_\t_\t_\t" << tok.head << '\t'
          << (tok.deprel.empty() ? "_" : tok.deprel) << "\t_\t_\n";
    }
    out << '\n';
  }
}

std::string to_conllu(const std::vector<DependencyTree>& trees) {
  std::ostringstream out;
  write_conllu(out, trees);
  return out.str();
}

}  // namespace searchr
