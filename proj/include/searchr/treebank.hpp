#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace searchr {

/// One syntactic word of a CoNLL-U sentence. `index` is 1-based; `head` is
/// the 1-based index of the parent token, or 0 for the root.
struct Token {
  int index = 0;
  std::string form;
  int head = 0;
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

/// A validated dependency tree. Construction checks that the head links form
/// a single rooted tree and caches the descendant count of every token, so a
/// DependencyTree is immutable and safe to share across threads.
class DependencyTree {
 public:
  DependencyTree() = default;

  /// Throws StructuralError when the head links are not a tree and
  /// ContractViolation when the token indices are not 1..n.
  DependencyTree(std::string sentence_id, std::vector<Token> tokens,
                 std::string text = {});

  const std::string& sentence_id() const noexcept { return sentence_id_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  const std::string& text() const noexcept { return text_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  /// 1-based index of the root token, or 0 for an empty tree.
  int root() const noexcept { return root_; }

  /// Number of direct and indirect dependents of the token at the 1-based
  /// `token_index` (the token itself excluded).
  int descendant_count(int token_index) const;

  const std::vector<int>& descendant_counts() const noexcept {
    return descendants_;
  }

  /// Surface forms joined by single spaces; used when no `# text` comment
  /// was present.
  std::string joined_forms() const;

  friend bool operator==(const DependencyTree& a, const DependencyTree& b) {
    return a.sentence_id_ == b.sentence_id_ && a.tokens_ == b.tokens_ &&
           a.text_ == b.text_;
  }

 private:
  std::string sentence_id_;
  std::vector<Token> tokens_;
  std::string text_;
  std::vector<int> descendants_;
  int root_ = 0;
};

/// Reads every sentence block from a CoNLL-U stream. Multiword-token ranges
/// ("3-4") and empty nodes ("5.1") are skipped. Sentence ids come from
/// `# sent_id = ...` comments, else `<source_name>:<ordinal>` with a 0-based
/// ordinal.
std::vector<DependencyTree> parse_conllu(std::istream& in,
                                         std::string_view source_name = "<stream>");

std::vector<DependencyTree> parse_conllu_string(std::string_view text,
                                                std::string_view source_name = "<string>");

/// Writes trees back as CoNLL-U. Only ID, FORM, HEAD and DEPREL carry data;
/// the remaining columns are written as "_".
void write_conllu(std::ostream& out, const std::vector<DependencyTree>& trees);

std::string to_conllu(const std::vector<DependencyTree>& trees);

}  // namespace searchr
