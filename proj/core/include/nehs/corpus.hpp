#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nehs {

// Sentences with parallel BIO tags.
struct TaggedCorpus {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::vector<std::string>> tags;
  // "O" first (when present), then the remaining tags in lexicographic order.
  std::vector<std::string> tag_set;
  // I-X tags rewritten to B-X because they did not continue an X span.
  std::size_t repairs = 0;

  std::size_t token_count() const;
  std::vector<std::size_t> sentence_lengths() const;
};

// CoNLL-style reader: `token <TAB> tag` per line, blank line between
// sentences. Tags are validated as BIO and repaired; -DOCSTART- lines are
// skipped.
TaggedCorpus load_conll(const std::filesystem::path& path);
TaggedCorpus parse_conll(std::istream& in, std::string_view source_name);
void write_conll(const TaggedCorpus& corpus, std::ostream& out);

// Builds tag_set and repairs tags in place.
void finalize_corpus(TaggedCorpus& corpus);

// True for "O", "B-X" and "I-X" with a non-empty X.
bool is_bio_tag(std::string_view tag);

// Rewrites every I-X that does not follow B-X or I-X into B-X. Returns the
// number of rewrites.
std::size_t repair_bio(std::vector<std::string>& tags);

struct EntitySpan {
  std::size_t begin = 0;  // first token
  std::size_t end = 0;    // one past the last token
  std::string type;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// Entity spans of a BIO sequence. An I-X that does not continue an X span
// opens a new span.
std::vector<EntitySpan> extract_spans(const std::vector<std::string>& tags);

}  // namespace nehs
