#include "nehs/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "nehs/error.hpp"
#include "nehs/text_io.hpp"

namespace nehs {

std::size_t TaggedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<std::size_t> TaggedCorpus::sentence_lengths() const {
  std::vector<std::size_t> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.size());
  return out;
}

bool is_bio_tag(std::string_view tag) {
  if (tag == "O") return true;
  return tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-';
}

namespace {

std::string_view entity_type(std::string_view tag) { return tag.substr(2); }

}  // namespace

std::size_t repair_bio(std::vector<std::string>& tags) {
  std::size_t repairs = 0;
  std::string_view open;  // type of the span continuing at this position
  for (auto& tag : tags) {
    if (tag == "O") {
      open = {};
      continue;
    }
    if (tag[0] == 'I' && entity_type(tag) != open) {
      tag[0] = 'B';
      ++repairs;
    }
    open = entity_type(tag);
  }
  return repairs;
}

std::vector<EntitySpan> extract_spans(const std::vector<std::string>& tags) {
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto& tag = tags[i];
    if (!is_bio_tag(tag) || tag == "O") continue;
    const std::string_view type = entity_type(tag);
    const bool continues = tag[0] == 'I' && !spans.empty() && spans.back().end == i && spans.back().type == type;
    if (continues) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({i, i + 1, std::string(type)});
    }
  }
  return spans;
}

void finalize_corpus(TaggedCorpus& corpus) {
  std::set<std::string> tags;
  bool has_outside = false;
  corpus.repairs = 0;
  for (auto& seq : corpus.tags) {
    corpus.repairs += repair_bio(seq);
    for (const auto& t : seq) {
      if (t == "O") {
        has_outside = true;
      } else {
        tags.insert(t);
      }
    }
  }
  corpus.tag_set.clear();
  if (has_outside) corpus.tag_set.emplace_back("O");
  corpus.tag_set.insert(corpus.tag_set.end(), tags.begin(), tags.end());
}

TaggedCorpus parse_conll(std::istream& in, std::string_view source_name) {
  const std::string where(source_name);
  TaggedCorpus corpus;
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  auto flush = [&] {
    if (tokens.empty()) return;
    corpus.sentences.push_back(std::move(tokens));
    corpus.tags.push_back(std::move(tags));
    tokens.clear();
    tags.clear();
  };
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = io::chomp(raw);
    if (io::split_whitespace(line).empty()) {
      flush();
      continue;
    }
    const auto fields = io::split(line, '\t');
    const std::string at = where + ":" + std::to_string(line_no);
    if (fields.size() != 2 || fields[0].empty()) throw FormatError(at + ": expected '<token>\\t<tag>'");
    if (fields[0] == "-DOCSTART-") continue;
    if (!is_bio_tag(fields[1])) throw FormatError(at + ": '" + std::string(fields[1]) + "' is not a BIO tag");
    tokens.emplace_back(fields[0]);
    tags.emplace_back(fields[1]);
  }
  flush();
  finalize_corpus(corpus);
  return corpus;
}

TaggedCorpus load_conll(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_conll(in, path.string());
}

void write_conll(const TaggedCorpus& corpus, std::ostream& out) {
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    for (std::size_t t = 0; t < corpus.sentences[s].size(); ++t) {
      out << corpus.sentences[s][t] << '\t' << corpus.tags[s][t] << '\n';
    }
    out << '\n';
  }
}

}  // namespace nehs
