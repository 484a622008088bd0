#include "nehs/dictionary.hpp"

#include <istream>
#include <set>
#include <utility>

#include "nehs/error.hpp"
#include "nehs/text_io.hpp"

namespace nehs {

std::string DictionaryEntry::text() const {
  std::string out;
  for (const auto& token : surface) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

std::size_t NeDictionary::count(NeType type) const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (type == NeType::All || e.type == type) ++n;
  }
  return n;
}

NeDictionary parse_dictionary(std::istream& in, std::string_view source_name) {
  const std::string where(source_name);
  NeDictionary dict;
  std::set<std::pair<NeType, std::vector<std::string>>> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = io::chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string at = where + ":" + std::to_string(line_no);

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError(at + ": expected '<type>\\t<surface>'");
    const auto type = parse_ne_type(line.substr(0, tab));
    if (!type || *type == NeType::All) {
      throw FormatError(at + ": unknown entity type '" + std::string(line.substr(0, tab)) +
                        "' (expected Per, Loc or Org)");
    }
    DictionaryEntry entry;
    entry.type = *type;
    for (auto token : io::split(line.substr(tab + 1), ' ')) {
      if (!token.empty()) entry.surface.emplace_back(token);
    }
    if (entry.surface.empty()) throw FormatError(at + ": empty surface");

    if (!seen.emplace(entry.type, entry.surface).second) {
      ++dict.duplicate_count;
      continue;
    }
    dict.entries.push_back(std::move(entry));
  }
  return dict;
}

NeDictionary load_dictionary(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_dictionary(in, path.string());
}

std::vector<const ResolvedEntity*> ResolvedEntities::select(NeType type) const {
  std::vector<const ResolvedEntity*> out;
  for (NeType t : kEntityTypes) {
    if (type != NeType::All && type != t) continue;
    for (const auto& e : of(t)) out.push_back(&e);
  }
  return out;
}

ResolvedEntities resolve(const NeDictionary& dict, const EmbeddingSpace& space, LookupPolicy policy) {
  ResolvedEntities out;
  for (const auto& entry : dict.entries) {
    const std::size_t slot = type_slot(entry.type);
    auto phrase = phrase_vector(space, entry.surface, policy);
    if (!phrase.value) {
      ++out.oov[slot];
      continue;
    }
    out.by_type[slot].push_back({entry.text(), std::move(*phrase.value)});
  }
  return out;
}

}  // namespace nehs
