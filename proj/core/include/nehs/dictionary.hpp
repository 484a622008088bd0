#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nehs/embeddings.hpp"
#include "nehs/types.hpp"

namespace nehs {

struct DictionaryEntry {
  std::vector<std::string> surface;
  NeType type = NeType::Per;

  // Surface tokens joined by single spaces.
  std::string text() const;
};

// Typed named-entity gazetteer. Entries are unique per (surface, type).
struct NeDictionary {
  std::vector<DictionaryEntry> entries;
  std::size_t duplicate_count = 0;

  std::size_t count(NeType type) const;
};

// Two-column TSV: `Per|Loc|Org <TAB> surface tokens`. Lines starting with
// '#' and blank lines are ignored.
NeDictionary load_dictionary(const std::filesystem::path& path);
NeDictionary parse_dictionary(std::istream& in, std::string_view source_name);

struct ResolvedEntity {
  std::string surface;
  Vector vector;
};

struct ResolvedEntities {
  std::array<std::vector<ResolvedEntity>, 3> by_type;
  std::array<std::size_t, 3> oov{0, 0, 0};

  const std::vector<ResolvedEntity>& of(NeType type) const { return by_type[type_slot(type)]; }
  std::size_t oov_count(NeType type) const { return oov[type_slot(type)]; }

  // Entities of `type`, or of every type for NeType::All, in dictionary order
  // per type.
  std::vector<const ResolvedEntity*> select(NeType type) const;
};

// Maps every entry through phrase_vector(); entries without any known token
// are counted as OOV and dropped.
ResolvedEntities resolve(const NeDictionary& dict, const EmbeddingSpace& space,
                         LookupPolicy policy = {});

}  // namespace nehs
