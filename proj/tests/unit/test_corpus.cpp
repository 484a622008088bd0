#include <doctest.h>

#include <sstream>

#include "nehs/corpus.hpp"
#include "nehs/error.hpp"

using namespace nehs;

TEST_SUITE("corpus") {
  TEST_CASE("reads CoNLL sentences") {
    std::istringstream in("-DOCSTART-\tO\n\nJohn\tB-PER\nSmith\tI-PER\nlives\tO\n\nParis\tB-LOC\n");
    const auto c = parse_conll(in, "mem");
    REQUIRE(c.sentences.size() == 2);
    CHECK(c.sentences[0] == std::vector<std::string>{"John", "Smith", "lives"});
    CHECK(c.tag_set == std::vector<std::string>{"O", "B-LOC", "B-PER", "I-PER"});
    CHECK(c.token_count() == 4);
    CHECK(c.repairs == 0);
  }

  TEST_CASE("malformed lines and tags are rejected") {
    std::istringstream a("John B-PER\n");
    CHECK_THROWS_AS(parse_conll(a, "mem"), FormatError);
    std::istringstream b("John\tPERSON\n");
    CHECK_THROWS_AS(parse_conll(b, "mem"), FormatError);
  }

  TEST_CASE("BIO repair") {
    std::vector<std::string> tags{"I-PER", "I-PER", "O", "I-LOC", "B-PER", "I-ORG"};
    CHECK(repair_bio(tags) == 3);
    CHECK(tags == std::vector<std::string>{"B-PER", "I-PER", "O", "B-LOC", "B-PER", "B-ORG"});
  }

  TEST_CASE("span extraction") {
    const auto spans = extract_spans({"B-PER", "I-PER", "O", "B-LOC", "B-LOC", "I-ORG"});
    REQUIRE(spans.size() == 4);
    CHECK(spans[0] == EntitySpan{0, 2, "PER"});
    CHECK(spans[2] == EntitySpan{4, 5, "LOC"});
    CHECK(spans[3] == EntitySpan{5, 6, "ORG"});
  }

  TEST_CASE("write and reparse") {
    std::istringstream in("a\tB-X\nb\tO\n\nc\tO\n");
    const auto c = parse_conll(in, "mem");
    std::ostringstream out;
    write_conll(c, out);
    std::istringstream again(out.str());
    const auto d = parse_conll(again, "mem");
    CHECK(d.sentences == c.sentences);
    CHECK(d.tags == c.tags);
  }
}
