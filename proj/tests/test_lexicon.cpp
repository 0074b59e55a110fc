#include <doctest.h>

#include "ehn/lexicon.hpp"
#include "ehn/tsv.hpp"
#include "helpers.hpp"

using namespace ehn;
using testing::fixture;

TEST_SUITE("lexicon") {

TEST_CASE("entry-kind fixture loads every token kind") {
    const auto lex = load_lexicon(fixture("entry_kinds.tsv"));
    CHECK(lex.attributes() == std::set<std::string>{"telic"});
    const auto xie = lex.senses_of("協");
    REQUIRE(xie.size() == 2);
    CHECK(xie[0]->sense_index == 1);
    CHECK(serialize_definition(xie[0]->definition) == "{help|幫助}");
    CHECK(serialize_definition(xie[1]->definition) == "{community|團體}");
    CHECK(xie[1]->english_gloss == "association");
    const auto* steed = lex.find_concept(ConceptId::parse("ExcellentSteed|駿馬"));
    REQUIRE(steed);
    REQUIRE(steed->definition);
    CHECK(serialize_definition(*steed->definition) == "{馬|horse:qualification={HighQuality|優質}}");
    CHECK(lex.senses_of("實驗室").size() == 1);
    CHECK(lex.synset(ConceptId::parse("help|幫助")) == std::vector<std::string>{"協"});
}

TEST_CASE("lexicon text round-trips") {
    for (const auto* name : {"entry_kinds.tsv", "toy/lexicon.tsv", "kinship/lexicon.tsv"}) {
        CAPTURE(name);
        const auto lex = load_lexicon(fixture(name));
        const auto again = parse_lexicon(to_tsv(lex));
        CHECK(again == lex);
        CHECK(to_tsv(again) == to_tsv(lex));
    }
}

TEST_CASE("synsets are sorted and unique") {
    const auto lex = load_lexicon(fixture("toy/lexicon.tsv"));
    CHECK(lex.synset(ConceptId::parse("馬|horse")) == std::vector<std::string>{"山馬", "馬", "馬匹", "駙"});
    CHECK(lex.synset(ConceptId::parse("wood|木")) == std::vector<std::string>{"木頭"});
    CHECK(lex.synset(ConceptId::parse("LowQuality|劣質")).empty());
}

TEST_CASE("bad lexicon rows name their line") {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_lexicon(text, "x.tsv");
        } catch (const LoadError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("telic\tattribute\t\t\t\n協\tconcept\t1\t{help|幫助}\t\n") == 2);
    CHECK(line_of("# c\n\n協\tword\t1\n") == 3);
    CHECK(line_of("協\tword\t1\t{help|幫助}\t\n協\tword\t1\t{help|幫助}\t\n") == 2);
    CHECK(line_of("協\tword\t0\t{help|幫助}\t\n") == 1);
    CHECK(line_of("協\tword\t1\t{help|幫助\t\n") == 1);
    CHECK(line_of("協\tword\t1\t\t\n") == 1);
    CHECK(line_of("help|aid\tconcept\t\t\t\n") == 1);
    CHECK(line_of("help|幫助\tconcept\t\t\t\nhelp|幫助\tconcept\t\t\t\n") == 2);
    try {
        parse_lexicon("協\tword\t1\t{help|幫助\t\n", "x.tsv");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("x.tsv:1:") == 0);
    }
}

TEST_CASE("taxonomy queries") {
    const auto tax = load_taxonomy(fixture("toy/taxonomy.tsv"));
    CHECK(tax.root() == ConceptId::parse("thing|萬物"));
    const auto physical = ConceptId::parse("physical|物質");
    CHECK(is_under(tax, ConceptId::parse("馬|horse"), physical));
    CHECK(is_under(tax, ConceptId::parse("ExcellentSteed|駿馬"), physical));
    CHECK(is_under(tax, physical, physical));
    CHECK(!is_under(tax, ConceptId::parse("HighQuality|優質"), physical));
    CHECK_THROWS_AS(is_under(tax, ConceptId::parse("cat|貓"), physical), UnknownConcept);
    CHECK_THROWS_AS(is_under(tax, physical, ConceptId::parse("cat|貓")), UnknownConcept);
    CHECK(tax.children(ConceptId::parse("animate|生物")).size() == 2);
    CHECK(*tax.parent(ConceptId::parse("wood|木")) == ConceptId::parse("inanimate|無生物"));
}

TEST_CASE("taxonomy words come from trivial senses") {
    auto tax = load_taxonomy(fixture("toy/taxonomy.tsv"));
    const auto lex = load_lexicon(fixture("toy/lexicon.tsv"));
    tax.attach_words(lex);
    CHECK(tax.attached_words(ConceptId::parse("馬|horse")).size() == 4);
    CHECK(tax.attached_words(ConceptId::parse("thing|萬物")) == std::vector<std::string>{"東西"});
    CHECK(tax.attached_words(ConceptId::parse("animal|獸")).empty());
}

TEST_CASE("malformed taxonomies are rejected") {
    CHECK_THROWS_AS(parse_taxonomy("a|甲\t\nb|乙\t\n"), LoadError);                  // two roots
    CHECK_THROWS_AS(parse_taxonomy("a|甲\t\nb|乙\tc|丙\n"), LoadError);              // unknown parent
    CHECK_THROWS_AS(parse_taxonomy("a|甲\t\nb|乙\tc|丙\nc|丙\tb|乙\n"), LoadError);  // cycle
    CHECK_THROWS_AS(parse_taxonomy("a|甲\t\nb|乙\ta|甲\nb|乙\ta|甲\n"), LoadError);  // duplicate
    CHECK_THROWS_AS(parse_taxonomy("b|乙\ta|甲\n"), LoadError);                      // no root
    CHECK_THROWS_AS(parse_taxonomy("a|甲\n"), LoadError);                            // one column
}

TEST_CASE("frequency table") {
    const auto f = parse_frequency("木頭\t4\n馬\t10\n");
    CHECK(f.count("木頭") == 4);
    CHECK(f.count("駙") == 0);
    CHECK(!is_common(f, "木頭", 5));
    CHECK(is_common(f, "馬", 5));
    CHECK_THROWS_AS(parse_frequency("馬\tmany\n"), LoadError);
    CHECK_THROWS_AS(parse_frequency("馬\t-1\n"), LoadError);
    CHECK_THROWS_AS(load_frequency(fixture("missing.tsv")), LoadError);
}

}  // TEST_SUITE
