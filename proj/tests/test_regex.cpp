#include <gtest/gtest.h>

#include "strconf/dfa_to_regex.hpp"
#include "support.hpp"

using namespace strconf;
using namespace testing_support;

namespace {

AlphabetPtr abcd() { return Alphabet::from_string("abcd"); }

} // namespace

TEST(ParseRegex, AlternationAndStarPrecedence) {
    auto a = abcd();
    Regex r = parse_regex("a|c|(abc*)d", *a);
    EXPECT_EQ(describe(r, *a), "Alt(a,Alt(c,Concat(Concat(Concat(a,b),Star(c)),d)))");
    Dfa d = compile_dfa(r, a);
    for (auto w : {"abd", "abcd", "abccd", "a", "c"}) EXPECT_TRUE(dfa_accepts(d, w)) << w;
    for (auto w : {"", "ab", "d", "ad", "cd", "acd", "abc"}) EXPECT_FALSE(dfa_accepts(d, w)) << w;
}

TEST(ParseRegex, EmptyGroupIsEpsilon) {
    auto a = abcd();
    EXPECT_EQ(parse_regex("()", *a), Regex::epsilon());
}

TEST(ParseRegex, DanglingAlternationReportsOffset) {
    auto a = abcd();
    try {
        parse_regex("ab|", *a);
        FAIL() << "expected a syntax error";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 3u);
        EXPECT_FALSE(e.expected().empty());
    }
}

TEST(ParseRegex, OtherSyntaxErrors) {
    auto a = abcd();
    for (auto bad : {"(a", "a)", "*a", "[]", "[a", "a\\", "\\a", "|a", "a||b"})
        EXPECT_THROW(parse_regex(bad, *a), SyntaxError) << bad;
}

TEST(ParseRegex, LetterOutsideAlphabet) {
    auto a = abcd();
    try {
        parse_regex("abx", *a);
        FAIL();
    } catch (const LetterOutsideAlphabet& e) {
        EXPECT_EQ(e.letter(), "x");
    }
    EXPECT_THROW(parse_regex("ab$", *a), LetterOutsideAlphabet);
}

TEST(ParseRegex, EscapesAndClasses) {
    auto a = std::make_shared<const Alphabet>(std::vector<char32_t>{U'a', U'*', U'|', U'$', U' '}, true);
    Dfa d = compile_dfa(R"(a\*\|\$ [a\*]$)", a);
    Word w = a->encode("a*|$ *");
    w.push_back(a->eol());
    EXPECT_TRUE(dfa_accepts(d, w));
    // `$` unescaped is EOL, escaped is the declared letter
    EXPECT_EQ(parse_regex("$", *a), Regex::make_letter(a->eol()));
    EXPECT_EQ(parse_regex("\\$", *a), Regex::make_letter(a->letter(U'$')));
}

TEST(ParseRegex, NonAsciiLetters) {
    auto a = Alphabet::from_string("æøå");
    Dfa d = compile_dfa("æ(ø|å)*", a);
    EXPECT_TRUE(dfa_accepts(d, "æøåø"));
    EXPECT_FALSE(dfa_accepts(d, "øæ"));
}

TEST(ParseRegex, WhitespaceIsALetter) {
    auto a = Alphabet::from_string("a ");
    EXPECT_TRUE(dfa_accepts(compile_dfa("a a", a), "a a"));
    EXPECT_THROW(parse_regex("a b", *abcd()), LetterOutsideAlphabet);
}

TEST(ParseRegex, ToTextRoundTrip) {
    std::mt19937_64 rng(11);
    auto a = Alphabet::from_string("ab|");
    for (int i = 0; i < 300; ++i) {
        Regex r = random_ast(rng, *a, 4);
        std::string text = to_text(r, *a);
        Dfa x = compile_dfa(r, a), y = compile_dfa(text, a);
        EXPECT_TRUE(dfa_language_equivalent(x, y)) << text;
    }
}

TEST(DfaToRegex, StarDomain) {
    auto a = abcd();
    std::string text = dfa_to_regex(compile_dfa("d*", a));
    EXPECT_EQ(text, "d*");
}

TEST(DfaToRegex, EmptyLanguageMarker) {
    auto a = abcd();
    EXPECT_EQ(dfa_to_regex(empty_dfa(a)), kEmptyLanguage);
    EXPECT_EQ(dfa_to_regex(complement(universal_dfa(a))), kEmptyLanguage);
}

TEST(DfaToRegex, FiniteUnion) {
    auto a = abcd();
    Dfa d = compile_dfa("ab|ac", a);
    Dfa back = compile_dfa(dfa_to_regex(d), a);
    EXPECT_TRUE(dfa_language_equivalent(d, back));
    auto words = accepted_words(back, 4);
    ASSERT_EQ(words.size(), 2u);
    EXPECT_EQ(a->render(words[0]), "ab");
    EXPECT_EQ(a->render(words[1]), "ac");
}

TEST(DfaToRegex, UniversalAndEpsilon) {
    auto a = abcd();
    EXPECT_TRUE(dfa_language_equivalent(compile_dfa(dfa_to_regex(universal_dfa(a)), a), compile_dfa(".*", a)));
    EXPECT_EQ(dfa_to_regex(compile_dfa("()", a)), "()");
}

TEST(DfaToRegex, EolRendering) {
    auto a = std::make_shared<const Alphabet>(std::vector<char32_t>{U'a', U'b'}, true);
    for (auto re : {"a*$", "(a|b)*(()|$)", "$", "a(b|$)", "[ab]*"}) {
        Dfa d = compile_dfa(re, a);
        std::string text = dfa_to_regex(d);
        EXPECT_TRUE(dfa_language_equivalent(d, compile_dfa(text, a))) << re << " -> " << text;
    }
}

TEST(DfaToRegex, RoundTripRandomAsts) {
    std::mt19937_64 rng(3);
    for (std::size_t letters = 1; letters <= 4; ++letters) {
        auto a = Alphabet::from_string(std::string("abcd").substr(0, letters));
        for (int i = 0; i < 150; ++i) {
            Regex r = random_ast(rng, *a, 4);
            Dfa d = compile_dfa(r, a);
            std::string text = dfa_to_regex(d);
            if (text == kEmptyLanguage) {
                EXPECT_TRUE(dfa_is_empty(d));
                continue;
            }
            EXPECT_TRUE(dfa_language_equivalent(d, compile_dfa(text, a))) << to_text(r, *a) << " -> " << text;
        }
    }
}

TEST(DfaToRegex, MetaLettersAreEscaped) {
    auto a = Alphabet::from_string("a*.");
    Dfa d = compile_dfa("(a\\*)*\\.", a);
    EXPECT_TRUE(dfa_language_equivalent(d, compile_dfa(dfa_to_regex(d), a)));
}
