#include <gtest/gtest.h>

#include "strconf/mdfa.hpp"
#include "support.hpp"

using namespace strconf;
using namespace testing_support;

namespace {

AlphabetPtr abcd() { return Alphabet::from_string("abcd"); }

Mdfa two_atom_mdfa() {
    auto a = abcd();
    std::vector<Dfa> dfas{compile_dfa("abc", a), compile_dfa("abd*", a)};
    return construct_mdfa(dfas);
}

Word random_word(std::mt19937_64& rng, std::size_t width, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<Letter> letter(0, static_cast<Letter>(width - 1));
    Word w(len(rng));
    for (auto& l : w) l = letter(rng);
    return w;
}

} // namespace

TEST(ConstructMdfa, TwoAtomAcceptanceValues) {
    Mdfa m = two_atom_mdfa();
    EXPECT_EQ(m.k, 2u);
    EXPECT_EQ(mdfa_live_state_count(m), 5u);
    EXPECT_EQ(m.num_states(), 6u);
    const std::pair<const char*, const char*> expected[] = {
        {"", "FF"}, {"a", "FF"}, {"ab", "FT"}, {"abc", "TF"}, {"abd", "FT"}};
    for (auto [word, value] : expected) EXPECT_EQ(to_string(m.accept[mdfa_step(m, m.source, word)]), value) << word;
}

TEST(ConstructMdfa, NoStateAcceptsBoth) {
    Mdfa m = two_atom_mdfa();
    for (const auto& v : m.accept) EXPECT_NE(to_string(v), "TT");
}

TEST(ConstructMdfa, SingleDfaDegenerates) {
    auto a = abcd();
    Dfa d = compile_dfa("a(b|c)*", a);
    std::vector<Dfa> one{d};
    Mdfa m = construct_mdfa(one);
    EXPECT_EQ(m.k, 1u);
    EXPECT_EQ(m.num_states(), d.num_states());
    Dfa back = mdfa_as_dfa(m, m.source, [](const AcceptanceValue& v) { return v.bits[0]; });
    EXPECT_TRUE(dfa_language_equivalent(back, d));
}

TEST(ConstructMdfa, Errors) {
    std::vector<Dfa> none;
    EXPECT_THROW(construct_mdfa(none), Error);
    std::vector<Dfa> mixed{compile_dfa("a", abcd()), compile_dfa("a", Alphabet::from_string("ab"))};
    EXPECT_THROW(construct_mdfa(mixed), AlphabetMismatch);
}

TEST(MdfaStep, TwoAtomWords) {
    Mdfa m = two_atom_mdfa();
    EXPECT_EQ(mdfa_step(m, m.source, ""), m.source);
    State ab = mdfa_step(m, m.source, "ab");
    EXPECT_EQ(to_string(m.accept[ab]), "FT");
    State abdd = mdfa_step(m, m.source, "abdd");
    EXPECT_EQ(abdd, mdfa_step(m, m.source, "abd"));
    EXPECT_EQ(m.step(abdd, 3), abdd); // d loops
    EXPECT_THROW(mdfa_step(m, m.source, "abx"), LetterOutsideAlphabet);
}

TEST(MdfaDump, Format) {
    Mdfa m = two_atom_mdfa();
    std::string text = dump(m);
    EXPECT_EQ(text.substr(0, text.find('\n')), "0\tFF\ta→1 b→2 c→2 d→2");
}

TEST(Mdfa, SimulatesEveryInput) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = Alphabet::from_string(std::string("abc").substr(0, 1 + trial % 3));
        std::vector<Dfa> dfas;
        for (int i = 0; i < 1 + trial % 4; ++i) dfas.push_back(compile_dfa(random_ast(rng, *a, 3), a));
        Mdfa m = construct_mdfa(dfas);
        for (int k = 0; k < 500; ++k) {
            Word w = random_word(rng, a->size(), 8);
            const auto& v = m.accept[mdfa_step(m, m.source, w)];
            for (std::size_t i = 0; i < dfas.size(); ++i) ASSERT_EQ(v.bits[i], dfa_accepts(dfas[i], w));
        }
        std::size_t product = 1;
        for (auto& d : dfas) product *= d.num_states();
        EXPECT_LE(m.num_states(), product);
        // each coordinate is at a live state or its single sink, and all-sink is not live
        std::size_t live_product = 1;
        for (auto& d : dfas) live_product *= live_state_count(d) + 1;
        EXPECT_LE(mdfa_live_state_count(m), live_product - 1);
    }
}

TEST(Mdfa, MinimalWhenInputsAreMinimal) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = Alphabet::from_string(std::string("abc").substr(0, 1 + trial % 3));
        std::vector<Dfa> dfas;
        for (int i = 0; i < 1 + trial % 4; ++i) dfas.push_back(compile_dfa(random_ast(rng, *a, 3), a));
        Mdfa m = construct_mdfa(dfas);
        EXPECT_EQ(minimize_mdfa(m).num_states(), m.num_states());
    }
}

TEST(MinimizeMdfa, MergesTwins) {
    auto a = Alphabet::from_string("ab");
    Mdfa m;
    m.alphabet = a;
    m.k = 1;
    m.accept = {acceptance_from_string("F"), acceptance_from_string("T"), acceptance_from_string("T")};
    m.delta = {1, 2, 1, 1, 2, 2};
    Mdfa r = minimize_mdfa(m);
    EXPECT_EQ(r.num_states(), 2u);
}

TEST(MinimizeMdfa, DeadMarkerStaysDistinct) {
    auto a = Alphabet::from_string("a");
    Mdfa m;
    m.alphabet = a;
    m.k = 1;
    m.accept = {acceptance_from_string("F"), AcceptanceValue{{}, true}};
    m.delta = {1, 1};
    EXPECT_EQ(minimize_mdfa(m).num_states(), 2u);
}

TEST(MinimizeMdfa, PreservesAcceptanceOnRandomWords) {
    std::mt19937_64 rng(47);
    auto a = Alphabet::from_string("ab");
    std::uniform_int_distribution<State> state(0, 11);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Mdfa m;
        m.alphabet = a;
        m.k = 2;
        for (int q = 0; q < 12; ++q) {
            AcceptanceValue v;
            v.bits = {bit(rng) == 1, bit(rng) == 1};
            m.accept.push_back(v);
        }
        for (int i = 0; i < 24; ++i) m.delta.push_back(state(rng));
        auto r = minimize_mdfa_mapped(m);
        for (int k = 0; k < 200; ++k) {
            Word w = random_word(rng, 2, 6);
            ASSERT_EQ(m.accept[mdfa_step(m, m.source, w)], r.mdfa.accept[mdfa_step(r.mdfa, r.mdfa.source, w)]);
        }
        EXPECT_EQ(r.state_map[m.source], r.mdfa.source);
    }
}

TEST(AcceptanceValue, TextRoundTrip) {
    for (auto s : {"FT", "TF", "FF", "DEAD", "-"}) EXPECT_EQ(to_string(acceptance_from_string(s)), s);
    EXPECT_NE(acceptance_from_string("FF"), acceptance_from_string("DEAD"));
}
