#pragma once

// Independent reference implementations used as test oracles.

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "strconf/dfa.hpp"
#include "strconf/problem.hpp"
#include "strconf/regex.hpp"

namespace testing_support {

using namespace strconf;

/// End positions reachable by matching r against w starting at `from`.
inline std::set<std::size_t> ends(const Regex& r, const Alphabet& a, const Word& w, std::size_t from) {
    using K = Regex::Kind;
    std::set<std::size_t> out;
    switch (r.kind) {
    case K::Epsilon:
        out.insert(from);
        break;
    case K::Letter:
        if (from < w.size() && w[from] == r.letter) out.insert(from + 1);
        break;
    case K::Dot:
        if (from < w.size() && !a.is_eol(w[from])) out.insert(from + 1);
        break;
    case K::Class:
        if (from < w.size() && std::find(r.letters.begin(), r.letters.end(), w[from]) != r.letters.end())
            out.insert(from + 1);
        break;
    case K::Concat:
        for (auto m : ends(r.children[0], a, w, from))
            for (auto e : ends(r.children[1], a, w, m)) out.insert(e);
        break;
    case K::Alt:
        out = ends(r.children[0], a, w, from);
        for (auto e : ends(r.children[1], a, w, from)) out.insert(e);
        break;
    case K::Star: {
        out.insert(from);
        std::vector<std::size_t> todo{from};
        while (!todo.empty()) {
            auto p = todo.back();
            todo.pop_back();
            for (auto e : ends(r.children[0], a, w, p))
                if (e > p && out.insert(e).second) todo.push_back(e);
        }
        break;
    }
    }
    return out;
}

inline bool naive_match(const Regex& r, const Alphabet& a, const Word& w) { return ends(r, a, w, 0).count(w.size()) > 0; }

/// Every word over `width` letters of length at most max_len, shortest first.
inline std::vector<Word> all_words(std::size_t width, std::size_t max_len) {
    std::vector<Word> out{{}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].size() == max_len) continue;
        for (Letter l = 0; l < width; ++l) {
            Word w = out[i];
            w.push_back(l);
            out.push_back(std::move(w));
        }
    }
    return out;
}

inline std::vector<Word> accepted_words(const Dfa& d, std::size_t max_len) {
    std::vector<Word> out;
    for (auto& w : all_words(d.width(), max_len))
        if (dfa_accepts(d, w)) out.push_back(w);
    return out;
}

inline Regex random_ast(std::mt19937_64& rng, const Alphabet& a, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_int_distribution<Letter> letter(0, static_cast<Letter>(a.user_size() - 1));
    int r = pick(rng);
    if (depth == 0 || r < 3) {
        if (r == 0) return Regex::epsilon();
        if (r == 1) return Regex::dot();
        if (r == 2 && a.user_size() > 1) return Regex::make_class({0, letter(rng)});
        return Regex::make_letter(letter(rng));
    }
    if (r < 6) return Regex::concat(random_ast(rng, a, depth - 1), random_ast(rng, a, depth - 1));
    if (r < 8) return Regex::alt(random_ast(rng, a, depth - 1), random_ast(rng, a, depth - 1));
    return Regex::star(random_ast(rng, a, depth - 1));
}

/// Uniformly random total DFA with n states.
inline Dfa random_dfa(std::mt19937_64& rng, const AlphabetPtr& a, std::size_t n) {
    Dfa d(a);
    std::uniform_int_distribution<State> state(0, static_cast<State>(n - 1));
    std::bernoulli_distribution acc(0.4);
    for (std::size_t i = 0; i < n; ++i) d.add_state(acc(rng));
    for (State q = 0; q < n; ++q)
        for (Letter l = 0; l < d.width(); ++l) d.set(q, l, state(rng));
    d.source = state(rng);
    return d;
}

inline std::string fixture(const std::string& name) {
    std::ifstream in(std::string(STRCONF_DATA_DIR) + "/" + name);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Problem load(const std::string& name) { return Problem::parse(fixture(name)); }

} // namespace testing_support
