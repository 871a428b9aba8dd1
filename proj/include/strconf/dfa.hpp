#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strconf/alphabet.hpp"
#include "strconf/detail/partition.hpp"
#include "strconf/error.hpp"
#include "strconf/regex.hpp"

namespace strconf {

using State = std::uint32_t;

/// Deterministic automaton with a total transition table over the effective alphabet.
struct Dfa {
    AlphabetPtr alphabet;
    std::vector<State> delta; // delta[q * width() + letter]
    std::vector<bool> accepting;
    State source = 0;

    Dfa() = default;
    explicit Dfa(AlphabetPtr a) : alphabet(std::move(a)) {}

    std::size_t width() const { return alphabet->size(); }
    std::size_t num_states() const { return accepting.size(); }

    State add_state(bool accept) {
        auto q = static_cast<State>(accepting.size());
        accepting.push_back(accept);
        delta.resize(delta.size() + width(), q);
        return q;
    }

    State step(State q, Letter l) const { return delta[q * width() + l]; }
    void set(State q, Letter l, State t) { delta[q * width() + l] = t; }

    State run(State q, std::span<const Letter> w) const {
        for (Letter l : w) {
            if (l >= width()) throw LetterOutsideAlphabet("#" + std::to_string(l));
            q = step(q, l);
        }
        return q;
    }
};

namespace detail {

struct Nfa {
    std::vector<std::vector<std::pair<Letter, State>>> edges;
    std::vector<std::vector<State>> eps;

    State add() {
        edges.emplace_back();
        eps.emplace_back();
        return static_cast<State>(edges.size() - 1);
    }
};

struct Fragment {
    State start, accept;
};

/// Thompson construction: one start and one accept state per fragment.
inline Fragment thompson(Nfa& nfa, const Regex& r, const Alphabet& alphabet) {
    using K = Regex::Kind;
    switch (r.kind) {
    case K::Epsilon: {
        auto s = nfa.add(), t = nfa.add();
        nfa.eps[s].push_back(t);
        return {s, t};
    }
    case K::Letter: {
        auto s = nfa.add(), t = nfa.add();
        nfa.edges[s].emplace_back(r.letter, t);
        return {s, t};
    }
    case K::Dot:
    case K::Class: {
        auto s = nfa.add(), t = nfa.add();
        if (r.kind == K::Dot) {
            for (Letter l = 0; l < alphabet.user_size(); ++l) nfa.edges[s].emplace_back(l, t);
        } else {
            for (Letter l : r.letters) nfa.edges[s].emplace_back(l, t);
        }
        return {s, t};
    }
    case K::Concat: {
        auto a = thompson(nfa, r.children[0], alphabet);
        auto b = thompson(nfa, r.children[1], alphabet);
        nfa.eps[a.accept].push_back(b.start);
        return {a.start, b.accept};
    }
    case K::Alt: {
        auto a = thompson(nfa, r.children[0], alphabet);
        auto b = thompson(nfa, r.children[1], alphabet);
        auto s = nfa.add(), t = nfa.add();
        nfa.eps[s].push_back(a.start);
        nfa.eps[s].push_back(b.start);
        nfa.eps[a.accept].push_back(t);
        nfa.eps[b.accept].push_back(t);
        return {s, t};
    }
    case K::Star: {
        auto a = thompson(nfa, r.children[0], alphabet);
        auto s = nfa.add(), t = nfa.add();
        nfa.eps[s].push_back(a.start);
        nfa.eps[s].push_back(t);
        nfa.eps[a.accept].push_back(a.start);
        nfa.eps[a.accept].push_back(t);
        return {s, t};
    }
    }
    return {0, 0};
}

inline void eps_closure(const std::vector<std::vector<State>>& eps, std::vector<State>& set) {
    std::vector<char> seen(eps.size(), 0);
    for (auto q : set) seen[q] = 1;
    std::vector<State> stack(set);
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (auto t : eps[q])
            if (!seen[t]) {
                seen[t] = 1;
                set.push_back(t);
                stack.push_back(t);
            }
    }
    std::sort(set.begin(), set.end());
}

} // namespace detail

/// Subset construction over an epsilon-NFA given as adjacency lists. The
/// result is total (the empty subset becomes the dead state) but not minimized.
inline Dfa determinize(const AlphabetPtr& alphabet,
                       const std::vector<std::vector<std::pair<Letter, State>>>& edges,
                       const std::vector<std::vector<State>>& eps, std::vector<State> start,
                       const std::vector<bool>& nfa_accepting) {
    Dfa d(alphabet);
    std::map<std::vector<State>, State> ids;
    std::deque<std::vector<State>> queue;
    auto intern = [&](std::vector<State> set) {
        detail::eps_closure(eps, set);
        auto [it, fresh] = ids.emplace(set, static_cast<State>(d.num_states()));
        if (fresh) {
            bool acc = std::any_of(set.begin(), set.end(), [&](State q) { return nfa_accepting[q]; });
            d.add_state(acc);
            queue.push_back(std::move(set));
        }
        return it->second;
    };
    d.source = intern(std::move(start));
    std::vector<std::vector<State>> targets(d.width());
    while (!queue.empty()) {
        auto set = std::move(queue.front());
        queue.pop_front();
        State from = ids.at(set);
        for (auto& t : targets) t.clear();
        for (auto q : set)
            for (auto [l, t] : edges[q]) targets[l].push_back(t);
        for (Letter l = 0; l < d.width(); ++l) {
            auto& t = targets[l];
            std::sort(t.begin(), t.end());
            t.erase(std::unique(t.begin(), t.end()), t.end());
            d.set(from, l, intern(t));
        }
    }
    return d;
}

/// Renumbers the states reachable from the source in BFS order (letters in
/// alphabet order), dropping unreachable ones. Returns old->new (UINT32_MAX if dropped).
inline std::vector<State> bfs_order(std::size_t num_states, std::size_t width, std::span<const State> delta,
                                    State source) {
    std::vector<State> map(num_states, UINT32_MAX);
    std::vector<State> order{source};
    map[source] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t l = 0; l < width; ++l) {
            auto t = delta[order[i] * width + l];
            if (map[t] == UINT32_MAX) {
                map[t] = static_cast<State>(order.size());
                order.push_back(t);
            }
        }
    }
    return map;
}

/// Hopcroft minimization; output states are numbered in BFS order from the source.
inline Dfa minimize_dfa(const Dfa& d) {
    const auto width = d.width();
    auto reach = bfs_order(d.num_states(), width, d.delta, d.source);
    std::vector<State> order(std::count_if(reach.begin(), reach.end(), [](State s) { return s != UINT32_MAX; }));
    for (State q = 0; q < reach.size(); ++q)
        if (reach[q] != UINT32_MAX) order[reach[q]] = q;

    // compact reachable part
    std::vector<State> delta(order.size() * width);
    std::vector<std::uint32_t> labels(order.size());
    for (State i = 0; i < order.size(); ++i) {
        labels[i] = d.accepting[order[i]] ? 1 : 0;
        for (std::size_t l = 0; l < width; ++l) delta[i * width + l] = reach[d.step(order[i], l)];
    }
    auto block = detail::refine_partition(order.size(), width, delta, labels);

    // quotient then canonical numbering
    std::size_t nblocks = 0;
    for (auto b : block) nblocks = std::max<std::size_t>(nblocks, b + 1);
    std::vector<State> qdelta(nblocks * width);
    for (State i = 0; i < order.size(); ++i)
        for (std::size_t l = 0; l < width; ++l) qdelta[block[i] * width + l] = block[delta[i * width + l]];
    auto canon = bfs_order(nblocks, width, qdelta, block[0]);

    Dfa out(d.alphabet);
    out.accepting.assign(nblocks, false);
    out.delta.assign(nblocks * width, 0);
    for (State i = 0; i < order.size(); ++i) {
        auto b = canon[block[i]];
        out.accepting[b] = labels[i] == 1;
        for (std::size_t l = 0; l < width; ++l) out.delta[b * width + l] = canon[block[delta[i * width + l]]];
    }
    out.source = 0;
    return out;
}

/// Thompson construction, subset construction, then minimization.
inline Dfa compile_dfa(const Regex& ast, const AlphabetPtr& alphabet) {
    detail::Nfa nfa;
    auto frag = detail::thompson(nfa, ast, *alphabet);
    std::vector<bool> acc(nfa.edges.size(), false);
    acc[frag.accept] = true;
    return minimize_dfa(determinize(alphabet, nfa.edges, nfa.eps, {frag.start}, acc));
}

inline Dfa compile_dfa(std::string_view regex, const AlphabetPtr& alphabet) {
    return compile_dfa(parse_regex(regex, *alphabet), alphabet);
}

inline bool dfa_accepts(const Dfa& d, std::span<const Letter> w) { return d.accepting[d.run(d.source, w)]; }

inline bool dfa_accepts(const Dfa& d, std::string_view text) { return dfa_accepts(d, d.alphabet->encode(text)); }

/// States from which some accepting state is reachable.
inline std::vector<bool> co_reachable(const Dfa& d) {
    const auto n = d.num_states(), width = d.width();
    std::vector<std::vector<State>> pred(n);
    for (State q = 0; q < n; ++q)
        for (std::size_t l = 0; l < width; ++l) pred[d.step(q, l)].push_back(q);
    std::vector<bool> live(n, false);
    std::vector<State> stack;
    for (State q = 0; q < n; ++q)
        if (d.accepting[q]) {
            live[q] = true;
            stack.push_back(q);
        }
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (auto p : pred[q])
            if (!live[p]) {
                live[p] = true;
                stack.push_back(p);
            }
    }
    return live;
}

inline bool dfa_is_empty(const Dfa& d) { return !co_reachable(d)[d.source]; }

/// Number of reachable states that can still reach acceptance; excludes the dead sink.
inline std::size_t live_state_count(const Dfa& d) {
    auto live = co_reachable(d);
    auto reach = bfs_order(d.num_states(), d.width(), d.delta, d.source);
    std::size_t n = 0;
    for (State q = 0; q < d.num_states(); ++q) n += (live[q] && reach[q] != UINT32_MAX);
    return n;
}

namespace detail {

/// BFS over the product; returns a shortest word on which `differs` holds for the reached pair.
template <class Pred>
std::optional<Word> product_search(const Dfa& a, const Dfa& b, Pred differs) {
    if (!same_alphabet(a.alphabet, b.alphabet)) throw AlphabetMismatch();
    const auto width = a.width();
    const auto nb = b.num_states();
    auto key = [nb](State p, State q) { return static_cast<std::uint64_t>(p) * nb + q; };
    std::map<std::uint64_t, std::pair<std::uint64_t, Letter>> parent;
    std::deque<std::pair<State, State>> queue{{a.source, b.source}};
    auto root = key(a.source, b.source);
    parent.emplace(root, std::pair{root, Letter{0}});
    while (!queue.empty()) {
        auto [p, q] = queue.front();
        queue.pop_front();
        if (differs(a.accepting[p], b.accepting[q])) {
            Word w;
            for (auto k = key(p, q); k != root;) {
                auto [prev, l] = parent.at(k);
                w.push_back(l);
                k = prev;
            }
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (Letter l = 0; l < width; ++l) {
            State p2 = a.step(p, l), q2 = b.step(q, l);
            if (parent.emplace(key(p2, q2), std::pair{key(p, q), l}).second) queue.emplace_back(p2, q2);
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Shortest word accepted by exactly one of the two automata, if any.
inline std::optional<Word> distinguishing_word(const Dfa& a, const Dfa& b) {
    return detail::product_search(a, b, [](bool x, bool y) { return x != y; });
}

inline bool dfa_language_equivalent(const Dfa& a, const Dfa& b) { return !distinguishing_word(a, b); }

/// Shortest word in L(a) \ L(b), if any.
inline std::optional<Word> subset_counterexample(const Dfa& a, const Dfa& b) {
    return detail::product_search(a, b, [](bool x, bool y) { return x && !y; });
}

inline bool dfa_subset(const Dfa& a, const Dfa& b) { return !subset_counterexample(a, b); }

/// The DFA of the left quotient w^-1 L(d).
inline Dfa left_quotient(const Dfa& d, std::span<const Letter> w) {
    Dfa out = d;
    out.source = d.run(d.source, w);
    return out;
}

inline Dfa complement(const Dfa& d) {
    Dfa out = d;
    out.accepting.flip();
    return out;
}

/// Accepts every word over the effective alphabet.
inline Dfa universal_dfa(const AlphabetPtr& alphabet) {
    Dfa d(alphabet);
    d.add_state(true);
    return d;
}

inline Dfa empty_dfa(const AlphabetPtr& alphabet) {
    Dfa d(alphabet);
    d.add_state(false);
    return d;
}

} // namespace strconf
