#pragma once

#include <algorithm>
#include <compare>
#include <deque>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "strconf/dfa.hpp"

namespace strconf {

/// Per-state acceptance bits of the joined automata. `dead` marks a value that
/// was pruned because it can never take part in a solution; it compares
/// distinct from every bit pattern.
struct AcceptanceValue {
    std::vector<bool> bits;
    bool dead = false;

    friend auto operator<=>(const AcceptanceValue&, const AcceptanceValue&) = default;
    friend bool operator==(const AcceptanceValue&, const AcceptanceValue&) = default;

    bool any() const { return std::find(bits.begin(), bits.end(), true) != bits.end(); }
};

inline std::string to_string(const AcceptanceValue& v) {
    if (v.dead) return "DEAD";
    if (v.bits.empty()) return "-";
    std::string s;
    for (bool b : v.bits) s += b ? 'T' : 'F';
    return s;
}

inline AcceptanceValue acceptance_from_string(std::string_view s) {
    AcceptanceValue v;
    if (s == "DEAD") {
        v.dead = true;
        return v;
    }
    if (s == "-") return v;
    for (char c : s) v.bits.push_back(c == 'T');
    return v;
}

/// Multi-DFA: a total automaton whose states carry an acceptance value of size k.
struct Mdfa {
    AlphabetPtr alphabet;
    std::size_t k = 0;
    std::vector<State> delta; // delta[q * width() + letter]
    std::vector<AcceptanceValue> accept;
    State source = 0;

    std::size_t width() const { return alphabet->size(); }
    std::size_t num_states() const { return accept.size(); }
    State step(State q, Letter l) const { return delta[q * width() + l]; }
};

inline State mdfa_step(const Mdfa& m, State q, std::span<const Letter> w) {
    for (Letter l : w) {
        if (l >= m.width()) throw LetterOutsideAlphabet("#" + std::to_string(l));
        q = m.step(q, l);
    }
    return q;
}

inline State mdfa_step(const Mdfa& m, State q, std::string_view text) {
    return mdfa_step(m, q, m.alphabet->encode(text));
}

/// Joins DFAs over one alphabet into an MDFA whose bit i tracks acceptance by dfas[i].
/// Positions (q_1..q_k) are memoized so each creates one state; ids follow BFS discovery.
inline Mdfa construct_mdfa(std::span<const Dfa> dfas) {
    if (dfas.empty()) throw Error("construct_mdfa needs at least one DFA");
    for (auto& d : dfas)
        if (!same_alphabet(d.alphabet, dfas[0].alphabet)) throw AlphabetMismatch();

    Mdfa m;
    m.alphabet = dfas[0].alphabet;
    m.k = dfas.size();
    const auto width = m.width();

    std::map<std::vector<State>, State> memo;
    std::deque<std::vector<State>> queue;
    auto intern = [&](std::vector<State> pos) {
        auto [it, fresh] = memo.emplace(pos, static_cast<State>(m.accept.size()));
        if (fresh) {
            AcceptanceValue v;
            v.bits.reserve(pos.size());
            for (std::size_t i = 0; i < pos.size(); ++i) v.bits.push_back(dfas[i].accepting[pos[i]]);
            m.accept.push_back(std::move(v));
            m.delta.resize(m.delta.size() + width);
            queue.push_back(std::move(pos));
        }
        return it->second;
    };

    std::vector<State> start;
    for (auto& d : dfas) start.push_back(d.source);
    m.source = intern(std::move(start));
    std::vector<State> next(dfas.size());
    while (!queue.empty()) {
        auto pos = std::move(queue.front());
        queue.pop_front();
        State q = memo.at(pos);
        for (Letter l = 0; l < width; ++l) {
            for (std::size_t i = 0; i < dfas.size(); ++i) next[i] = dfas[i].step(pos[i], l);
            State t = intern(next);
            m.delta[q * width + l] = t;
        }
    }
    return m;
}

/// MDFA with no joined automata: one state, acceptance value of size 0.
inline Mdfa trivial_mdfa(const AlphabetPtr& alphabet) {
    Mdfa m;
    m.alphabet = alphabet;
    m.accept.push_back(AcceptanceValue{});
    m.delta.assign(m.width(), 0);
    return m;
}

struct MinimizedMdfa {
    Mdfa mdfa;
    std::vector<State> state_map; // old state -> new state, UINT32_MAX if unreachable
};

/// Partition refinement on acceptance values, then BFS-canonical numbering.
inline MinimizedMdfa minimize_mdfa_mapped(const Mdfa& m) {
    const auto width = m.width();
    auto reach = bfs_order(m.num_states(), width, m.delta, m.source);
    std::vector<State> order;
    order.resize(std::count_if(reach.begin(), reach.end(), [](State s) { return s != UINT32_MAX; }));
    for (State q = 0; q < reach.size(); ++q)
        if (reach[q] != UINT32_MAX) order[reach[q]] = q;

    std::map<AcceptanceValue, std::uint32_t> label_ids;
    std::vector<std::uint32_t> labels(order.size());
    std::vector<State> delta(order.size() * width);
    for (State i = 0; i < order.size(); ++i) {
        labels[i] = label_ids.emplace(m.accept[order[i]], static_cast<std::uint32_t>(label_ids.size())).first->second;
        for (std::size_t l = 0; l < width; ++l) delta[i * width + l] = reach[m.step(order[i], l)];
    }
    auto block = detail::refine_partition(order.size(), width, delta, labels);

    std::size_t nblocks = 0;
    for (auto b : block) nblocks = std::max<std::size_t>(nblocks, b + 1);
    std::vector<State> qdelta(nblocks * width);
    for (State i = 0; i < order.size(); ++i)
        for (std::size_t l = 0; l < width; ++l) qdelta[block[i] * width + l] = block[delta[i * width + l]];
    auto canon = bfs_order(nblocks, width, qdelta, block[0]);

    MinimizedMdfa out;
    Mdfa& r = out.mdfa;
    r.alphabet = m.alphabet;
    r.k = m.k;
    r.accept.resize(nblocks);
    r.delta.assign(nblocks * width, 0);
    for (State i = 0; i < order.size(); ++i) {
        auto b = canon[block[i]];
        r.accept[b] = m.accept[order[i]];
        for (std::size_t l = 0; l < width; ++l) r.delta[b * width + l] = canon[block[delta[i * width + l]]];
    }
    r.source = 0;
    out.state_map.assign(m.num_states(), UINT32_MAX);
    for (State i = 0; i < order.size(); ++i) out.state_map[order[i]] = canon[block[i]];
    return out;
}

inline Mdfa minimize_mdfa(const Mdfa& m) { return minimize_mdfa_mapped(m).mdfa; }

/// Reads the MDFA as a DFA from `source`, accepting where `pred(accept(q))` holds.
template <class Pred>
Dfa mdfa_as_dfa(const Mdfa& m, State source, Pred pred) {
    Dfa d(m.alphabet);
    d.delta = m.delta;
    d.accepting.resize(m.num_states());
    for (State q = 0; q < m.num_states(); ++q) d.accepting[q] = pred(m.accept[q]);
    d.source = source;
    return d;
}

/// States from which a value with some true bit is reachable; the rest are
/// equivalent to the totalization sink.
inline std::vector<bool> mdfa_live_states(const Mdfa& m) {
    return co_reachable(mdfa_as_dfa(m, m.source, [](const AcceptanceValue& v) { return !v.dead && v.any(); }));
}

inline std::size_t mdfa_live_state_count(const Mdfa& m) {
    auto live = mdfa_live_states(m);
    return static_cast<std::size_t>(std::count(live.begin(), live.end(), true));
}

/// One line per state: `id<TAB>bits-or-DEAD<TAB>letter→id ...`.
inline std::string dump(const Mdfa& m) {
    std::ostringstream os;
    for (State q = 0; q < m.num_states(); ++q) {
        os << q << '\t' << to_string(m.accept[q]) << '\t';
        for (Letter l = 0; l < m.width(); ++l) os << (l ? " " : "") << m.alphabet->render(l) << "→" << m.step(q, l);
        os << '\n';
    }
    return os.str();
}

} // namespace strconf
