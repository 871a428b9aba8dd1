#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "strconf/mdfa.hpp"

namespace strconf {

/// Strongly connected components of an MDFA's transition graph.
///
/// Components are numbered in the order Tarjan's algorithm completes them,
/// which is a reverse topological order of the condensation: every child of
/// component c has an id smaller than c.
struct Components {
    std::vector<std::uint32_t> component_of;           // state -> component
    std::vector<std::vector<State>> members;           // component -> states
    std::vector<std::vector<std::uint32_t>> children;  // component -> successor components, sorted
};

inline Components scc(const Mdfa& m) {
    const std::size_t n = m.num_states(), width = m.width();
    constexpr std::uint32_t unvisited = UINT32_MAX;
    Components out;
    out.component_of.assign(n, unvisited);

    std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<State> stack;
    // explicit call stack: (state, next letter to explore)
    std::vector<std::pair<State, std::size_t>> calls;
    std::uint32_t counter = 0;

    for (State root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        calls.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!calls.empty()) {
            auto& [q, next] = calls.back();
            if (next < width) {
                State t = m.step(q, static_cast<Letter>(next++));
                if (index[t] == unvisited) {
                    index[t] = low[t] = counter++;
                    stack.push_back(t);
                    on_stack[t] = 1;
                    calls.emplace_back(t, 0);
                } else if (on_stack[t]) {
                    low[q] = std::min(low[q], index[t]);
                }
                continue;
            }
            State done = q;
            calls.pop_back();
            if (!calls.empty()) {
                State parent = calls.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                auto c = static_cast<std::uint32_t>(out.members.size());
                out.members.emplace_back();
                State s;
                do {
                    s = stack.back();
                    stack.pop_back();
                    on_stack[s] = 0;
                    out.component_of[s] = c;
                    out.members[c].push_back(s);
                } while (s != done);
                std::sort(out.members[c].begin(), out.members[c].end());
            }
        }
    }

    out.children.resize(out.members.size());
    for (State q = 0; q < n; ++q)
        for (Letter l = 0; l < width; ++l) {
            auto a = out.component_of[q], b = out.component_of[m.step(q, l)];
            if (a != b) out.children[a].push_back(b);
        }
    for (auto& c : out.children) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return out;
}

/// R(q): sorted set of acceptance values of all states reachable from q (q included).
using ValueSet = std::vector<AcceptanceValue>;

struct ReachSets {
    std::vector<ValueSet> sets;

    const ValueSet& operator[](State q) const { return sets.at(q); }
    std::size_t size() const { return sets.size(); }
};

namespace detail {

inline void merge_into(ValueSet& into, const ValueSet& from) {
    ValueSet merged;
    merged.reserve(into.size() + from.size());
    std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
    into = std::move(merged);
}

} // namespace detail

/// Per-component union of member values, accumulated over the condensation in
/// reverse topological order, then copied back to every member state.
inline ReachSets compute_reachable_acceptance_values(const Mdfa& m) {
    auto comps = scc(m);
    std::vector<ValueSet> per_comp(comps.members.size());
    for (std::uint32_t c = 0; c < comps.members.size(); ++c) {
        auto& set = per_comp[c];
        for (State q : comps.members[c]) set.push_back(m.accept[q]);
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
    }
    // ids are already reverse topological: children come first
    for (std::uint32_t c = 0; c < comps.members.size(); ++c)
        for (auto child : comps.children[c]) detail::merge_into(per_comp[c], per_comp[child]);

    ReachSets r;
    r.sets.resize(m.num_states());
    for (std::uint32_t c = 0; c < comps.members.size(); ++c)
        for (State q : comps.members[c]) r.sets[q] = per_comp[c];
    return r;
}

inline bool contains(const ValueSet& set, const AcceptanceValue& v) {
    return std::binary_search(set.begin(), set.end(), v);
}

} // namespace strconf
