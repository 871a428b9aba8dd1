#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "strconf/dfa.hpp"
#include "strconf/regex.hpp"

namespace strconf {

/// Rendering of the empty language, which has no expression in the regex grammar.
inline constexpr const char* kEmptyLanguage = "∅";

namespace detail {

/// Regex terms used during state elimination. Constructors simplify eagerly.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Empty, Eps, Set, Cat, Alt, Star };
    Kind kind;
    std::vector<Letter> letters; // Set
    std::vector<TermPtr> parts;  // Cat, Alt; Star has one
};

inline int compare(const TermPtr& a, const TermPtr& b) {
    if (a == b) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    if (a->letters != b->letters) return a->letters < b->letters ? -1 : 1;
    if (a->parts.size() != b->parts.size()) return a->parts.size() < b->parts.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->parts.size(); ++i)
        if (int c = compare(a->parts[i], b->parts[i])) return c;
    return 0;
}

inline bool same(const TermPtr& a, const TermPtr& b) { return compare(a, b) == 0; }

inline TermPtr mk(Term::Kind k, std::vector<Letter> ls = {}, std::vector<TermPtr> ps = {}) {
    return std::make_shared<const Term>(Term{k, std::move(ls), std::move(ps)});
}

inline TermPtr t_empty() {
    static const TermPtr e = mk(Term::Kind::Empty);
    return e;
}
inline TermPtr t_eps() {
    static const TermPtr e = mk(Term::Kind::Eps);
    return e;
}
inline TermPtr t_letter(Letter l) { return mk(Term::Kind::Set, {l}); }

inline bool nullable(const TermPtr& t) {
    switch (t->kind) {
    case Term::Kind::Eps:
    case Term::Kind::Star:
        return true;
    case Term::Kind::Cat:
        return std::all_of(t->parts.begin(), t->parts.end(), nullable);
    case Term::Kind::Alt:
        return std::any_of(t->parts.begin(), t->parts.end(), nullable);
    default:
        return false;
    }
}

TermPtr t_star(TermPtr a);

inline TermPtr t_cat(const TermPtr& a, const TermPtr& b) {
    using K = Term::Kind;
    if (a->kind == K::Empty || b->kind == K::Empty) return t_empty();
    if (a->kind == K::Eps) return b;
    if (b->kind == K::Eps) return a;
    std::vector<TermPtr> parts;
    auto push = [&](const TermPtr& t) {
        if (t->kind == K::Cat)
            parts.insert(parts.end(), t->parts.begin(), t->parts.end());
        else
            parts.push_back(t);
    };
    push(a);
    push(b);
    // X* X* == X*
    std::vector<TermPtr> merged;
    for (auto& p : parts) {
        if (!merged.empty() && p->kind == K::Star && same(merged.back(), p)) continue;
        merged.push_back(p);
    }
    if (merged.size() == 1) return merged[0];
    return mk(K::Cat, {}, std::move(merged));
}

inline TermPtr t_alt(const TermPtr& a, const TermPtr& b) {
    using K = Term::Kind;
    if (a->kind == K::Empty) return b;
    if (b->kind == K::Empty) return a;
    std::vector<TermPtr> parts;
    std::vector<Letter> letters;
    bool eps = false;
    auto push = [&](const TermPtr& t) {
        auto add = [&](const TermPtr& x) {
            if (x->kind == K::Set)
                letters.insert(letters.end(), x->letters.begin(), x->letters.end());
            else if (x->kind == K::Eps)
                eps = true;
            else
                parts.push_back(x);
        };
        if (t->kind == K::Alt)
            for (auto& x : t->parts) add(x);
        else
            add(t);
    };
    push(a);
    push(b);
    std::sort(parts.begin(), parts.end(), [](auto& x, auto& y) { return compare(x, y) < 0; });
    parts.erase(std::unique(parts.begin(), parts.end(), same), parts.end());
    std::sort(letters.begin(), letters.end());
    letters.erase(std::unique(letters.begin(), letters.end()), letters.end());

    if (eps) {
        // () | X X*  ==  () | X* X  ==  X*
        for (auto& p : parts) {
            if (p->kind != K::Cat || p->parts.size() != 2) continue;
            auto &x = p->parts[0], &y = p->parts[1];
            if (y->kind == K::Star && same(y->parts[0], x)) p = y;
            else if (x->kind == K::Star && same(x->parts[0], y)) p = x;
        }
        if (std::any_of(parts.begin(), parts.end(), nullable)) eps = false;
    }
    std::vector<TermPtr> all;
    if (eps) all.push_back(t_eps());
    if (!letters.empty()) all.push_back(mk(K::Set, letters));
    all.insert(all.end(), parts.begin(), parts.end());
    if (all.size() == 1) return all[0];
    return mk(K::Alt, {}, std::move(all));
}

inline TermPtr t_star(TermPtr a) {
    using K = Term::Kind;
    if (a->kind == K::Empty || a->kind == K::Eps) return t_eps();
    if (a->kind == K::Star) return a;
    if (a->kind == K::Alt) {
        // (() | X)* == X*
        std::vector<TermPtr> rest;
        for (auto& p : a->parts)
            if (p->kind != K::Eps) rest.push_back(p);
        if (rest.size() != a->parts.size()) {
            TermPtr inner = t_empty();
            for (auto& p : rest) inner = t_alt(inner, p);
            return t_star(inner);
        }
    }
    return mk(K::Star, {}, {std::move(a)});
}

class TermPrinter {
  public:
    explicit TermPrinter(const Alphabet& alphabet) : alphabet_(alphabet) {}

    // precedence: 0 alternation, 1 concatenation, 2 repetition, 3 atom
    std::string print(const TermPtr& t, int min_prec = 0) const {
        int p = 0;
        std::string s = render(t, p);
        return p < min_prec ? "(" + s + ")" : s;
    }

  private:
    const Alphabet& alphabet_;

    std::string render_set(const std::vector<Letter>& ls, int& prec) const {
        std::vector<Letter> user;
        bool eol = false;
        for (Letter l : ls) {
            if (alphabet_.is_eol(l))
                eol = true;
            else
                user.push_back(l);
        }
        std::string s;
        if (user.size() == 1) {
            s = render_regex_letter(alphabet_, user[0]);
        } else if (user.size() == alphabet_.user_size()) {
            s = ".";
        } else if (!user.empty()) {
            s = "[";
            for (Letter l : user) s += render_regex_letter(alphabet_, l);
            s += "]";
        }
        if (!eol) {
            prec = 3;
            return s;
        }
        if (user.empty()) {
            prec = 3;
            return "$";
        }
        prec = 0;
        return s + "|$";
    }

    std::string render(const TermPtr& t, int& prec) const {
        using K = Term::Kind;
        switch (t->kind) {
        case K::Empty:
            prec = 3;
            return kEmptyLanguage;
        case K::Eps:
            prec = 3;
            return "()";
        case K::Set:
            return render_set(t->letters, prec);
        case K::Star:
            prec = 2;
            return print(t->parts[0], 3) + "*";
        case K::Cat: {
            prec = 1;
            std::string s;
            for (auto& p : t->parts) s += print(p, 2);
            return s;
        }
        case K::Alt: {
            prec = 0;
            std::string s;
            for (std::size_t i = 0; i < t->parts.size(); ++i) s += (i ? "|" : "") + print(t->parts[i], 1);
            return s;
        }
        }
        return {};
    }
};

} // namespace detail

/// Converts a DFA to an expression in the regex grammar by state elimination.
/// Returns kEmptyLanguage when the DFA accepts nothing. The text is not
/// canonical; only its language is meaningful.
inline std::string dfa_to_regex(const Dfa& input) {
    using detail::TermPtr;
    Dfa d = minimize_dfa(input);
    auto live = co_reachable(d);
    if (!live[d.source]) return kEmptyLanguage;

    // GNFA over live states plus fresh start (n) and final (n+1)
    const State n = static_cast<State>(d.num_states());
    const State start = n, final_ = n + 1;
    std::map<std::pair<State, State>, TermPtr> edge;
    std::vector<std::set<State>> out(n + 2), in(n + 2);
    auto add = [&](State p, State q, const TermPtr& t) {
        auto [it, fresh] = edge.emplace(std::pair{p, q}, t);
        if (!fresh) it->second = detail::t_alt(it->second, t);
        out[p].insert(q);
        in[q].insert(p);
    };
    add(start, d.source, detail::t_eps());
    for (State q = 0; q < n; ++q) {
        if (!live[q]) continue;
        if (d.accepting[q]) add(q, final_, detail::t_eps());
        for (Letter l = 0; l < d.width(); ++l) {
            State t = d.step(q, l);
            if (live[t]) add(q, t, detail::t_letter(l));
        }
    }

    std::set<State> remaining;
    for (State q = 0; q < n; ++q)
        if (live[q]) remaining.insert(q);

    auto degree = [&](State q) {
        std::size_t i = in[q].size() - in[q].count(q);
        std::size_t o = out[q].size() - out[q].count(q);
        return i * o;
    };

    while (!remaining.empty()) {
        State victim = *remaining.begin();
        for (State q : remaining)
            if (degree(q) < degree(victim)) victim = q;
        remaining.erase(victim);

        TermPtr loop = detail::t_empty();
        if (auto it = edge.find({victim, victim}); it != edge.end()) loop = it->second;
        TermPtr loop_star = detail::t_star(loop);

        std::vector<State> preds, succs;
        for (State p : in[victim])
            if (p != victim) preds.push_back(p);
        for (State s : out[victim])
            if (s != victim) succs.push_back(s);
        for (State p : preds)
            for (State s : succs) {
                auto via = detail::t_cat(detail::t_cat(edge.at({p, victim}), loop_star), edge.at({victim, s}));
                add(p, s, via);
            }
        for (State p : preds) {
            edge.erase({p, victim});
            out[p].erase(victim);
        }
        for (State s : succs) {
            edge.erase({victim, s});
            in[s].erase(victim);
        }
        edge.erase({victim, victim});
        in[victim].clear();
        out[victim].clear();
    }

    auto it = edge.find({start, final_});
    if (it == edge.end()) return kEmptyLanguage;
    return detail::TermPrinter(*d.alphabet).print(it->second);
}

} // namespace strconf
