#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "strconf/dfa_to_regex.hpp"
#include "strconf/logic.hpp"
#include "strconf/mdfa.hpp"
#include "strconf/problem.hpp"
#include "strconf/reach.hpp"

namespace strconf {

/// Accepts user letters followed by at most one EOL: the shape of every legal value.
inline Dfa well_formed_dfa(const AlphabetPtr& alphabet) {
    Dfa d(alphabet);
    State open = d.add_state(true), closed = d.add_state(true), sink = d.add_state(false);
    for (Letter l = 0; l < d.width(); ++l) {
        d.set(open, l, alphabet->is_eol(l) ? closed : open);
        d.set(closed, l, sink);
    }
    return d;
}

/// The MDFA of variable i over its atoms in block order. With EOL enabled, states
/// only reachable through an ill-formed word carry the dead marker.
inline Mdfa variable_mdfa(const Problem& p, std::size_t i) {
    std::vector<Dfa> dfas;
    for (auto a : p.atoms_of(i)) dfas.push_back(p.atoms()[a].dfa);
    const bool shaped = p.alphabet()->eol_enabled();
    if (shaped) dfas.push_back(well_formed_dfa(p.alphabet()));
    if (dfas.empty()) return trivial_mdfa(p.alphabet());
    Mdfa m = construct_mdfa(dfas);
    if (shaped) {
        --m.k;
        for (auto& v : m.accept) {
            bool legal = v.bits.back();
            v.bits.pop_back();
            if (!legal) v = AcceptanceValue{{}, true};
        }
    }
    return m;
}

/// Per-variable automata of a built problem.
struct VariableModel {
    Mdfa raw;             // as constructed, before pruning
    ReachSets raw_reach;  // R over `raw`
    Mdfa mdfa;            // pruned and minimized
    ReachSets reach;      // R over `mdfa`, restricted to values feasible at build time
};

/// The output of Build: immutable, shared by every session on the problem.
struct CompiledProblem {
    std::shared_ptr<const Problem> problem;
    BlockLayout layout;
    std::vector<VariableModel> vars;
    DdStore store{0};
    DdRef formulas = DdStore::kTrue; // the boolean skeleton alone
    DdRef initial = DdStore::kTrue;  // skeleton plus y^i ∈ R^i(source_i) for every i

    std::size_t num_vars() const { return vars.size(); }
};

/// Builds the per-variable MDFAs, reachable values and initial constraint,
/// then prunes acceptance values that no solution can realize.
inline std::shared_ptr<const CompiledProblem> build(std::shared_ptr<const Problem> p) {
    auto cp = std::make_shared<CompiledProblem>();
    cp->problem = p;
    cp->layout = BlockLayout(*p);
    cp->store = DdStore(cp->layout.total());
    DdStore& store = cp->store;

    DdRef g1 = DdStore::kTrue;
    for (const auto& f : p->formulas()) g1 = store.conjoin(g1, encode_formula(f, *p, cp->layout, store));
    cp->formulas = g1;

    const std::size_t n = p->variables().size();
    cp->vars.resize(n);
    DdRef g = g1;
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = cp->vars[i];
        v.raw = variable_mdfa(*p, i);
        v.raw_reach = compute_reachable_acceptance_values(v.raw);
        g = store.conjoin(g, encode_block_membership(to_block_set(i, v.raw_reach[v.raw.source]), cp->layout, store));
    }
    if (dd_is_unsat(g)) throw InfeasibleProblem();
    cp->initial = g;

    for (std::size_t i = 0; i < n; ++i) {
        auto& v = cp->vars[i];
        auto feasible = dd_project_block(store, g, cp->layout, i);
        auto ok = [&](const AcceptanceValue& a) { return !a.dead && feasible.contains(a.bits); };
        Mdfa pruned = v.raw;
        for (auto& a : pruned.accept)
            if (!ok(a)) a = AcceptanceValue{{}, true};
        auto minimized = minimize_mdfa_mapped(pruned);
        v.mdfa = std::move(minimized.mdfa);
        v.reach.sets.assign(v.mdfa.num_states(), {});
        for (State q = 0; q < v.raw.num_states(); ++q) {
            State t = minimized.state_map[q];
            if (t == UINT32_MAX) continue;
            ValueSet kept;
            for (const auto& a : v.raw_reach[q])
                if (ok(a)) kept.push_back(a);
            v.reach.sets[t] = std::move(kept);
        }
    }
    return cp;
}

inline std::shared_ptr<const CompiledProblem> build(const Problem& p) {
    return build(std::make_shared<const Problem>(p));
}

/// An interactive configuration over one compiled problem. Every public member
/// takes an internal lock, so a Session may be shared between threads.
class Session {
  public:
    explicit Session(std::shared_ptr<const CompiledProblem> cp)
        : cp_(std::move(cp)), store_(cp_->store), g_(cp_->initial) {
        const auto n = cp_->num_vars();
        for (const auto& v : cp_->vars) cursor_.push_back(v.mdfa.source);
        values_.resize(n);
        completed_.assign(n, false);
        domain_cache_.resize(n);
        membership_cache_.resize(n);
    }

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const CompiledProblem& compiled() const { return *cp_; }
    const Problem& problem() const { return *cp_->problem; }
    const AlphabetPtr& alphabet() const { return cp_->problem->alphabet(); }
    std::size_t num_vars() const { return cp_->num_vars(); }
    std::size_t index(std::string_view name) const { return problem().variable_index(name); }

    /// Appends user letters to variable i; throws InvalidAppend and leaves the
    /// session untouched when no solution has the extended value as a prefix.
    void append(std::size_t i, std::string_view text) {
        Word w = alphabet()->encode(text);
        std::lock_guard lock(mu_);
        extend(i, w, false);
    }
    void append(std::string_view var, std::string_view text) { append(index(var), text); }

    void append_letters(std::size_t i, const Word& w) {
        for (Letter l : w)
            if (l >= alphabet()->size() || alphabet()->is_eol(l))
                throw LetterOutsideAlphabet(l < alphabet()->size() ? "$" : "#" + std::to_string(l));
        std::lock_guard lock(mu_);
        extend(i, w, false);
    }

    /// Appends EOL and closes the variable to further letters.
    void complete(std::size_t i) {
        if (!alphabet()->eol_enabled()) throw CompletionDisabled();
        std::lock_guard lock(mu_);
        extend(i, Word{alphabet()->eol()}, true);
    }
    void complete(std::string_view var) { complete(index(var)); }

    void undo() {
        std::lock_guard lock(mu_);
        if (history_.empty()) throw NothingToUndo();
        auto& s = history_.back();
        cursor_ = std::move(s.cursor);
        g_ = s.g;
        values_ = std::move(s.values);
        completed_ = std::move(s.completed);
        history_.pop_back();
        invalidate();
    }

    bool can_undo() const {
        std::lock_guard lock(mu_);
        return !history_.empty();
    }

    /// The valid domain of variable i: suffixes that keep the assignment extensible to a solution.
    Dfa valid_domain(std::size_t i) const {
        std::lock_guard lock(mu_);
        return domain_dfa(i);
    }
    Dfa valid_domain(std::string_view var) const { return valid_domain(index(var)); }

    std::string valid_domain_regex(std::size_t i) const { return dfa_to_regex(valid_domain(i)); }
    std::string valid_domain_regex(std::string_view var) const { return valid_domain_regex(index(var)); }

    /// User letters that can be appended to variable i right now.
    std::vector<Letter> next_letters(std::size_t i) const {
        Dfa d = valid_domain(i);
        auto live = co_reachable(d);
        std::vector<Letter> out;
        for (Letter l = 0; l < alphabet()->user_size(); ++l)
            if (live[d.step(d.source, l)]) out.push_back(l);
        return out;
    }

    bool can_complete(std::size_t i) const {
        if (!alphabet()->eol_enabled()) return false;
        Dfa d = valid_domain(i);
        return co_reachable(d)[d.step(d.source, alphabet()->eol())];
    }

    /// Up to k words of the valid domain, shortest first, ties in alphabet order.
    std::vector<Word> suggestion_words(std::size_t i, std::size_t k, std::size_t max_len) const {
        return shortest_words(minimize_dfa(valid_domain(i)), k, max_len);
    }

    std::vector<std::string> suggestions(std::size_t i, std::size_t k, std::size_t max_len) const {
        std::vector<std::string> out;
        for (const auto& w : suggestion_words(i, k, max_len)) out.push_back(alphabet()->render(w));
        return out;
    }

    const Word& value(std::size_t i) const { return values_.at(i); }
    std::string value_text(std::size_t i) const {
        std::lock_guard lock(mu_);
        return alphabet()->render(values_.at(i));
    }
    bool completed(std::size_t i) const {
        std::lock_guard lock(mu_);
        return completed_.at(i);
    }
    State cursor(std::size_t i) const {
        std::lock_guard lock(mu_);
        return cursor_.at(i);
    }
    DdRef constraint() const {
        std::lock_guard lock(mu_);
        return g_;
    }

    /// V^∅ for variable i's block under the current constraint.
    BlockVectorSet feasible_values(std::size_t i) const {
        std::lock_guard lock(mu_);
        return domain_vectors(i);
    }

    /// k shortest accepted words of d by (length, letter order), each at most max_len long.
    static std::vector<Word> shortest_words(const Dfa& d, std::size_t k, std::size_t max_len) {
        std::vector<Word> out;
        if (k == 0) return out;
        const auto n = d.num_states();
        // reach[r][q]: some word of length exactly r leads from q to acceptance
        std::vector<std::vector<char>> reach(max_len + 1, std::vector<char>(n, 0));
        for (State q = 0; q < n; ++q) reach[0][q] = d.accepting[q];
        for (std::size_t r = 1; r <= max_len; ++r)
            for (State q = 0; q < n; ++q)
                for (Letter l = 0; l < d.width() && !reach[r][q]; ++l) reach[r][q] = reach[r - 1][d.step(q, l)];

        Word w;
        auto walk = [&](auto& self, State q, std::size_t left) -> void {
            if (out.size() >= k) return;
            if (left == 0) {
                out.push_back(w);
                return;
            }
            for (Letter l = 0; l < d.width() && out.size() < k; ++l) {
                State t = d.step(q, l);
                if (!reach[left - 1][t]) continue;
                w.push_back(l);
                self(self, t, left - 1);
                w.pop_back();
            }
        };
        for (std::size_t len = 0; len <= max_len && out.size() < k; ++len)
            if (reach[len][d.source]) walk(walk, d.source, len);
        return out;
    }

  private:
    struct Snapshot {
        std::vector<State> cursor;
        DdRef g;
        std::vector<Word> values;
        std::vector<bool> completed;
    };

    std::shared_ptr<const CompiledProblem> cp_;
    mutable std::mutex mu_;
    mutable DdStore store_;
    DdRef g_;
    std::vector<State> cursor_;
    std::vector<Word> values_;
    std::vector<bool> completed_;
    std::vector<Snapshot> history_;
    mutable std::vector<std::optional<BlockVectorSet>> domain_cache_;
    mutable std::vector<std::map<State, DdRef>> membership_cache_;

    void check_index(std::size_t i) const {
        if (i >= cursor_.size()) throw UnknownVariable("#" + std::to_string(i));
    }

    void invalidate() {
        for (auto& c : domain_cache_) c.reset();
    }

    DdRef membership(std::size_t i, State q) const {
        auto [it, fresh] = membership_cache_[i].emplace(q, DdStore::kFalse);
        if (fresh)
            it->second = encode_block_membership(to_block_set(i, cp_->vars[i].reach[q]), cp_->layout, store_);
        return it->second;
    }

    const BlockVectorSet& domain_vectors(std::size_t i) const {
        check_index(i);
        if (!domain_cache_[i]) domain_cache_[i] = dd_project_block(store_, g_, cp_->layout, i);
        return *domain_cache_[i];
    }

    Dfa domain_dfa(std::size_t i) const {
        const auto& feasible = domain_vectors(i);
        return mdfa_as_dfa(cp_->vars[i].mdfa, cursor_[i],
                           [&](const AcceptanceValue& a) { return !a.dead && feasible.contains(a.bits); });
    }

    void extend(std::size_t i, const Word& w, bool completing) {
        check_index(i);
        if (completed_[i]) throw VariableCompleted(problem().variables()[i]);
        if (w.empty()) throw Error("nothing to append");
        State t = mdfa_step(cp_->vars[i].mdfa, cursor_[i], w);
        DdRef next = store_.conjoin(g_, membership(i, t));
        if (dd_is_unsat(next)) throw InvalidAppend();
        history_.push_back({cursor_, g_, values_, completed_});
        cursor_[i] = t;
        values_[i].insert(values_[i].end(), w.begin(), w.end());
        if (completing) completed_[i] = true;
        if (next != g_) invalidate();
        g_ = next;
    }
};

} // namespace strconf
