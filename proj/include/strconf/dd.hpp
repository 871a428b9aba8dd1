#pragma once

#include <cassert>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace strconf {

/// Handle to a node of a DdStore. Only meaningful together with its store.
struct DdRef {
    std::uint32_t id = 0;
    friend auto operator<=>(DdRef, DdRef) = default;
};

/// Reduced ordered binary decision diagrams over variables 0..num_vars-1
/// (smaller ordinals nearer the root), hash-consed so that equal functions
/// share one handle. Single writer: callers serialize access.
class DdStore {
  public:
    static constexpr DdRef kFalse{0};
    static constexpr DdRef kTrue{1};

    explicit DdStore(std::size_t num_vars) : num_vars_(num_vars) {
        nodes_.push_back({kTerminalVar, 0, 0});
        nodes_.push_back({kTerminalVar, 1, 1});
    }

    std::size_t num_vars() const noexcept { return num_vars_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    bool is_terminal(DdRef r) const { return r.id < 2; }
    std::uint32_t var(DdRef r) const { return nodes_[r.id].var; }
    DdRef low(DdRef r) const { return DdRef{nodes_[r.id].lo}; }
    DdRef high(DdRef r) const { return DdRef{nodes_[r.id].hi}; }

    /// The unique node (v ? hi : lo); collapses when both children agree.
    DdRef make(std::uint32_t v, DdRef lo, DdRef hi) {
        assert(v < num_vars_);
        if (lo == hi) return lo;
        assert(is_terminal(lo) || var(lo) > v);
        assert(is_terminal(hi) || var(hi) > v);
        std::uint64_t key = (static_cast<std::uint64_t>(lo.id) << 32) | hi.id;
        auto& table = unique_[v];
        auto [it, fresh] = table.emplace(key, static_cast<std::uint32_t>(nodes_.size()));
        if (fresh) nodes_.push_back({v, lo.id, hi.id});
        return DdRef{it->second};
    }

    DdRef literal(std::uint32_t v, bool positive = true) {
        return positive ? make(v, kFalse, kTrue) : make(v, kTrue, kFalse);
    }

    DdRef conjoin(DdRef a, DdRef b) { return apply(Op::And, a, b); }
    DdRef disjoin(DdRef a, DdRef b) { return apply(Op::Or, a, b); }
    DdRef exclusive_or(DdRef a, DdRef b) { return apply(Op::Xor, a, b); }
    DdRef negate(DdRef a) { return apply(Op::Xor, a, kTrue); }
    DdRef implies(DdRef a, DdRef b) { return disjoin(negate(a), b); }
    DdRef equivalent(DdRef a, DdRef b) { return negate(exclusive_or(a, b)); }

    /// Existentially quantifies every variable outside [first, last).
    DdRef exists_outside(DdRef a, std::uint32_t first, std::uint32_t last) {
        if (is_terminal(a)) return a;
        auto key = std::tuple{a.id, first, last};
        if (auto it = quant_cache_.find(key); it != quant_cache_.end()) return DdRef{it->second};
        std::uint32_t v = var(a);
        DdRef lo = exists_outside(low(a), first, last);
        DdRef hi = exists_outside(high(a), first, last);
        DdRef r = (v >= first && v < last) ? make(v, lo, hi) : disjoin(lo, hi);
        quant_cache_.emplace(key, r.id);
        return r;
    }

    /// Truth value under a complete assignment.
    bool eval(DdRef a, std::span<const bool> assignment) const {
        while (!is_terminal(a)) a = assignment[var(a)] ? high(a) : low(a);
        return a == kTrue;
    }
    bool eval(DdRef a, const std::vector<bool>& assignment) const {
        while (!is_terminal(a)) a = assignment[var(a)] ? high(a) : low(a);
        return a == kTrue;
    }

    /// Number of satisfying assignments over all num_vars() variables.
    double sat_count(DdRef a) const {
        std::unordered_map<std::uint32_t, double> memo;
        return sat_fraction(a, memo) * std::pow(2.0, static_cast<double>(num_vars_));
    }

    /// Nodes reachable from a, terminals included.
    std::size_t node_count(DdRef a) const {
        std::vector<std::uint32_t> stack{a.id};
        std::unordered_map<std::uint32_t, bool> seen{{a.id, true}};
        while (!stack.empty()) {
            auto id = stack.back();
            stack.pop_back();
            if (id < 2) continue;
            for (auto c : {nodes_[id].lo, nodes_[id].hi})
                if (seen.emplace(c, true).second) stack.push_back(c);
        }
        return seen.size();
    }

  private:
    enum class Op : std::uint8_t { And, Or, Xor };
    static constexpr std::uint32_t kTerminalVar = UINT32_MAX;

    struct Node {
        std::uint32_t var, lo, hi;
    };

    std::size_t num_vars_;
    std::vector<Node> nodes_;
    std::unordered_map<std::uint32_t, std::unordered_map<std::uint64_t, std::uint32_t>> unique_;
    std::unordered_map<std::uint64_t, std::uint32_t> cache_;
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint32_t> quant_cache_;

    std::uint32_t top_var(DdRef r) const { return is_terminal(r) ? kTerminalVar : var(r); }

    DdRef apply(Op op, DdRef a, DdRef b) {
        switch (op) {
        case Op::And:
            if (a == kFalse || b == kFalse) return kFalse;
            if (a == kTrue) return b;
            if (b == kTrue || a == b) return a;
            break;
        case Op::Or:
            if (a == kTrue || b == kTrue) return kTrue;
            if (a == kFalse) return b;
            if (b == kFalse || a == b) return a;
            break;
        case Op::Xor:
            if (a == b) return kFalse;
            if (a == kFalse) return b;
            if (b == kFalse) return a;
            if (is_terminal(a) && is_terminal(b)) return a == b ? kFalse : kTrue;
            break;
        }
        if (a.id > b.id) std::swap(a, b); // all three ops commute
        // exact key: ids are below 2^31 at desk scale, op occupies the top bits
        std::uint64_t key = (static_cast<std::uint64_t>(op) << 62) | (static_cast<std::uint64_t>(a.id) << 31) | b.id;
        if (auto it = cache_.find(key); it != cache_.end()) return DdRef{it->second};

        std::uint32_t v = std::min(top_var(a), top_var(b));
        DdRef a0 = top_var(a) == v ? low(a) : a, a1 = top_var(a) == v ? high(a) : a;
        DdRef b0 = top_var(b) == v ? low(b) : b, b1 = top_var(b) == v ? high(b) : b;
        DdRef r = make(v, apply(op, a0, b0), apply(op, a1, b1));
        cache_.emplace(key, r.id);
        return r;
    }

    double sat_fraction(DdRef a, std::unordered_map<std::uint32_t, double>& memo) const {
        if (a == kFalse) return 0.0;
        if (a == kTrue) return 1.0;
        if (auto it = memo.find(a.id); it != memo.end()) return it->second;
        double f = 0.5 * sat_fraction(low(a), memo) + 0.5 * sat_fraction(high(a), memo);
        memo.emplace(a.id, f);
        return f;
    }
};

} // namespace strconf
