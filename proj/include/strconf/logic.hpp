#pragma once

#include <cstdint>
#include <vector>

#include "strconf/dd.hpp"
#include "strconf/problem.hpp"
#include "strconf/reach.hpp"

namespace strconf {

/// y^i_j: the boolean stand-in for atom j of string variable i.
struct BooleanVar {
    std::size_t var_index = 0;
    std::size_t atom_index = 0;
    std::uint32_t ordinal = 0;
};

/// Decision-diagram variable order: one contiguous block per string variable,
/// blocks in declaration order, atoms within a block in formula order.
class BlockLayout {
  public:
    BlockLayout() = default;
    explicit BlockLayout(std::vector<std::size_t> widths) : width_(std::move(widths)) {
        std::uint32_t next = 0;
        for (auto w : width_) {
            first_.push_back(next);
            next += static_cast<std::uint32_t>(w);
        }
        total_ = next;
    }
    explicit BlockLayout(const Problem& p) : BlockLayout(widths_of(p)) {}

    std::size_t num_blocks() const { return width_.size(); }
    std::uint32_t total() const { return total_; }
    std::uint32_t first(std::size_t i) const { return first_.at(i); }
    std::size_t width(std::size_t i) const { return width_.at(i); }

    BooleanVar var(std::size_t i, std::size_t j) const {
        return {i, j, first(i) + static_cast<std::uint32_t>(j)};
    }

  private:
    std::vector<std::uint32_t> first_;
    std::vector<std::size_t> width_;
    std::uint32_t total_ = 0;

    static std::vector<std::size_t> widths_of(const Problem& p) {
        std::vector<std::size_t> w;
        for (std::size_t i = 0; i < p.variables().size(); ++i) w.push_back(p.atoms_of(i).size());
        return w;
    }
};

/// A set of bit-vectors of one block's width, sorted and duplicate-free.
struct BlockVectorSet {
    std::size_t var_index = 0;
    std::vector<std::vector<bool>> vectors;

    bool contains(const std::vector<bool>& v) const {
        return std::binary_search(vectors.begin(), vectors.end(), v);
    }
    friend bool operator==(const BlockVectorSet&, const BlockVectorSet&) = default;
};

/// The block vectors of the non-dead values in `values`.
inline BlockVectorSet to_block_set(std::size_t var_index, const ValueSet& values) {
    BlockVectorSet b{var_index, {}};
    for (const auto& v : values)
        if (!v.dead) b.vectors.push_back(v.bits);
    std::sort(b.vectors.begin(), b.vectors.end());
    b.vectors.erase(std::unique(b.vectors.begin(), b.vectors.end()), b.vectors.end());
    return b;
}

/// The formula with every match atom replaced by its y-variable.
inline DdRef encode_formula(const Formula& f, const Problem& p, const BlockLayout& layout, DdStore& store) {
    using K = Formula::Kind;
    switch (f.kind) {
    case K::Match: {
        const Atom& a = p.atoms()[f.atom];
        return store.literal(layout.var(a.variable, a.index_in_variable).ordinal);
    }
    case K::Not:
        return store.negate(encode_formula(f.children[0], p, layout, store));
    default:
        break;
    }
    DdRef a = encode_formula(f.children[0], p, layout, store);
    DdRef b = encode_formula(f.children[1], p, layout, store);
    switch (f.kind) {
    case K::Or:
        return store.disjoin(a, b);
    case K::And:
        return store.conjoin(a, b);
    case K::Implies:
        return store.implies(a, b);
    default:
        return store.equivalent(a, b);
    }
}

inline DdRef dd_conjoin(DdStore& store, DdRef a, DdRef b) { return store.conjoin(a, b); }

inline bool dd_is_unsat(DdRef a) { return a == DdStore::kFalse; }

/// y^i ∈ B, as the disjunction over b ∈ B of the cube y^i = b.
inline DdRef encode_block_membership(const BlockVectorSet& b, const BlockLayout& layout, DdStore& store) {
    const auto first = layout.first(b.var_index);
    DdRef out = DdStore::kFalse;
    for (const auto& v : b.vectors) {
        DdRef cube = DdStore::kTrue;
        for (std::size_t j = v.size(); j-- > 0;)
            cube = v[j] ? store.make(first + static_cast<std::uint32_t>(j), DdStore::kFalse, cube)
                        : store.make(first + static_cast<std::uint32_t>(j), cube, DdStore::kFalse);
        out = store.disjoin(out, cube);
    }
    return out;
}

/// {b | some solution of g gives y^i the value b}.
inline BlockVectorSet dd_project_block(DdStore& store, DdRef g, const BlockLayout& layout, std::size_t i) {
    const std::uint32_t first = layout.first(i);
    const std::uint32_t last = first + static_cast<std::uint32_t>(layout.width(i));
    DdRef q = store.exists_outside(g, first, last);

    BlockVectorSet out{i, {}};
    std::vector<bool> bits(layout.width(i));
    // minterms in increasing order: low branch first
    auto walk = [&](auto& self, DdRef node, std::uint32_t level) -> void {
        if (node == DdStore::kFalse) return;
        if (level == last) {
            out.vectors.push_back(bits);
            return;
        }
        bool decides = !store.is_terminal(node) && store.var(node) == level;
        bits[level - first] = false;
        self(self, decides ? store.low(node) : node, level + 1);
        bits[level - first] = true;
        self(self, decides ? store.high(node) : node, level + 1);
    };
    walk(walk, q, first);
    return out;
}

} // namespace strconf
