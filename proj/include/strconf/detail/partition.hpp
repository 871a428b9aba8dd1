#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace strconf::detail {

/// Hopcroft partition refinement over a total transition table.
///
/// `delta[q * width + c]` is the successor of q on letter c. `labels[q]` is the
/// initial class of q (acceptance bit or acceptance value id). Returns the final
/// block id of every state; two states share a block iff no word separates them.
inline std::vector<std::uint32_t> refine_partition(std::size_t num_states, std::size_t width,
                                                   std::span<const std::uint32_t> delta,
                                                   std::span<const std::uint32_t> labels) {
    const std::size_t n = num_states;
    std::vector<std::uint32_t> block_of(n);
    if (n == 0) return block_of;

    // Inverse transitions in CSR form: for letter c, predecessors of t are
    // inv_src[inv_start[c*(n+1)+t] .. inv_start[c*(n+1)+t+1]).
    std::vector<std::uint32_t> inv_start(width * (n + 1), 0);
    std::vector<std::uint32_t> inv_src(n * width);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t c = 0; c < width; ++c) ++inv_start[c * (n + 1) + delta[q * width + c] + 1];
    for (std::size_t c = 0; c < width; ++c) {
        std::uint32_t base = static_cast<std::uint32_t>(c * n);
        auto* row = &inv_start[c * (n + 1)];
        row[0] = base;
        for (std::size_t t = 1; t <= n; ++t) row[t] += row[t - 1];
    }
    {
        std::vector<std::uint32_t> fill(inv_start);
        for (std::size_t q = 0; q < n; ++q)
            for (std::size_t c = 0; c < width; ++c) {
                auto t = delta[q * width + c];
                inv_src[fill[c * (n + 1) + t]++] = static_cast<std::uint32_t>(q);
            }
    }

    // Blocks are contiguous ranges of `elems`; `pos` locates a state in `elems`.
    std::vector<std::uint32_t> elems(n), pos(n);
    std::vector<std::uint32_t> first, end, marked;
    {
        std::uint32_t max_label = 0;
        for (auto l : labels) max_label = std::max(max_label, l);
        std::vector<std::uint32_t> count(max_label + 2, 0);
        for (auto l : labels) ++count[l + 1];
        for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
        std::vector<std::uint32_t> label_block(max_label + 1, UINT32_MAX);
        std::vector<std::uint32_t> cursor(count.begin(), count.end() - 1);
        for (std::size_t q = 0; q < n; ++q) {
            auto l = labels[q];
            if (label_block[l] == UINT32_MAX) {
                label_block[l] = static_cast<std::uint32_t>(first.size());
                first.push_back(count[l]);
                end.push_back(count[l + 1]);
                marked.push_back(0);
            }
            block_of[q] = label_block[l];
            pos[q] = cursor[l];
            elems[cursor[l]++] = static_cast<std::uint32_t>(q);
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> work;
    std::vector<char> in_work;
    auto enqueue = [&](std::uint32_t b, std::size_t c) {
        if (in_work.size() < (b + 1) * width) in_work.resize((b + 1) * width, 0);
        if (!in_work[b * width + c]) {
            in_work[b * width + c] = 1;
            work.emplace_back(b, static_cast<std::uint32_t>(c));
        }
    };
    for (std::uint32_t b = 0; b < first.size(); ++b)
        for (std::size_t c = 0; c < width; ++c) enqueue(b, c);

    std::vector<std::uint32_t> splitter, touched;
    while (!work.empty()) {
        auto [b, c] = work.back();
        work.pop_back();
        in_work[b * width + c] = 0;

        splitter.assign(elems.begin() + first[b], elems.begin() + end[b]);
        touched.clear();
        for (auto t : splitter) {
            const auto* row = &inv_start[c * (n + 1)];
            for (auto i = row[t]; i < row[t + 1]; ++i) {
                auto q = inv_src[i];
                auto qb = block_of[q];
                auto mpos = first[qb] + marked[qb];
                if (pos[q] < mpos) continue; // already marked
                if (marked[qb] == 0) touched.push_back(qb);
                // swap q into the marked prefix of its block
                auto other = elems[mpos];
                std::swap(elems[pos[q]], elems[mpos]);
                pos[other] = pos[q];
                pos[q] = mpos;
                ++marked[qb];
            }
        }
        for (auto qb : touched) {
            auto size = end[qb] - first[qb];
            auto m = marked[qb];
            marked[qb] = 0;
            if (m == size) continue;
            // marked prefix becomes a new block
            auto nb = static_cast<std::uint32_t>(first.size());
            first.push_back(first[qb]);
            end.push_back(first[qb] + m);
            marked.push_back(0);
            first[qb] += m;
            for (auto i = first[nb]; i < end[nb]; ++i) block_of[elems[i]] = nb;
            for (std::size_t a = 0; a < width; ++a) {
                bool old_queued = in_work.size() >= (qb + 1) * width && in_work[qb * width + a];
                if (old_queued || m <= size - m)
                    enqueue(nb, a);
                else
                    enqueue(qb, a);
            }
        }
    }
    return block_of;
}

} // namespace strconf::detail
