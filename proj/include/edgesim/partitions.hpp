#pragma once

#include <cstdint>
#include <vector>

namespace edgesim {

// Enumerates every set partition of `items` in restricted-growth-string
// order (the first partition is the single block {items}, the last is all
// singletons). Blocks are ordered by first occurrence, members keep the
// order of `items`. The visitor returns false to stop early.
template <typename Fn>
void for_each_partition(const std::vector<int>& items, Fn&& fn) {
    const std::size_t n = items.size();
    if (n == 0) return;
    std::vector<int> code(n, 0); // code[i] = block index of items[i]
    std::vector<int> prefix_max(n, 0);

    for (;;) {
        int num_blocks = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (code[i] + 1 > num_blocks) num_blocks = code[i] + 1;
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(num_blocks));
        for (std::size_t i = 0; i < n; ++i)
            blocks[static_cast<std::size_t>(code[i])].push_back(items[i]);
        if (!fn(blocks)) return;

        // next restricted growth string: rightmost position whose code can
        // still grow (code[i] <= max of the prefix)
        std::size_t i = n;
        while (i > 1 && code[i - 1] > prefix_max[i - 1]) --i;
        if (i <= 1) return;
        --i;
        ++code[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            code[j] = 0;
            prefix_max[j] =
                prefix_max[j - 1] > code[j - 1] ? prefix_max[j - 1] : code[j - 1];
        }
    }
}

inline std::uint64_t count_partitions(int n) { // Bell number
    std::vector<std::vector<std::uint64_t>> tri;
    tri.push_back({1});
    for (int row = 1; row < n; ++row) {
        std::vector<std::uint64_t> r;
        r.push_back(tri.back().back());
        for (std::uint64_t v : tri.back()) r.push_back(r.back() + v);
        tri.push_back(std::move(r));
    }
    return tri.back().back();
}

} // namespace edgesim
