#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace vfckit::detail {

// (p,q)-shuffles as 0/1 words (0 = advance in the first factor); the sign is
// the parity of the number of inversions against the word 0^p 1^q.
inline void shuffles(std::size_t p, std::size_t q,
                     std::vector<std::pair<std::vector<int>, int>>& out) {
    std::vector<int> word(p + q, 0);
    for (std::size_t i = p; i < p + q; ++i) word[i] = 1;
    std::sort(word.begin(), word.end());
    do {
        int inv = 0;
        std::size_t zeros_seen = 0;
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (word[i] == 0)
                ++zeros_seen;
            else
                inv += int(p - zeros_seen);
        }
        out.push_back({word, inv % 2 == 0 ? 1 : -1});
    } while (std::next_permutation(word.begin(), word.end()));
}

}  // namespace vfckit::detail
