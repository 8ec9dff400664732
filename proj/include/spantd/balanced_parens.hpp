#pragma once

#include <algorithm>
#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/common.hpp"

namespace spantd {

// Balanced parenthesis sequence over a bit string: 1 = '(' and 0 = ')'.
// Supports matching-parenthesis queries via per-block excess summaries
// (block = 512 bits): a query scans inside its own block and then hops
// across whole blocks using (total, minimum) excess until the answer's
// block is found. Positions are 1-indexed.
class BalParen {
public:
    BalParen() = default;
    explicit BalParen(u64 n, BitBudget* budget = nullptr, const char* tag = "parens")
        : bits_(n, budget, tag) {}

    u64 size() const { return bits_.size(); }
    bool get(u64 i) const { return bits_.get(i); }
    void set(u64 i, bool open) {
        bits_.set(i, open);
        dirty_ = true;
    }

    // Position of the ')' matching the '(' at i.
    u64 findclose(u64 i) const {
        if (!bits_.get(i)) fail("findclose on a closing parenthesis");
        ensure_dir();
        i64 depth = 0;
        u64 n = bits_.size();
        // Finish the current block by direct scan.
        u64 block_end = std::min(n, ((i - 1) / kBlock + 1) * kBlock);
        for (u64 j = i; j <= block_end; ++j) {
            depth += bits_.get(j) ? 1 : -1;
            if (depth == 0) return j;
        }
        // Hop blocks: the answer lies in the first block whose minimum
        // running excess dips to -depth or lower.
        u64 b = (i - 1) / kBlock + 1;
        while (true) {
            if (b >= tot_.size()) fail("unmatched opening parenthesis");
            if (depth + min_[b] <= 0) break;
            depth += tot_[b];
            ++b;
        }
        u64 start = b * kBlock + 1, stop = std::min(n, (b + 1) * kBlock);
        for (u64 j = start; j <= stop; ++j) {
            depth += bits_.get(j) ? 1 : -1;
            if (depth == 0) return j;
        }
        fail("unmatched opening parenthesis");
    }

    // Position of the '(' matching the ')' at i.
    u64 findopen(u64 i) const {
        if (bits_.get(i)) fail("findopen on an opening parenthesis");
        ensure_dir();
        i64 depth = 0;
        u64 block_start = ((i - 1) / kBlock) * kBlock + 1;
        for (u64 j = i; j >= block_start; --j) {
            depth += bits_.get(j) ? -1 : 1;
            if (depth == 0) return j;
            if (j == 1) fail("unmatched closing parenthesis");
        }
        // Hop blocks leftward. Scanning block b right-to-left, the running
        // excess (opens count -1, closes +1) reaches zero somewhere inside
        // iff depth - (tot_[b] - min-prefix-excess) hits 0; the reachable
        // minimum of depth - tot_[b] + prefix_excess over prefixes is
        // depth - tot_[b] + min_[b].
        u64 b = (block_start - 1) / kBlock;
        while (true) {
            if (b == 0) fail("unmatched closing parenthesis");
            --b;
            if (depth - tot_[b] + min_[b] <= 0) break;
            depth -= tot_[b];
        }
        u64 start = b * kBlock + 1, stop = (b + 1) * kBlock;
        for (u64 j = stop;; --j) {
            depth += bits_.get(j) ? -1 : 1;
            if (depth == 0) return j;
            if (j == start) fail("unmatched closing parenthesis");
        }
    }

    // Excess (#open - #close) over positions 1..i.
    i64 excess(u64 i) const {
        i64 e = 0;
        for (u64 j = 1; j <= i; ++j) e += bits_.get(j) ? 1 : -1;
        return e;
    }

    u64 alloc_bits() const { return bits_.alloc_bits() + tot_.size() * 64 * 2; }

private:
    static constexpr u64 kBlock = 512;

    void ensure_dir() const {
        if (!dirty_ && !tot_.empty()) return;
        u64 nblocks = (bits_.size() + kBlock - 1) / kBlock;
        if (nblocks == 0) nblocks = 1;
        tot_.assign(nblocks, 0);
        min_.assign(nblocks, 0);
        for (u64 b = 0; b < nblocks; ++b) {
            i64 e = 0, mn = 0;
            u64 start = b * kBlock + 1, stop = std::min(bits_.size(), (b + 1) * kBlock);
            for (u64 j = start; j <= stop; ++j) {
                e += bits_.get(j) ? 1 : -1;
                mn = std::min(mn, e);
            }
            tot_[b] = e;
            min_[b] = mn;
        }
        dirty_ = false;
    }

    BitVec bits_;
    mutable std::vector<i64> tot_;
    mutable std::vector<i64> min_;
    mutable bool dirty_ = true;
};

}  // namespace spantd
