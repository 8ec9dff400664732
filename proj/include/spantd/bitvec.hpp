#pragma once

#include <algorithm>
#include <bit>
#include <vector>

#include "spantd/budget.hpp"
#include "spantd/common.hpp"

namespace spantd {

// Fixed-length bit vector over positions 1..n with two-level rank/select
// directories: one cumulative counter per 512-bit superblock plus one 16-bit
// offset per 64-bit word. Directories rebuild lazily after mutation; when no
// mutation happens the structure is immutable and shareable across threads.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(u64 n, BitBudget* budget = nullptr, const char* tag = "bitvec")
        : n_(n), words_((n + 63) / 64, 0) {
        lease_ = BudgetLease(budget, tag, alloc_bits());
    }

    u64 size() const { return n_; }

    bool get(u64 i) const {
        check_pos(i);
        return (words_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1;
    }

    void set(u64 i, bool v = true) {
        check_pos(i);
        u64 mask = u64(1) << ((i - 1) & 63);
        u64& w = words_[(i - 1) >> 6];
        bool old = w & mask;
        if (old == v) return;
        if (v)
            w |= mask;
        else
            w &= ~mask;
        dirty_ = true;
    }

    void clear_all() {
        std::fill(words_.begin(), words_.end(), 0);
        dirty_ = true;
    }

    void fill_all() {
        std::fill(words_.begin(), words_.end(), ~u64(0));
        if (n_ & 63) words_.back() &= (u64(1) << (n_ & 63)) - 1;
        dirty_ = true;
    }

    // Number of set bits in positions [1..i]; rank(0) = 0.
    u64 rank(u64 i) const {
        if (i > n_) fail("rank index out of range");
        if (i == 0) return 0;
        ensure_dir();
        u64 w = (i - 1) >> 6;
        u64 r = super_[w >> 3] + word_off_[w];
        u64 rem = (i - 1) & 63;
        u64 mask = (rem == 63) ? ~u64(0) : ((u64(1) << (rem + 1)) - 1);
        return r + std::popcount(words_[w] & mask);
    }

    // Position of the j-th set bit, 1 <= j <= count().
    u64 select(u64 j) const {
        ensure_dir();
        if (j == 0 || j > total_) fail("select ordinal exceeds popcount");
        // Binary search superblocks, then scan words within one superblock.
        u64 lo = 0, hi = super_.size() - 1;
        while (lo < hi) {
            u64 mid = (lo + hi + 1) / 2;
            if (super_[mid] < j)
                lo = mid;
            else
                hi = mid - 1;
        }
        u64 rem = j - super_[lo];
        u64 w = lo << 3;
        u64 wend = std::min<u64>(w + 8, words_.size());
        while (w + 1 < wend && u64(word_off_[w + 1]) < rem) ++w;
        rem -= word_off_[w];
        u64 word = words_[w];
        for (u64 b = 0;; ++b) {
            if (word & 1) {
                if (--rem == 0) return (w << 6) + b + 1;
            }
            word >>= 1;
        }
    }

    u64 count() const {
        ensure_dir();
        return total_;
    }

    // Smallest set position >= i, or 0 when none exists.
    u64 next_set(u64 i) const {
        if (i == 0) i = 1;
        if (i > n_) return 0;
        u64 w = (i - 1) >> 6;
        u64 word = words_[w] >> ((i - 1) & 63);
        if (word) return i + std::countr_zero(word);
        for (++w; w < words_.size(); ++w)
            if (words_[w]) return (w << 6) + std::countr_zero(words_[w]) + 1;
        return 0;
    }

    u64 alloc_bits() const {
        u64 dir = std::max<u64>(1, (words_.size() + 7) / 8) * 32 + words_.size() * 16;
        return words_.size() * 64 + dir;
    }

private:
    void check_pos(u64 i) const {
        if (i == 0 || i > n_) fail("bit position out of range");
    }

    void ensure_dir() const {
        if (!dirty_ && !super_.empty()) return;
        if (words_.empty() && super_.empty()) {
            // Zero-length vector still needs a consistent empty directory.
            super_.assign(1, 0);
            total_ = 0;
            dirty_ = false;
            return;
        }
        super_.assign(std::max<u64>(1, (words_.size() + 7) / 8), 0);
        word_off_.assign(words_.size(), 0);
        u64 cum = 0;
        for (u64 w = 0; w < words_.size(); ++w) {
            if ((w & 7) == 0) super_[w >> 3] = cum;
            word_off_[w] = static_cast<u16>(cum - super_[w >> 3]);
            cum += std::popcount(words_[w]);
        }
        total_ = cum;
        dirty_ = false;
    }

    u64 n_ = 0;
    std::vector<u64> words_;
    mutable std::vector<u64> super_;
    mutable std::vector<u16> word_off_;
    mutable u64 total_ = 0;
    mutable bool dirty_ = true;
    BudgetLease lease_;
};

}  // namespace spantd
