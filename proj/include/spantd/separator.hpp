#pragma once

#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/graph.hpp"

namespace spantd {

// One three-way split of a terminal set: the two sides get contracted into
// virtual flow endpoints, the third part is forced into the separator.
struct XSplit {
    std::vector<u32> x1, x2, xs;
};

// Admissible splits of a vertex set in ternary-counter order. Member i of
// the ascending set carries digit weight 3^i; digit 0 sends it to x1,
// digit 1 to x2, digit 2 to xs. Admissible means |xs| <= k and
// |x1|, |x2| <= max(k, ceil(2|set|/3)). The enumerator walks the counter
// digits most-significant first and prunes whole ranges whose digit prefix
// cannot be completed within the caps, so next() stays cheap while the
// yield order equals the filtered counter order.
class SplitEnumerator {
public:
    SplitEnumerator(std::vector<u32> set, u32 k);

    // Writes the next admissible split and returns true, or returns false
    // once the counter is exhausted.
    bool next(XSplit& out);

private:
    bool feasible(u32 pos, u8 d) const;
    void undo(u8 d);

    std::vector<u32> set_;   // ascending; index = digit rank, least significant first
    std::vector<u8> digit_;  // committed digits, ranks pos_..p-1
    u32 k_ = 0;
    u32 cap12_ = 0;          // cap on |x1| and |x2|
    u32 count_[3] = {0, 0, 0};
    u32 pos_ = 0;            // committed ranks are pos_..p-1
    u8 trial_ = 0;           // next digit value to try at rank pos_-1
    bool at_leaf_ = false;
    bool exhausted_ = false;
};

struct SeparatorResult {
    bool found = false;
    std::vector<u32> s;    // ascending original ids
    u32 cut_size = 0;      // |s| minus the xs part of the accepted split
    u64 splits_tried = 0;  // candidates that reached the flow stage
};

// Searches for a set S of at most k+1 vertices whose removal leaves no
// component with more than floor(2|X|/3) vertices of X. Each candidate
// split (x1, x2, xs) is tested by contracting x1 and x2 into virtual
// endpoints s' and t' on a view without xs, asking the flow engine for a
// cut of at most k+1-|xs| vertices, and taking S = cut + xs. The first
// candidate whose S passes the component check wins. The candidate order
// is deterministic: sets of up to 9 terminals walk the admissible splits
// in plain ternary-counter order (exhaustively); larger sets first try
// two-sided candidates from terminal pairs ordered farthest-first, then
// fall back to the full counter, which keeps the search complete without
// the counter's exponential run of one-sided splits up front. An empty X
// accepts the all-empty split with S = {} immediately. found == false is
// evidence that the treewidth exceeds k. With jobs > 1, candidates are
// evaluated in parallel batches but acceptance still goes to the earliest
// candidate in stream order, so the result matches the sequential run.
SeparatorResult x_separator(const GraphView& g, const std::vector<u32>& X, u32 k,
                            BitBudget* budget = nullptr, u32 jobs = 1);

struct BalancedSeparatorResult {
    bool found = false;
    std::vector<u32> s;      // ascending original ids, |s| <= 2k+2
    u32 s1_size = 0;         // terminal-side part
    u32 s2_size = 0;         // evenly-spread-side part (0 when skipped)
    bool used_r_part = false;
    u64 splits_tried = 0;
};

// Balanced variant: S1 = x_separator(g, X, k); if some component of
// G - S1 still has more than ceil(2n/3) vertices, an evenly spread vertex
// set R (descendant-count resets at threshold ceil(n/(8k+6)), so
// |R| <= 8k+6) is split with the same machinery, accepting the first S2
// with every component of G - (S1 + S2) holding at most floor(2|R|/3)
// vertices of R and at most ceil(2n/3) vertices total. The union S1 + S2
// has at most 2k+2 vertices, keeps the X balance of S1 (components only
// shrink), and is vertex-balanced by the acceptance check itself.
BalancedSeparatorResult balanced_x_separator(const GraphView& g, const std::vector<u32>& X,
                                             u32 k, BitBudget* budget = nullptr, u32 jobs = 1);

}  // namespace spantd
