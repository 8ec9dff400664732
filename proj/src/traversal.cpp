#include <algorithm>
#include <bit>

#include "spantd/balanced_parens.hpp"
#include "spantd/traversal.hpp"

namespace spantd {

namespace {

constexpr u8 kWhite = 0;
constexpr u8 kGray = 1;
constexpr u8 kBlack = 2;

// Packed 2-bit-per-vertex color array, 1-indexed.
class ColorArray {
public:
    ColorArray(u32 n, BitBudget* budget, const char* tag) : words_((u64(n) + 31) / 32, 0) {
        lease_ = BudgetLease(budget, tag, 64 * words_.size());
    }
    u8 get(u32 v) const { return (words_[(v - 1) / 32] >> (2 * ((v - 1) % 32))) & 3; }
    void set(u32 v, u8 c) {
        u64& w = words_[(v - 1) / 32];
        u32 sh = 2 * ((v - 1) % 32);
        w = (w & ~(u64(3) << sh)) | (u64(c) << sh);
    }

private:
    std::vector<u64> words_;
    BudgetLease lease_;
};

struct Entry {
    u32 v;
    u64 cur;  // 0 = iteration not started; else current cursor
};

// DFS keeping a window of the topmost stack entries. When the window
// overflows, the lower half is discarded; when it empties with entries
// logically below, the gray path from the current root is walked to
// rebuild the deepest surviving entries. Restoration relies on the gray
// vertices forming exactly the root-to-top path: a gray neighbor already
// seen by the walk is an ancestor, so the unique unseen gray neighbor is
// the path child.
class DfsEngine {
public:
    DfsEngine(const GraphView& g, const DfsCallbacks& cb, BitBudget* budget, u32 cap,
              TraversalStats* stats)
        : g_(g),
          cb_(cb),
          stats_(stats),
          color_(g.n(), budget, "trav_color"),
          cap_(cap),
          walk_seen_(g.n(), budget, "trav_walk") {
        if (cap_ == 0) {
            u32 n = std::max<u32>(g_.n(), 2);
            cap_ = std::max<u32>(2, n / std::bit_width(n));
        }
        win_.reserve(2 * size_t(cap_));
        win_lease_ = BudgetLease(budget, "trav_stack", u64(2) * cap_ * 96);
        if (stats_) {
            stats_->list_starts.assign(g_.n() + 1, 0);
            stats_->restored_hits.assign(g_.n() + 1, 0);
            stats_->restorations = 0;
        }
    }

    bool visited(u32 v) const { return color_.get(v) != kWhite; }

    void run(u32 root) {
        SPANTD_CHECK(root >= 1 && root <= g_.n(), "root out of range");
        if (visited(root)) return;
        root_ = root;
        discover(root);
        while (!win_.empty()) {
            Entry& e = win_.back();
            u64 nx = e.cur == 0 ? first(e.v) : g_.adjnext(e.v, e.cur);
            if (nx == 0) {
                u32 v = e.v;
                win_.pop_back();
                color_.set(v, kBlack);
                if (cb_.postorder) cb_.postorder(v);
                if (win_.empty() && below_ > 0) restore(v);
                if (!win_.empty() && cb_.backtrack) cb_.backtrack(win_.back().v, v);
            } else {
                e.cur = nx;
                u32 w = g_.adjhead(e.v, nx);
                if (color_.get(w) == kWhite) discover(w);
            }
        }
        SPANTD_CHECK(below_ == 0, "stack accounting out of sync");
    }

private:
    u64 first(u32 v) {
        if (stats_) stats_->list_starts[v] += 1;
        return g_.adjfirst(v);
    }

    void discover(u32 w) {
        color_.set(w, kGray);
        if (cb_.preorder) cb_.preorder(w);
        if (win_.size() == 2 * size_t(cap_)) {
            win_.erase(win_.begin(), win_.begin() + cap_);
            below_ += cap_;
        }
        win_.push_back({w, 0});
    }

    void restore(u32 finished) {
        if (stats_) stats_->restorations += 1;
        u64 want = std::min<u64>(cap_, below_);
        std::vector<Entry> ring(want);
        std::vector<u32> marked;
        u64 cnt = 0;
        u32 v = root_;
        while (true) {
            walk_seen_.set(v);
            marked.push_back(v);
            if (stats_) stats_->restored_hits[v] += 1;
            u32 child = 0;
            u64 child_cur = 0;
            for (u64 c = first(v); c != 0; c = g_.adjnext(v, c)) {
                u32 h = g_.adjhead(v, c);
                if (color_.get(h) == kGray && !walk_seen_.get(h)) {
                    child = h;
                    child_cur = c;
                    break;
                }
            }
            if (child == 0) {
                // Deepest gray vertex: the parent of the vertex that just
                // finished; resume its scan at that child's position.
                u64 c = first(v);
                while (c != 0 && g_.adjhead(v, c) != finished) c = g_.adjnext(v, c);
                SPANTD_CHECK(c != 0, "finished child missing from parent adjacency");
                ring[cnt % want] = {v, c};
                ++cnt;
                break;
            }
            ring[cnt % want] = {v, child_cur};
            ++cnt;
            v = child;
        }
        SPANTD_CHECK(cnt == below_, "restoration walk out of sync");
        u64 take = std::min<u64>(want, cnt);
        for (u64 idx = cnt - take; idx < cnt; ++idx) win_.push_back(ring[idx % want]);
        below_ -= take;
        for (u32 u : marked) walk_seen_.set(u, false);
    }

    const GraphView& g_;
    const DfsCallbacks& cb_;
    TraversalStats* stats_;
    ColorArray color_;
    u32 cap_;
    std::vector<Entry> win_;
    u64 below_ = 0;
    u32 root_ = 0;
    BitVec walk_seen_;
    BudgetLease win_lease_;
};

}  // namespace

void bfs(const GraphView& g, const std::vector<u32>& roots, const BitVec* skip,
         const std::function<void(u32, u32)>& visit, BitBudget* budget) {
    u32 n = g.n();
    ColorArray color(n, budget, "trav_color");
    u64 cur_cnt = 0;
    for (u32 r : roots) {
        SPANTD_CHECK(r >= 1 && r <= n, "root out of range");
        SPANTD_CHECK(skip == nullptr || !skip->get(r), "root inside the skip set");
        if (color.get(r) == kWhite) {
            color.set(r, 1);
            ++cur_cnt;
        }
    }
    u32 dist = 0;
    u8 cur_code = 1, next_code = 2;
    while (cur_cnt > 0) {
        u64 next_cnt = 0;
        for (u32 v = 1; v <= n; ++v) {
            if (color.get(v) != cur_code) continue;
            visit(v, dist);
            for (u64 c = g.adjfirst(v); c != 0; c = g.adjnext(v, c)) {
                u32 w = g.adjhead(v, c);
                if (skip != nullptr && skip->get(w)) continue;
                if (color.get(w) == kWhite) {
                    color.set(w, next_code);
                    ++next_cnt;
                }
            }
            color.set(v, 3);
        }
        std::swap(cur_code, next_code);
        cur_cnt = next_cnt;
        ++dist;
    }
}

void dfs(const GraphView& g, u32 root, const DfsCallbacks& cb, BitBudget* budget,
         u32 segment_capacity, TraversalStats* stats) {
    DfsEngine engine(g, cb, budget, segment_capacity, stats);
    engine.run(root);
}

void dfs_forest(const GraphView& g, const DfsCallbacks& cb, BitBudget* budget,
                u32 segment_capacity, TraversalStats* stats) {
    DfsEngine engine(g, cb, budget, segment_capacity, stats);
    for (u32 v = 1; v <= g.n(); ++v) engine.run(v);
}

void dfs_restricted(const GraphView& g, u32 root, const DfsCallbacks& cb, BitBudget* budget,
                    u32 segment_capacity, TraversalStats* stats) {
    dfs(g, root, cb, budget, segment_capacity, stats);
}

BitVec compute_R(const GraphView& g, u64 threshold, BitBudget* budget) {
    SPANTD_CHECK(threshold >= 1, "threshold must be positive");
    u32 n = g.n();
    BitVec result(n, budget, "trav_R");
    if (n == 0) return result;

    // Pass 1: image the DFS forest as balanced parentheses (1 = open).
    BalParen parens(2 * u64(n), budget, "trav_bp");
    u64 pos = 0;
    DfsCallbacks emit;
    emit.preorder = [&](u32) { parens.set(++pos, true); };
    emit.postorder = [&](u32) { parens.set(++pos, false); };
    dfs_forest(g, emit, budget);
    SPANTD_CHECK(pos == 2 * u64(n), "parenthesis image incomplete");

    // Pass 2: bottom-up counts in a 2n-bit scratch array. Each subtree
    // stores its running count x as 1^x 0 starting at its open position;
    // a count that would exceed the threshold marks the open position and
    // resets to zero.
    BitVec counts(2 * u64(n), budget, "trav_counts");
    BitVec chosen(2 * u64(n), budget, "trav_chosen");
    u64 total = 2 * u64(n);
    u64 i = 1;
    while (i <= total) {
        if (parens.get(i)) {
            // Scan forward for the first leaf, which always exists below
            // an open parenthesis.
            while (!(parens.get(i) && !parens.get(i + 1))) ++i;
            counts.set(i, true);
            counts.set(i + 1, false);
            i += 2;
        } else {
            u64 j = parens.findopen(i);
            u64 x = 0;
            u64 p = j + 1;
            while (p < i) {
                u64 xc = 0;
                while (counts.get(p + xc)) ++xc;
                x += xc;
                p = parens.findclose(p) + 1;
            }
            u64 val = x + 1;
            if (val > threshold) {
                counts.set(j, false);
                chosen.set(j, true);
            } else {
                for (u64 q = 0; q < val; ++q) counts.set(j + q, true);
                counts.set(j + val, false);
            }
            i += 1;
        }
    }

    // Pass 3: the identical DFS translates marked open positions back to
    // vertex ids.
    u64 pos2 = 0;
    DfsCallbacks mark;
    mark.preorder = [&](u32 v) {
        ++pos2;
        if (chosen.get(pos2)) result.set(v);
    };
    mark.postorder = [&](u32) { ++pos2; };
    dfs_forest(g, mark, budget);
    return result;
}

}  // namespace spantd
