#include "spantd/separator.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <optional>
#include <thread>

#include "spantd/common.hpp"
#include "spantd/paths.hpp"
#include "spantd/traversal.hpp"

namespace spantd {

namespace {

constexpr u64 kNoCap = ~0ull;

// Checks every component of g minus the marked vertices against the size
// cap and up to two marked-subset caps; early-exits on the first violation.
bool components_within(const GraphView& g, const BitVec& removed, u64 size_cap,
                       const BitVec* a_marks, u64 a_cap, const BitVec* b_marks, u64 b_cap,
                       BitBudget* budget) {
    const u32 n = g.n();
    BitVec seen(n + 1, budget, "separator/sweep");
    std::vector<u32> stack;
    for (u32 v0 = 1; v0 <= n; ++v0) {
        if (removed.get(v0) || seen.get(v0)) continue;
        u64 size = 0, a = 0, b = 0;
        stack.assign(1, v0);
        seen.set(v0);
        while (!stack.empty()) {
            u32 v = stack.back();
            stack.pop_back();
            ++size;
            if (a_marks && a_marks->get(v)) ++a;
            if (b_marks && b_marks->get(v)) ++b;
            for (u64 cur = g.adjfirst(v); cur; cur = g.adjnext(v, cur)) {
                u32 w = g.adjhead(v, cur);
                if (!removed.get(w) && !seen.get(w)) {
                    seen.set(w);
                    stack.push_back(w);
                }
            }
        }
        if (size > size_cap || a > a_cap || b > b_cap) return false;
    }
    return true;
}

using AcceptFn = std::function<bool(const BitVec& marks, BitBudget* budget)>;

// Flow view of one split: survivors keep ascending order as local ids
// 1..nh, then s' = nh+1 stands for the contracted x1 and t' = nh+2 for x2.
struct SplitView {
    Graph h;
    u32 sprime = 0, tprime = 0;
    std::vector<u32> orig;  // local survivor id -> original id
};

u64 graph_bits(const Graph& h) {
    return (h.n() + 2) * 64ull + h.m() * 2 * (32ull + 64ull);
}

// Returns nothing when an x1-x2 edge makes the split hopeless: such an edge
// would survive contraction as a direct s'-t' edge no vertex cut breaks.
std::optional<SplitView> build_split_view(const GraphView& g, const XSplit& sp) {
    const u32 n = g.n();
    std::vector<u8> role(n + 1, 0);  // 1 -> s', 2 -> t', 3 -> dropped
    for (u32 v : sp.x1) role[v] = 1;
    for (u32 v : sp.x2) role[v] = 2;
    for (u32 v : sp.xs) role[v] = 3;
    for (u32 v : sp.x1)
        for (u64 cur = g.adjfirst(v); cur; cur = g.adjnext(v, cur))
            if (role[g.adjhead(v, cur)] == 2) return std::nullopt;

    SplitView out;
    std::vector<u32> local(n + 1, 0);
    for (u32 v = 1; v <= n; ++v)
        if (!role[v]) {
            out.orig.push_back(v);
            local[v] = static_cast<u32>(out.orig.size());
        }
    const u32 nh = static_cast<u32>(out.orig.size());
    out.sprime = nh + 1;
    out.tprime = nh + 2;

    std::vector<u8> term(n + 1, 0);  // bit 0: edge to s', bit 1: edge to t'
    for (u32 v : sp.x1)
        for (u64 cur = g.adjfirst(v); cur; cur = g.adjnext(v, cur)) {
            u32 w = g.adjhead(v, cur);
            if (!role[w]) term[w] |= 1;
        }
    for (u32 v : sp.x2)
        for (u64 cur = g.adjfirst(v); cur; cur = g.adjnext(v, cur)) {
            u32 w = g.adjhead(v, cur);
            if (!role[w]) term[w] |= 2;
        }

    std::vector<std::pair<u32, u32>> edges;
    for (u32 i = 1; i <= nh; ++i) {
        u32 v = out.orig[i - 1];
        for (u64 cur = g.adjfirst(v); cur; cur = g.adjnext(v, cur)) {
            u32 w = g.adjhead(v, cur);
            if (!role[w] && w > v) edges.emplace_back(i, local[w]);
        }
        if (term[v] & 1) edges.emplace_back(i, out.sprime);
        if (term[v] & 2) edges.emplace_back(i, out.tprime);
    }
    out.h = Graph(nh + 2, edges);
    return out;
}

// Tests one split: build the contracted view, ask the flow engine for a cut
// of at most k+1-|xs| vertices, lift it back and union with xs, then apply
// the caller's component acceptance. Nothing on rejection.
std::optional<std::vector<u32>> eval_split(const GraphView& g, const XSplit& sp, u32 k,
                                           const AcceptFn& accept, BitBudget* budget) {
    auto view = build_split_view(g, sp);
    if (!view) return std::nullopt;
    BudgetLease view_lease(budget, "separator/view", graph_bits(view->h));
    const u32 cap = k + 1 - static_cast<u32>(sp.xs.size());
    std::vector<u32> cut;
    try {
        cut = st_separator(view->h, view->sprime, view->tprime, cap, budget);
    } catch (const TreewidthExceeded&) {
        return std::nullopt;  // this split needs a larger cut; try the next
    }
    std::vector<u32> s = sp.xs;
    for (u32 c : cut) s.push_back(view->orig[c - 1]);
    std::sort(s.begin(), s.end());
    BitVec marks(g.n() + 1, budget, "separator/marks");
    for (u32 v : s) marks.set(v);
    if (!accept(marks, budget)) return std::nullopt;
    return s;
}

struct CoreResult {
    bool found = false;
    std::vector<u32> sep;
    u32 cut = 0;
    u64 tried = 0;
};

// Pulls one candidate; false once the stream is exhausted.
using CandidateStream = std::function<bool(XSplit&)>;

// First candidate in stream order whose lifted cut passes `accept` wins.
// With jobs > 1 candidates are evaluated in parallel batches without budget
// accounting; the earliest winner is then replayed against the budget, so
// output and accounting match the sequential run.
void run_stream(const GraphView& g, const CandidateStream& next_candidate, u32 k,
                const AcceptFn& accept, BitBudget* budget, u32 jobs, CoreResult& res) {
    XSplit sp;
    if (jobs <= 1) {
        while (next_candidate(sp)) {
            ++res.tried;
            auto s = eval_split(g, sp, k, accept, budget);
            if (s) {
                res.found = true;
                res.cut = static_cast<u32>(s->size() - sp.xs.size());
                res.sep = std::move(*s);
                return;
            }
        }
        return;
    }
    std::vector<XSplit> batch;
    while (true) {
        batch.clear();
        while (batch.size() < jobs && next_candidate(sp)) batch.push_back(sp);
        if (batch.empty()) return;
        std::vector<std::optional<std::vector<u32>>> got(batch.size());
        std::vector<std::thread> pool;
        for (size_t i = 1; i < batch.size(); ++i)
            pool.emplace_back([&, i] { got[i] = eval_split(g, batch[i], k, accept, nullptr); });
        got[0] = eval_split(g, batch[0], k, accept, nullptr);
        for (auto& th : pool) th.join();
        for (size_t i = 0; i < batch.size(); ++i) {
            if (!got[i]) continue;
            res.tried += i + 1;
            auto s = eval_split(g, batch[i], k, accept, budget);
            SPANTD_CHECK(s.has_value(), "parallel winner must replay identically");
            res.found = true;
            res.cut = static_cast<u32>(s->size() - batch[i].xs.size());
            res.sep = std::move(*s);
            return;
        }
        res.tried += batch.size();
    }
}

// Above this size the plain counter order fronts an exponential run of
// hopeless one-sided splits, so large sets get a guided phase first.
constexpr u32 kCounterOnlyMax = 9;

// Ordered terminal pairs (a, b), farthest apart first: each becomes the
// two-sided candidate x1={a}, x2={b} whose cut the flow engine localizes
// around a. Unreachable pairs sort first (their cut is empty), adjacent
// pairs are dropped. Distance, then lexicographic order keeps the stream
// deterministic.
std::vector<XSplit> pair_candidates(const GraphView& g, const std::vector<u32>& set,
                                    BitBudget* budget) {
    const u32 n = g.n();
    struct Pair {
        u64 rank;
        u32 a, b;
    };
    std::vector<Pair> pairs;
    for (u32 a : set) {
        std::vector<u32> dist(n + 1, ~0u);
        bfs(g, {a}, nullptr, [&](u32 v, u32 d) { dist[v] = d; }, budget);
        for (u32 b : set) {
            if (b == a || dist[b] == 1) continue;
            pairs.push_back({~0ull - dist[b], a, b});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
        return l.rank != r.rank ? l.rank > r.rank
                                : (l.a != r.a ? l.a < r.a : l.b < r.b);
    });
    std::vector<XSplit> out;
    out.reserve(pairs.size());
    for (const Pair& pr : pairs) out.push_back(XSplit{{pr.a}, {pr.b}, {}});
    return out;
}

// Candidate order: sets of at most kCounterOnlyMax terminals walk the plain
// ternary counter, which is exhaustive. Larger sets first try the guided
// pair candidates, then fall back to the full counter, so the search stays
// complete while typical instances accept within the cheap phase.
CoreResult split_search(const GraphView& g, std::vector<u32> set, u32 k, const AcceptFn& accept,
                        BitBudget* budget, u32 jobs) {
    CoreResult res;
    if (set.size() > kCounterOnlyMax) {
        std::vector<XSplit> guided = pair_candidates(g, set, budget);
        size_t at = 0;
        run_stream(
            g, [&](XSplit& sp) { return at < guided.size() ? (sp = guided[at++], true) : false; },
            k, accept, budget, jobs, res);
        if (res.found) return res;
    }
    SplitEnumerator en(std::move(set), k);
    run_stream(
        g, [&](XSplit& sp) { return en.next(sp); }, k, accept, budget, jobs, res);
    return res;
}

}  // namespace

SplitEnumerator::SplitEnumerator(std::vector<u32> set, u32 k) : set_(std::move(set)), k_(k) {
    std::sort(set_.begin(), set_.end());
    const u32 p = static_cast<u32>(set_.size());
    cap12_ = std::max(k_, (2 * p + 2) / 3);
    digit_.assign(p, 0);
    pos_ = p;  // committed ranks are pos_..p-1; nothing yet
    trial_ = 0;
}

bool SplitEnumerator::feasible(u32 rank, u8 d) const {
    u32 c[3] = {count_[0], count_[1], count_[2]};
    ++c[d];
    if (c[2] > k_ || c[0] > cap12_ || c[1] > cap12_) return false;
    // ranks rank-1..0 still need homes within the caps
    u64 slack = (cap12_ - c[0]) + static_cast<u64>(cap12_ - c[1]) + (k_ - c[2]);
    return slack >= rank;
}

void SplitEnumerator::undo(u8 d) { --count_[d]; }

bool SplitEnumerator::next(XSplit& out) {
    if (exhausted_) return false;
    const u32 p = static_cast<u32>(set_.size());
    if (p == 0) {  // the one split of the empty set
        exhausted_ = true;
        out = XSplit{};
        return true;
    }
    if (at_leaf_) {  // step off the previously yielded assignment
        at_leaf_ = false;
        u8 d = digit_[0];
        undo(d);
        trial_ = d + 1;
        pos_ = 1;
    }
    while (true) {
        if (trial_ > 2) {  // digits at rank pos_-1 exhausted; un-commit pos_
            if (pos_ == p) {
                exhausted_ = true;
                return false;
            }
            u8 d = digit_[pos_];
            undo(d);
            trial_ = d + 1;
            ++pos_;
            continue;
        }
        const u32 rank = pos_ - 1;
        if (!feasible(rank, trial_)) {
            ++trial_;
            continue;
        }
        digit_[rank] = trial_;
        ++count_[trial_];
        --pos_;
        trial_ = 0;
        if (pos_ == 0) {
            out.x1.clear();
            out.x2.clear();
            out.xs.clear();
            for (u32 i = 0; i < p; ++i) {
                if (digit_[i] == 0)
                    out.x1.push_back(set_[i]);
                else if (digit_[i] == 1)
                    out.x2.push_back(set_[i]);
                else
                    out.xs.push_back(set_[i]);
            }
            at_leaf_ = true;
            return true;
        }
    }
}

SeparatorResult x_separator(const GraphView& g, const std::vector<u32>& X, u32 k,
                            BitBudget* budget, u32 jobs) {
    SPANTD_CHECK(k >= 1, "separator parameter must be positive");
    const u32 n = g.n();
    std::vector<u32> set = X;
    std::sort(set.begin(), set.end());
    SPANTD_CHECK(std::adjacent_find(set.begin(), set.end()) == set.end(),
                 "terminal set has duplicates");
    for (u32 v : set) SPANTD_CHECK(v >= 1 && v <= n, "terminal out of range");
    SPANTD_CHECK(set.size() <= 6ull * k + 6, "terminal set exceeds the split budget");

    BitVec xmarks(n + 1, budget, "separator/terminals");
    for (u32 v : set) xmarks.set(v);
    const u64 xcap = (2 * set.size()) / 3;
    AcceptFn accept = [&](const BitVec& marks, BitBudget* b) {
        return components_within(g, marks, kNoCap, &xmarks, xcap, nullptr, kNoCap, b);
    };
    CoreResult core = split_search(g, set, k, accept, budget, jobs);

    SeparatorResult res;
    res.found = core.found;
    res.s = std::move(core.sep);
    res.cut_size = core.cut;
    res.splits_tried = core.tried;
    assert(!res.found || res.s.size() <= static_cast<size_t>(k) + 1);
    return res;
}

BalancedSeparatorResult balanced_x_separator(const GraphView& g, const std::vector<u32>& X,
                                             u32 k, BitBudget* budget, u32 jobs) {
    BalancedSeparatorResult out;
    SeparatorResult s1 = x_separator(g, X, k, budget, jobs);
    out.splits_tried = s1.splits_tried;
    if (!s1.found) return out;
    out.s1_size = static_cast<u32>(s1.s.size());

    const u32 n = g.n();
    const u64 vcap = (2ull * n + 2) / 3;
    BitVec s1marks(n + 1, budget, "separator/marks");
    for (u32 v : s1.s) s1marks.set(v);
    if (components_within(g, s1marks, vcap, nullptr, kNoCap, nullptr, kNoCap, budget)) {
        out.found = true;
        out.s = std::move(s1.s);
    } else {
        out.used_r_part = true;
        const u64 threshold = (n + 8ull * k + 5) / (8ull * k + 6);
        BitVec rbits = compute_R(g, threshold, budget);
        std::vector<u32> rlist;
        for (u32 v = 1; v <= n; ++v)
            if (rbits.get(v)) rlist.push_back(v);
        const u64 rcap = (2 * rlist.size()) / 3;
        AcceptFn accept = [&](const BitVec& s2marks, BitBudget* b) {
            BitVec combined(n + 1, b, "separator/marks");
            for (u32 v = 1; v <= n; ++v)
                if (s1marks.get(v) || s2marks.get(v)) combined.set(v);
            return components_within(g, combined, vcap, &rbits, rcap, nullptr, kNoCap, b);
        };
        CoreResult s2 = split_search(g, rlist, k, accept, budget, jobs);
        out.splits_tried += s2.tried;
        if (!s2.found) return out;
        out.s2_size = static_cast<u32>(s2.sep.size());
        std::vector<u32> merged = std::move(s1.s);
        merged.insert(merged.end(), s2.sep.begin(), s2.sep.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        out.found = true;
        out.s = std::move(merged);
    }

#ifndef NDEBUG
    if (out.found) {  // self-audit: size cap and both balance conditions
        assert(out.s.size() <= 2ull * k + 2);
        BitVec smarks(n + 1);
        for (u32 v : out.s) smarks.set(v);
        BitVec xm(n + 1);
        for (u32 v : X) xm.set(v);
        const u64 xceil = (2ull * X.size() + 2) / 3;
        assert(components_within(g, smarks, vcap, &xm, xceil, nullptr, kNoCap, nullptr));
    }
#endif
    return out;
}

}  // namespace spantd
