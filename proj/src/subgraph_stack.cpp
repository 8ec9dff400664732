#include <algorithm>

#include "spantd/subgraph_stack.hpp"

namespace spantd {

// ---------- plain subgraph stack ----------

struct SubgraphStack::LevelView final : GraphView {
    const SubgraphStack* s;
    u32 level;
    LevelView(const SubgraphStack* s_, u32 level_) : s(s_), level(level_) {}
    u32 n() const override { return s->n_at(level); }
    u32 deg(u32 v) const override { return s->deg_at(level, v); }
    u32 head(u32 v, u32 j) const override { return s->head_at(level, v, j); }
};

SubgraphStack::SubgraphStack(const Graph& g, BitBudget* budget) : g0_(&g), budget_(budget) {}

SubgraphStack::~SubgraphStack() = default;

u32 SubgraphStack::n_at(u32 level) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    return level == 0 ? g0_->n() : levels_[level - 1].nv;
}

u64 SubgraphStack::m_at(u32 level) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    return level == 0 ? g0_->m() : levels_[level - 1].na / 2;
}

const GraphView& SubgraphStack::at(u32 level) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    if (level == 0) return *g0_;
    return *levels_[level - 1].view;
}

std::pair<u64, u64> SubgraphStack::slice(u32 level, u32 v) const {
    if (level == 0) {
        u32 d = g0_->deg(v);
        if (d == 0) return {1, 0};
        u64 lo = g0_->arc_index(v, 1);
        return {lo, lo + d - 1};
    }
    const Level& L = levels_[level - 1];
    if (L.tuned) return {L.t_off[v] + 1, L.t_off[v + 1]};
    chain_ops_ += 1;
    u32 pv = static_cast<u32>(L.verts.select(v));
    auto [plo, phi] = slice(level - 1, pv);
    if (plo > phi) return {1, 0};
    chain_ops_ += 2;
    u64 lo = L.arcs.rank(plo - 1) + 1;
    u64 hi = L.arcs.rank(phi);
    if (lo > hi) return {1, 0};
    return {lo, hi};
}

u32 SubgraphStack::deg_at(u32 level, u32 v) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    SPANTD_CHECK(v >= 1 && v <= n_at(level), "vertex out of range");
    if (level == 0) return g0_->deg(v);
    const Level& L = levels_[level - 1];
    if (L.tuned) return static_cast<u32>(L.t_off[v + 1] - L.t_off[v]);
    auto [lo, hi] = slice(level, v);
    return lo > hi ? 0 : static_cast<u32>(hi - lo + 1);
}

u32 SubgraphStack::head_at(u32 level, u32 v, u32 j) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    if (level == 0) return g0_->head(v, j);
    const Level& L = levels_[level - 1];
    SPANTD_CHECK(j >= 1 && j <= deg_at(level, v), "adjacency index out of range");
    if (L.tuned) return L.t_heads[L.t_off[v] + j - 1];
    auto [lo, hi] = slice(level, v);
    (void)hi;
    u64 p = lo + j - 1;
    for (u32 lvl = level; lvl >= 1; --lvl) {
        p = levels_[lvl - 1].arcs.select(p);
        chain_ops_ += 1;
    }
    u32 w = g0_->arc_head(p);
    for (u32 lvl = 1; lvl <= level; ++lvl) {
        SPANTD_CHECK(levels_[lvl - 1].verts.get(w), "arc head escapes the subgraph");
        w = static_cast<u32>(levels_[lvl - 1].verts.rank(w));
        chain_ops_ += 1;
    }
    return w;
}

void SubgraphStack::push(const BitVec& keep_vertices, const BitVec& keep_arcs) {
    u32 pn = top_n();
    u64 pa = 2 * top_m();
    SPANTD_CHECK(keep_vertices.size() == pn, "vertex mask size mismatch");
    SPANTD_CHECK(keep_arcs.size() == pa, "arc mask size mismatch");

    Level L;
    L.verts = BitVec(pn, budget_, "substack");
    L.arcs = BitVec(pa, budget_, "substack");
    for (u32 v = 1; v <= pn; ++v)
        if (keep_vertices.get(v)) L.verts.set(v);
    for (u64 a = 1; a <= pa; ++a)
        if (keep_arcs.get(a)) L.arcs.set(a);
    L.nv = static_cast<u32>(L.verts.count());
    L.na = L.arcs.count();
    SPANTD_CHECK(L.na % 2 == 0, "kept arcs must pair up");

    // Kept arcs must join kept vertices: walk the parent's slices.
    u32 lvl = depth();
    for (u32 v = 1; v <= pn; ++v) {
        auto [lo, hi] = slice(lvl, v);
        if (lo > hi) continue;
        u32 d = static_cast<u32>(hi - lo + 1);
        for (u32 j = 1; j <= d; ++j) {
            if (!keep_arcs.get(lo + j - 1)) continue;
            SPANTD_CHECK(keep_vertices.get(v), "kept arc at a dropped tail");
            SPANTD_CHECK(keep_vertices.get(head_at(lvl, v, j)), "kept arc to a dropped head");
        }
    }

    L.view = std::make_unique<LevelView>(this, depth() + 1);
    levels_.push_back(std::move(L));
}

void SubgraphStack::push_induced(const BitVec& keep_vertices) {
    u32 pn = top_n();
    SPANTD_CHECK(keep_vertices.size() == pn, "vertex mask size mismatch");
    u32 lvl = depth();
    BitVec arcs(2 * top_m());
    u64 pos = 0;
    for (u32 v = 1; v <= pn; ++v) {
        u32 d = deg_at(lvl, v);
        for (u32 j = 1; j <= d; ++j) {
            ++pos;
            if (keep_vertices.get(v) && keep_vertices.get(head_at(lvl, v, j))) arcs.set(pos);
        }
    }
    SPANTD_CHECK(pos == 2 * top_m(), "arc walk out of sync");
    push(keep_vertices, arcs);
}

void SubgraphStack::pop() {
    SPANTD_CHECK(!levels_.empty(), "pop on empty stack");
    levels_.pop_back();
}

bool SubgraphStack::top_tuned() const {
    return levels_.empty() ? true : levels_.back().tuned;
}

void SubgraphStack::toptune() {
    if (levels_.empty()) return;
    Level& L = levels_.back();
    if (L.tuned) return;
    u32 lvl = depth();
    L.t_off.assign(L.nv + 2, 0);
    L.t_heads.assign(L.na, 0);
    u64 pos = 0;
    for (u32 v = 1; v <= L.nv; ++v) {
        L.t_off[v] = pos;
        u32 d = deg_at(lvl, v);
        for (u32 j = 1; j <= d; ++j) L.t_heads[pos++] = head_at(lvl, v, j);
    }
    SPANTD_CHECK(pos == L.na, "tuned arc walk out of sync");
    L.t_off[L.nv + 1] = pos;
    L.tuned = true;
    L.t_lease = BudgetLease(budget_, "substack_tuned",
                            64 * L.t_off.size() + 32 * L.t_heads.size());
}

u32 SubgraphStack::name_down(u32 level, u32 v) const {
    for (u32 lvl = level; lvl >= 1; --lvl) v = static_cast<u32>(levels_[lvl - 1].verts.select(v));
    return v;
}

u32 SubgraphStack::name_up(u32 level, u32 orig) const {
    u32 v = orig;
    for (u32 lvl = 1; lvl <= level; ++lvl) {
        if (!levels_[lvl - 1].verts.get(v)) return 0;
        v = static_cast<u32>(levels_[lvl - 1].verts.rank(v));
    }
    return v;
}

u32 SubgraphStack::orig_of(u32 v) const { return name_down(depth(), v); }
u32 SubgraphStack::top_of(u32 orig) const { return name_up(depth(), orig); }

// ---------- minimal subgraph stack ----------

struct MinimalSubgraphStack::MLevelView final : GraphView {
    const MinimalSubgraphStack* s;
    u32 level;
    MLevelView(const MinimalSubgraphStack* s_, u32 level_) : s(s_), level(level_) {}
    u32 n() const override { return s->n_at(level); }
    u32 deg(u32 v) const override { return s->deg_at(level, v); }
    u32 head(u32 v, u32 j) const override { return s->head_at(level, v, j); }
    bool restricted(u32 v) const override { return s->incomplete_at(level, v); }
    u64 adjfirst(u32 v) const override { return s->list_first(level, v); }
    u32 adjhead(u32 v, u64 cur) const override { return s->list_head(level, v, cur); }
    u64 adjnext(u32 v, u64 cur) const override { return s->list_next(level, v, cur); }
};

MinimalSubgraphStack::MinimalSubgraphStack(const Graph& g, u32 max_incomplete,
                                           BitBudget* budget)
    : g0_(&g), budget_(budget), max_incomplete_(max_incomplete) {}

MinimalSubgraphStack::~MinimalSubgraphStack() = default;

u32 MinimalSubgraphStack::n_at(u32 level) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    return level == 0 ? g0_->n() : levels_[level - 1].nv;
}

const GraphView& MinimalSubgraphStack::at(u32 level) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    if (level == 0) return *g0_;
    return *levels_[level - 1].view;
}

bool MinimalSubgraphStack::incomplete_at(u32 level, u32 v) const {
    if (level == 0) return false;
    return levels_[level - 1].inc_marks.get(v);
}

const std::vector<u32>& MinimalSubgraphStack::incomplete_list() const {
    return levels_.empty() ? empty_ : levels_.back().inc;
}

u32 MinimalSubgraphStack::name_down(u32 level, u32 v) const {
    for (u32 lvl = level; lvl >= 1; --lvl) v = static_cast<u32>(levels_[lvl - 1].verts.select(v));
    return v;
}

u32 MinimalSubgraphStack::name_up(u32 level, u32 orig) const {
    u32 v = orig;
    for (u32 lvl = 1; lvl <= level; ++lvl) {
        if (!levels_[lvl - 1].verts.get(v)) return 0;
        v = static_cast<u32>(levels_[lvl - 1].verts.rank(v));
    }
    return v;
}

u32 MinimalSubgraphStack::orig_of(u32 v) const { return name_down(depth(), v); }
u32 MinimalSubgraphStack::top_of(u32 orig) const { return name_up(depth(), orig); }

u32 MinimalSubgraphStack::deg_at(u32 level, u32 v) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    if (level == 0) return g0_->deg(v);
    SPANTD_CHECK(!incomplete_at(level, v), "array access to an incomplete vertex");
    return g0_->deg(name_down(level, v));
}

u32 MinimalSubgraphStack::head_at(u32 level, u32 v, u32 j) const {
    SPANTD_CHECK(level <= depth(), "level out of range");
    if (level == 0) return g0_->head(v, j);
    SPANTD_CHECK(!incomplete_at(level, v), "array access to an incomplete vertex");
    u32 w0 = g0_->head(name_down(level, v), j);
    u32 w = name_up(level, w0);
    SPANTD_CHECK(w != 0, "complete vertex lost a neighbor");
    return w;
}

u32 MinimalSubgraphStack::inc_row(u32 level, u32 v) const {
    const auto& inc = levels_[level - 1].inc;
    auto it = std::lower_bound(inc.begin(), inc.end(), v);
    if (it == inc.end() || *it != v) return UINT32_MAX;
    return static_cast<u32>(it - inc.begin());
}

namespace {
constexpr u64 kPhaseComplete = u64(1) << 63;
constexpr u64 kPhaseMatrix = u64(1) << 62;
}  // namespace

u64 MinimalSubgraphStack::advance_complete_scan(u32 level, u32 v_orig, u32 u, u32 j) const {
    u32 nv = n_at(level);
    for (; u <= nv; ++u, j = 1) {
        if (incomplete_at(level, u)) continue;
        u32 uo = name_down(level, u);
        u32 d = g0_->deg(uo);
        for (; j <= d; ++j)
            if (g0_->head(uo, j) == v_orig)
                return kPhaseComplete | (u64(u) << 31) | j;
    }
    return 0;
}

u64 MinimalSubgraphStack::advance_matrix_scan(u32 level, u32 v, u32 idx) const {
    const MLevel& L = levels_[level - 1];
    u32 row = inc_row(level, v);
    u32 r = static_cast<u32>(L.inc.size());
    for (; idx < r; ++idx)
        if (L.M.get(u64(row) * r + idx + 1)) return kPhaseMatrix | (idx + 1);
    return 0;
}

u64 MinimalSubgraphStack::list_first(u32 level, u32 v) const {
    if (level == 0 || !incomplete_at(level, v)) {
        return deg_at(level, v) ? 1 : 0;
    }
    u64 cur = advance_complete_scan(level, name_down(level, v), 1, 1);
    if (cur) return cur;
    return advance_matrix_scan(level, v, 0);
}

u32 MinimalSubgraphStack::list_head(u32 level, u32 v, u64 cur) const {
    if (level == 0 || !incomplete_at(level, v))
        return head_at(level, v, static_cast<u32>(cur));
    if (cur & kPhaseComplete) return static_cast<u32>((cur >> 31) & 0x7fffffffu);
    SPANTD_CHECK(cur & kPhaseMatrix, "bad cursor");
    u32 idx = static_cast<u32>(cur & 0xffffffffu) - 1;
    return levels_[level - 1].inc[idx];
}

u64 MinimalSubgraphStack::list_next(u32 level, u32 v, u64 cur) const {
    if (level == 0 || !incomplete_at(level, v))
        return cur < deg_at(level, v) ? cur + 1 : 0;
    if (cur & kPhaseComplete) {
        u32 u = static_cast<u32>((cur >> 31) & 0x7fffffffu);
        u32 j = static_cast<u32>(cur & 0x7fffffffu);
        u64 nxt = advance_complete_scan(level, name_down(level, v), u, j + 1);
        if (nxt) return nxt;
        return advance_matrix_scan(level, v, 0);
    }
    SPANTD_CHECK(cur & kPhaseMatrix, "bad cursor");
    u32 idx = static_cast<u32>(cur & 0xffffffffu) - 1;
    return advance_matrix_scan(level, v, idx + 1);
}

void MinimalSubgraphStack::minimal_push(const BitVec& keep_vertices,
                                        const BitVec& new_incomplete) {
    u32 pn = top_n();
    u32 plevel = depth();
    SPANTD_CHECK(keep_vertices.size() == pn, "vertex mask size mismatch");
    SPANTD_CHECK(new_incomplete.size() == pn, "incomplete mask size mismatch");

    MLevel L;
    L.verts = BitVec(pn, budget_, "minstack");
    for (u32 v = 1; v <= pn; ++v)
        if (keep_vertices.get(v)) L.verts.set(v);
    L.nv = static_cast<u32>(L.verts.count());
    L.inc_marks = BitVec(L.nv, budget_, "minstack");

    for (u32 v = 1; v <= pn; ++v) {
        if (!new_incomplete.get(v)) continue;
        SPANTD_CHECK(keep_vertices.get(v), "incomplete vertex not kept");
        u32 child = static_cast<u32>(L.verts.rank(v));
        L.inc.push_back(child);
        L.inc_marks.set(child);
    }
    SPANTD_CHECK(L.inc.size() <= max_incomplete_, "too many incomplete vertices");
    // Every inherited incomplete vertex that survives must be declared.
    if (plevel > 0)
        for (u32 pv : levels_[plevel - 1].inc)
            if (keep_vertices.get(pv))
                SPANTD_CHECK(new_incomplete.get(pv), "inherited incomplete vertex undeclared");

    u32 r = static_cast<u32>(L.inc.size());
    L.M = BitVec(std::max<u64>(1, u64(r) * r), budget_, "minstack");
    L.lease = BudgetLease(budget_, "minstack", 32 * L.inc.size());

    // Fill M. Edges with at least one endpoint complete in the parent are
    // found by scanning that endpoint's parent adjacency; edges between
    // two parent-incomplete vertices come from the parent's matrix.
    auto child_inc_row = [&](u32 child) -> u32 {
        auto it = std::lower_bound(L.inc.begin(), L.inc.end(), child);
        if (it == L.inc.end() || *it != child) return UINT32_MAX;
        return static_cast<u32>(it - L.inc.begin());
    };
    for (u32 a = 0; a < r; ++a) {
        u32 child = L.inc[a];
        u32 parent = static_cast<u32>(L.verts.select(child));
        if (incomplete_at(plevel, parent)) continue;  // handled below
        u32 po = plevel == 0 ? parent : name_down(plevel, parent);
        u32 d = g0_->deg(po);
        for (u32 j = 1; j <= d; ++j) {
            u32 h0 = g0_->head(po, j);
            u32 hp = plevel == 0 ? h0 : name_up(plevel, h0);
            if (hp == 0 || !keep_vertices.get(hp)) continue;
            u32 hc = static_cast<u32>(L.verts.rank(hp));
            u32 b = child_inc_row(hc);
            if (b == UINT32_MAX) continue;
            L.M.set(u64(a) * r + b + 1);
            L.M.set(u64(b) * r + a + 1);
        }
    }
    if (plevel > 0) {
        const MLevel& P = levels_[plevel - 1];
        u32 pr = static_cast<u32>(P.inc.size());
        for (u32 pa = 0; pa < pr; ++pa)
            for (u32 pb = pa + 1; pb < pr; ++pb) {
                if (!P.M.get(u64(pa) * pr + pb + 1)) continue;
                u32 va = P.inc[pa], vb = P.inc[pb];
                if (!keep_vertices.get(va) || !keep_vertices.get(vb)) continue;
                u32 a = child_inc_row(static_cast<u32>(L.verts.rank(va)));
                u32 b = child_inc_row(static_cast<u32>(L.verts.rank(vb)));
                SPANTD_CHECK(a != UINT32_MAX && b != UINT32_MAX,
                             "inherited incomplete edge between undeclared vertices");
                L.M.set(u64(a) * r + b + 1);
                L.M.set(u64(b) * r + a + 1);
            }
    }

    L.view = std::make_unique<MLevelView>(this, depth() + 1);
    levels_.push_back(std::move(L));

    // Contract check: a vertex left complete must really keep its degree,
    // i.e. all parent neighbors survived. Scan complete vertices once.
    u32 lvl = depth();
    for (u32 v = 1; v <= levels_.back().nv; ++v) {
        if (incomplete_at(lvl, v)) continue;
        u32 vo = name_down(lvl, v);
        u32 d = g0_->deg(vo);
        for (u32 j = 1; j <= d; ++j)
            SPANTD_CHECK(name_up(lvl, g0_->head(vo, j)) != 0,
                         "complete vertex lost a neighbor in minimal push");
    }
}

void MinimalSubgraphStack::pop() {
    SPANTD_CHECK(!levels_.empty(), "pop on empty stack");
    levels_.pop_back();
}

u64 MinimalSubgraphStack::alloc_bits() const {
    u64 bits = 0;
    for (const auto& L : levels_)
        bits += L.verts.alloc_bits() + L.inc_marks.alloc_bits() + L.M.alloc_bits() +
                32 * L.inc.size();
    return bits;
}

}  // namespace spantd
