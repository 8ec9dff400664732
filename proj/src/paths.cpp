#include "spantd/paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <sstream>
#include <utility>

#include "spantd/traversal.hpp"

namespace spantd {

PathDataScheme rebuild_scheme_impl(ReroutingState& st, bool tolerate_stall);

// ===========================================================================
// Constants
// ===========================================================================

u32 path_stride(u32 k) {
    SPANTD_CHECK(k >= 1, "path bound must be positive");
    u64 c = 0;
    if ((k & (k - 1)) == 0) {
        // k a power of two: k*log2(k) is an exact integer
        c = u64(k) * static_cast<u32>(std::countr_zero(k));
    } else {
        long double v = static_cast<long double>(k) * std::log2(static_cast<long double>(k));
        c = static_cast<u64>(std::ceil(v - 1e-9L));
    }
    return static_cast<u32>(std::max<u64>(2, c));
}

u64 patch_capacity(u32 n, u32 k) {
    SPANTD_CHECK(k >= 1, "path bound must be positive");
    u64 b = static_cast<u64>(std::bit_width(k));  // = ceil(log2(k+1))
    return (u64(n) + b - 1) / b;
}

// ===========================================================================
// Residual split view
// ===========================================================================

u32 ResidualView::deg_out(u32 x) const {
    SPANTD_CHECK(x >= 1 && x <= n(), "split vertex out of range");
    return is_out_copy(x) ? g_->deg(x - g_->n()) : 1;
}

u32 ResidualView::head_out(u32 x, u32 j) const {
    SPANTD_CHECK(j >= 1 && j <= deg_out(x), "arc position out of range");
    return is_out_copy(x) ? g_->head(x - g_->n(), j) : x + g_->n();
}

u32 ResidualView::deg_in(u32 x) const {
    SPANTD_CHECK(x >= 1 && x <= n(), "split vertex out of range");
    return is_out_copy(x) ? 1 : g_->deg(x);
}

u32 ResidualView::head_in(u32 x, u32 j) const {
    SPANTD_CHECK(j >= 1 && j <= deg_in(x), "arc position out of range");
    return is_out_copy(x) ? x - g_->n() : g_->head(x, j) + g_->n();
}

// ===========================================================================
// SinglePath
// ===========================================================================

std::vector<u32> SinglePath::vertices(const Graph& g) const {
    std::vector<u32> out;
    if (!found) return out;
    out.push_back(s);
    if (!trivial) {
        u32 v = first, pred = s;
        u32 guard = 0;
        for (;;) {
            SPANTD_CHECK(++guard <= g.n() + 2, "numbering walk does not terminate");
            out.push_back(v);
            if (v == last) break;
            u32 want = PathNumbering::succ_phase(A.get(v));
            u32 nxt = 0;
            for (u32 j = 1; j <= g.deg(v); ++j) {
                u32 w = g.head(v, j);
                if (w != pred && A.get(w) == want) {
                    nxt = w;
                    break;
                }
            }
            SPANTD_CHECK(nxt != 0, "numbering does not continue to the last vertex");
            pred = v;
            v = nxt;
        }
    }
    out.push_back(t);
    return out;
}

// ===========================================================================
// Chordless search engine
// ===========================================================================

namespace {

// Arc suppliers present out-arcs (search direction) and in-arcs (backward
// scan); a 0 head marks an unusable slot. The search is a plain iterative
// DFS; when the target is reached, the final stack is post-processed from
// the top: each surviving vertex jumps to its deepest usable in-neighbor
// strictly below its stack predecessor and everything in between is
// removed. Survivors form a path with no usable skip arc.
template <class Net>
bool chordless_route(const Net& net, u32 source, u32 target, u32 universe,
                     std::vector<u32>& out, BitVec* visited_out, BitBudget* budget) {
    BitVec visited(universe, budget, "paths/search_visited");
    std::vector<std::pair<u32, u32>> stk;  // vertex, next out slot
    stk.reserve(64);
    visited.set(source);
    stk.emplace_back(source, 1);
    bool found = source == target;
    while (!found && !stk.empty()) {
        auto& top = stk.back();
        if (top.second > net.out_deg(top.first)) {
            stk.pop_back();
            continue;
        }
        u32 w = net.out_head(top.first, top.second++);
        if (w == 0 || visited.get(w)) continue;
        visited.set(w);
        stk.emplace_back(w, 1);
        if (w == target) found = true;
    }
    if (visited_out) *visited_out = visited;
    if (!found) {
        out.clear();
        return false;
    }
    BudgetLease pop_lease(budget, "paths/search_pop",
                          (u64(universe) + 1 + stk.size() * 3) * 32);
    std::vector<u32> seq(stk.size());
    for (size_t i = 0; i < stk.size(); ++i) seq[i] = stk[i].first;
    std::vector<u32> pos(universe + 1, 0);  // 1-based index into seq, 0 = removed
    for (size_t i = 0; i < seq.size(); ++i) pos[seq[i]] = static_cast<u32>(i + 1);
    size_t i = seq.size() - 1;
    while (i > 0) {
        u32 vi = seq[i];
        size_t best = seq.size();
        for (u32 j = 1; j <= net.in_deg(vi); ++j) {
            u32 u = net.in_head(vi, j);
            if (u == 0) continue;
            u32 p = pos[u];
            if (p == 0) continue;
            size_t idx = p - 1;
            if (idx + 1 < i && idx < best) best = idx;
        }
        if (best != seq.size()) {
            for (size_t q = best + 1; q < i; ++q) pos[seq[q]] = 0;
            i = best;
        } else {
            --i;
        }
    }
    out.clear();
    for (size_t q = 0; q < seq.size(); ++q)
        if (pos[seq[q]] != 0) out.push_back(seq[q]);
    return true;
}

struct UndirNet {
    const Graph* g;
    const ArcFilter* filter;

    bool usable(u32 u, u32 v) const { return filter == nullptr || (*filter)(u, v); }
    u32 out_deg(u32 v) const { return g->deg(v); }
    u32 out_head(u32 v, u32 j) const {
        u32 w = g->head(v, j);
        return usable(v, w) ? w : 0;
    }
    u32 in_deg(u32 v) const { return g->deg(v); }
    u32 in_head(u32 v, u32 j) const {
        u32 w = g->head(v, j);
        return usable(w, v) ? w : 0;
    }
};

// Residual arcs of the stored family over the split view. An out-copy
// presents the edge arcs (flow edges and direct s-t arcs removed) and then
// the reversed internal arc; an in-copy presents the internal arc when its
// vertex is unstored and then the reversed flow edge to the predecessor.
struct ResidualNet {
    const ResidualView* rv;
    const PathDataScheme* sc;
    u32 s, t;
    mutable u32 cn_v = 0, cn_val = 0;
    mutable u32 cp_v = 0, cp_val = 0;

    bool stored(u32 v) const { return sc->on_path(v); }
    u32 next_of(u32 v) const {
        if (cn_v != v) {
            cn_v = v;
            cn_val = sc->next(v);
        }
        return cn_val;
    }
    u32 prev_of(u32 v) const {
        if (cp_v != v) {
            cp_v = v;
            cp_val = sc->prev(v);
        }
        return cp_val;
    }
    // Flow on the arc v -> u, resolved from the tail side.
    bool flow_out(u32 v, u32 u) const {
        if (v == s) return stored(u);
        if (u == t) return stored(v);
        if (v == t || u == s) return false;
        return stored(v) && next_of(v) == u;
    }
    // Flow on the arc u -> v, resolved from the head side.
    bool flow_in(u32 v, u32 u) const {
        if (u == s) return stored(v);
        if (v == t) return stored(u);
        if (u == t || v == s) return false;
        return stored(v) && prev_of(v) == u;
    }
    bool banned(u32 a, u32 b) const { return (a == s && b == t) || (a == t && b == s); }

    u32 out_deg(u32 x) const { return rv->base().deg(rv->base_vertex(x)) + 1; }
    u32 out_head(u32 x, u32 j) const {
        u32 v = rv->base_vertex(x);
        const Graph& g = rv->base();
        if (rv->is_out_copy(x)) {
            if (j <= g.deg(v)) {
                u32 u = g.head(v, j);
                if (banned(v, u) || flow_out(v, u)) return 0;
                return rv->in_copy(u);
            }
            return stored(v) ? rv->in_copy(v) : 0;  // reversed internal arc
        }
        if (j == 1) return stored(v) ? 0 : rv->out_copy(v);
        if (!stored(v)) return 0;
        u32 u = g.head(v, j - 1);
        return u == prev_of(v) ? rv->out_copy(u) : 0;  // reversed flow edge
    }
    u32 in_deg(u32 x) const {
        return rv->is_out_copy(x) ? 2 : rv->base().deg(rv->base_vertex(x)) + 1;
    }
    u32 in_head(u32 x, u32 j) const {
        u32 v = rv->base_vertex(x);
        const Graph& g = rv->base();
        if (rv->is_out_copy(x)) {
            if (j == 1) return stored(v) ? 0 : rv->in_copy(v);
            if (!stored(v)) return 0;
            u32 nx = next_of(v);
            return nx == t ? 0 : rv->in_copy(nx);
        }
        if (j <= g.deg(v)) {
            u32 u = g.head(v, j);
            if (banned(u, v) || flow_in(v, u)) return 0;
            return rv->out_copy(u);
        }
        return stored(v) ? rv->out_copy(v) : 0;
    }
};

// Packed table entry layout: [color | entry | exit | pred_idx | succ_idx].
struct EntryCodec {
    u32 color_bits;
    u32 idx_bits;

    u64 encode(const PathDataScheme::TableEntry& e) const {
        SPANTD_CHECK((u64(e.color) >> color_bits) == 0 && (u64(e.pred_idx) >> idx_bits) == 0 &&
                         (u64(e.succ_idx) >> idx_bits) == 0,
                     "table entry field overflow");
        return u64(e.color) | (u64(e.entry) << color_bits) | (u64(e.exit) << (color_bits + 1)) |
               (u64(e.pred_idx) << (color_bits + 2)) |
               (u64(e.succ_idx) << (color_bits + 2 + idx_bits));
    }
    PathDataScheme::TableEntry decode(u64 w) const {
        PathDataScheme::TableEntry e;
        e.color = static_cast<u32>(w & ((u64(1) << color_bits) - 1));
        e.entry = (w >> color_bits) & 1;
        e.exit = (w >> (color_bits + 1)) & 1;
        e.pred_idx = static_cast<u32>((w >> (color_bits + 2)) & ((u64(1) << idx_bits) - 1));
        e.succ_idx =
            static_cast<u32>((w >> (color_bits + 2 + idx_bits)) & ((u64(1) << idx_bits) - 1));
        return e;
    }
};

EntryCodec make_codec(u32 k, u32 entry_bits) {
    u32 cb = static_cast<u32>(std::bit_width(k));
    return {cb, (entry_bits - cb - 2) / 2};
}

u32 adjacency_position(const Graph& g, u32 v, u32 target) {
    if (target == 0) return 0;
    for (u32 j = 1; j <= g.deg(v); ++j)
        if (g.head(v, j) == target) return j;
    fail("path neighbor missing from the adjacency list");
}

}  // namespace

// ===========================================================================
// find_chordless_path
// ===========================================================================

SinglePath find_chordless_path(const Graph& g, u32 s, u32 t, BitBudget* budget,
                               const ArcFilter* filter) {
    SPANTD_CHECK(s >= 1 && s <= g.n() && t >= 1 && t <= g.n() && s != t,
                 "endpoints must be distinct vertices");
    SinglePath p;
    p.s = s;
    p.t = t;
    p.A = PathNumbering(g.n(), budget, "paths/single_numbering");
    UndirNet net{&g, filter};
    std::vector<u32> route;
    if (!chordless_route(net, s, t, g.n(), route, nullptr, budget)) return p;
    p.found = true;
    if (route.size() == 2) {
        p.trivial = true;
        return p;
    }
    p.first = route[1];
    p.last = route[route.size() - 2];
    p.internal_count = static_cast<u32>(route.size()) - 2;
    for (size_t i = 1; i + 1 < route.size(); ++i)
        p.A.set(route[i], static_cast<u32>((i - 1) % 3) + 1);
    return p;
}

// ===========================================================================
// region_paths
// ===========================================================================

RegionPaths region_paths(const Graph& g, const std::vector<u32>& region,
                         const std::vector<u32>& sources, const std::vector<u32>& sinks,
                         BitBudget* budget) {
    SPANTD_CHECK(sources.size() == sinks.size(), "entries and exits must pair up");
    std::vector<u32> verts(region);
    std::sort(verts.begin(), verts.end());
    SPANTD_CHECK(std::adjacent_find(verts.begin(), verts.end()) == verts.end(),
                 "region vertices must be distinct");
    u32 r = static_cast<u32>(verts.size());
    auto local_of = [&](u32 v) -> u32 {
        auto it = std::lower_bound(verts.begin(), verts.end(), v);
        SPANTD_CHECK(it != verts.end() && *it == v, "vertex outside the region");
        return static_cast<u32>(it - verts.begin()) + 1;
    };
    std::vector<std::vector<u32>> adj(r + 1);
    u64 adj_total = 0;
    for (u32 i = 1; i <= r; ++i) {
        u32 v = verts[i - 1];
        for (u32 j = 1; j <= g.deg(v); ++j) {
            u32 w = g.head(v, j);
            auto it = std::lower_bound(verts.begin(), verts.end(), w);
            if (it != verts.end() && *it == w)
                adj[i].push_back(static_cast<u32>(it - verts.begin()) + 1);
        }
        std::sort(adj[i].begin(), adj[i].end());
        adj_total += adj[i].size();
    }
    BudgetLease scratch(budget, "paths/region_flow", (u64(r) * 12 + adj_total + 16) * 32);
    std::vector<u32> src_order;
    std::vector<char> is_src(r + 1, 0), is_snk(r + 1, 0);
    for (u32 v : sources) {
        u32 lv = local_of(v);
        SPANTD_CHECK(!is_src[lv], "entries must be distinct");
        is_src[lv] = 1;
        src_order.push_back(lv);
    }
    std::sort(src_order.begin(), src_order.end());
    for (u32 v : sinks) {
        u32 lv = local_of(v);
        SPANTD_CHECK(!is_snk[lv], "exits must be distinct");
        is_snk[lv] = 1;
    }
    std::vector<char> used(r + 1, 0), src_used(r + 1, 0), snk_used(r + 1, 0);
    std::vector<u32> nxt(r + 1, 0), pre(r + 1, 0);
    // Search node ids: 0 = virtual entry, 1..r = receive copies, r+1..2r =
    // emit copies, 2r+1 = virtual exit. A slot past the end returns the
    // sentinel; a usable head of 0 marks a closed slot.
    const u32 EXIT = 2 * r + 1;
    const u32 DONE = UINT32_MAX;
    auto arc = [&](u32 x, u32 slot) -> u32 {
        if (x == 0) {
            if (slot > src_order.size()) return DONE;
            u32 v = src_order[slot - 1];
            return src_used[v] ? 0 : v;
        }
        if (x <= r) {
            if (slot > 1) return DONE;
            if (!used[x]) return x + r;
            return pre[x] != 0 ? pre[x] + r : 0;
        }
        u32 v = x - r;
        if (slot == 1) return (is_snk[v] && !snk_used[v]) ? EXIT : 0;
        if (slot - 1 > adj[v].size()) return DONE;
        u32 w = adj[v][slot - 2];
        if (used[w] && pre[w] == v) return 0;  // the edge carries flow forward
        return w;
    };
    auto augment_once = [&]() -> bool {
        std::vector<char> vis(2 * r + 2, 0);
        std::vector<u32> parent(2 * r + 2, 0);
        std::vector<std::pair<u32, u32>> stk;
        vis[0] = 1;
        stk.emplace_back(0u, 1u);
        bool hit = false;
        while (!stk.empty() && !hit) {
            auto& top = stk.back();
            u32 y = arc(top.first, top.second);
            if (y == DONE) {
                stk.pop_back();
                continue;
            }
            ++top.second;
            if (y == 0 || vis[y]) continue;
            vis[y] = 1;
            parent[y] = top.first + 1;
            if (y == EXIT) {
                hit = true;
                break;
            }
            stk.emplace_back(y, 1u);
        }
        if (!hit) return false;
        std::vector<u32> chain;
        for (u32 x = EXIT;; x = parent[x] - 1) {
            chain.push_back(x);
            if (x == 0) break;
        }
        std::reverse(chain.begin(), chain.end());
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            u32 a = chain[i], b = chain[i + 1];
            if (a == 0) {
                src_used[b] = 1;
                pre[b] = 0;  // fed by the virtual entry from now on
            } else if (b == EXIT) {
                snk_used[a - r] = 1;
            } else if (a <= r && b == a + r) {
                used[a] = 1;
            } else if (a <= r) {
                nxt[b - r] = 0;  // the edge (b-r -> a) leaves the flow
            } else {
                nxt[a - r] = b;
                pre[b] = a - r;
            }
        }
        return true;
    };
    for (size_t i = 0; i < src_order.size(); ++i)
        SPANTD_CHECK(augment_once(), "regional flow cannot connect every entry to an exit");
    RegionPaths out;
    for (u32 v : sources) {
        u32 lv = local_of(v);
        SPANTD_CHECK(src_used[lv], "entry left unconnected");
        std::vector<u32> route;
        u32 x = lv;
        route.push_back(verts[x - 1]);
        u32 guard = 0;
        while (nxt[x] != 0) {
            SPANTD_CHECK(++guard <= r + 1, "regional route does not terminate");
            x = nxt[x];
            route.push_back(verts[x - 1]);
        }
        SPANTD_CHECK(is_snk[x] && snk_used[x], "regional route misses its exit");
        out.routes.push_back(std::move(route));
    }
    return out;
}

// ===========================================================================
// PathDataScheme
// ===========================================================================

PathDataScheme::PathDataScheme(const Graph& g, u32 s, u32 t, u32 k, BitBudget* budget)
    : g_(&g),
      budget_(budget),
      n_(g.n()),
      s_(s),
      t_(t),
      k_(k),
      ell_(0),
      A_(g.n(), budget, "scheme/numbering"),
      B_(g.n(), budget, "scheme/boundary"),
      keys_(std::make_unique<BitVec>(g.n(), budget, "scheme/keys")) {
    SPANTD_CHECK(s >= 1 && s <= n_ && t >= 1 && t <= n_ && s != t,
                 "endpoints must be distinct vertices");
    SPANTD_CHECK(k >= 1, "path bound must be positive");
    u32 maxdeg = 0;
    for (u32 v = 1; v <= n_; ++v) maxdeg = std::max(maxdeg, g_->deg(v));
    entry_bits_ = static_cast<u32>(std::bit_width(k_)) + 2 +
                  2 * static_cast<u32>(std::bit_width(maxdeg));
    SPANTD_CHECK(entry_bits_ <= 64, "table entry exceeds one word");
}

u32 PathDataScheme::start_of(u32 color) const {
    SPANTD_CHECK(color >= 1 && color <= ell_, "color out of range");
    u32 v = starts_[color - 1];
    SPANTD_CHECK(v != 0, "start anchor not set");
    return v;
}

u32 PathDataScheme::end_of(u32 color) const {
    SPANTD_CHECK(color >= 1 && color <= ell_, "color out of range");
    u32 v = ends_[color - 1];
    SPANTD_CHECK(v != 0, "end anchor not set");
    return v;
}

void PathDataScheme::begin_rebuild(u32 ell) {
    SPANTD_CHECK(g_ != nullptr, "scheme not bound to a graph");
    SPANTD_CHECK(ell <= k_, "more stored paths than the bound");
    ell_ = ell;
    starts_.assign(ell_, 0);
    ends_.assign(ell_, 0);
    for (u32 v = 1; v <= n_; ++v) A_.set(v, 0);
    B_.clear_all();
    keys_->clear_all();
    table_ = StaticAlloc();
    cache_.valid = false;
}

void PathDataScheme::set_boundary(const BitVec& b) {
    SPANTD_CHECK(b.size() == n_, "boundary bitmap size mismatch");
    B_ = b;
    cache_.valid = false;
}

void PathDataScheme::reserve_table(const BitVec& keys) {
    SPANTD_CHECK(keys.size() == n_, "key bitmap size mismatch");
    *keys_ = keys;
    table_ = StaticAlloc(*keys_, entry_bits_, budget_, "scheme/table");
    cache_.valid = false;
}

void PathDataScheme::set_table(u32 v, const TableEntry& e) {
    SPANTD_CHECK(e.color >= 1 && e.color <= ell_, "table color out of range");
    table_.write(v, make_codec(k_, entry_bits_).encode(e));
    cache_.valid = false;
}

void PathDataScheme::set_anchor(u32 color, u32 start, u32 end) {
    SPANTD_CHECK(color >= 1 && color <= ell_, "color out of range");
    SPANTD_CHECK(start >= 1 && start <= n_ && end >= 1 && end <= n_, "anchor out of range");
    starts_[color - 1] = start;
    ends_[color - 1] = end;
}

bool PathDataScheme::table_has(u32 v) const { return v >= 1 && v <= n_ && keys_ && keys_->get(v); }

PathDataScheme::TableEntry PathDataScheme::table(u32 v) const {
    SPANTD_CHECK(table_has(v), "vertex carries no table entry");
    return make_codec(k_, entry_bits_).decode(table_.read(v));
}

u32 PathDataScheme::adjacency_index(u32 v, u32 target) const {
    return adjacency_position(*g_, v, target);
}

u32 PathDataScheme::next(u32 v) const {
    SPANTD_CHECK(on_path(v), "successor of a vertex on no stored path");
    if (table_has(v)) {
        TableEntry e = table(v);
        return e.succ_idx == 0 ? t_ : g_->head(v, e.succ_idx);
    }
    for (u32 e : ends_)
        if (e == v) return t_;
    std::vector<u32> route;
    region_route(v, &route);
    for (size_t i = 0; i < route.size(); ++i)
        if (route[i] == v) {
            SPANTD_CHECK(i + 1 < route.size(), "region exit must carry a table entry");
            return route[i + 1];
        }
    fail("vertex missing from its region route");
}

u32 PathDataScheme::prev(u32 v) const {
    SPANTD_CHECK(on_path(v), "predecessor of a vertex on no stored path");
    if (table_has(v)) {
        TableEntry e = table(v);
        return e.pred_idx == 0 ? s_ : g_->head(v, e.pred_idx);
    }
    for (u32 b : starts_)
        if (b == v) return s_;
    std::vector<u32> route;
    region_route(v, &route);
    for (size_t i = 0; i < route.size(); ++i)
        if (route[i] == v) {
            SPANTD_CHECK(i > 0, "region entry must carry a table entry");
            return route[i - 1];
        }
    fail("vertex missing from its region route");
}

u32 PathDataScheme::color(u32 v) const {
    SPANTD_CHECK(on_path(v), "color of a vertex on no stored path");
    if (table_has(v)) return table(v).color;
    return region_route(v, nullptr);
}

u32 PathDataScheme::region_route(u32 v, std::vector<u32>* route_out) const {
    SPANTD_CHECK(on_path(v) && !boundary(v), "region lookup wants an interior vertex");
    if (!cache_.valid || !std::binary_search(cache_.region.begin(), cache_.region.end(), v)) {
        std::vector<u32> comp{v}, work{v};
        auto seen = [&](u32 x) { return std::find(comp.begin(), comp.end(), x) != comp.end(); };
        while (!work.empty()) {
            u32 x = work.back();
            work.pop_back();
            for (u32 j = 1; j <= g_->deg(x); ++j) {
                u32 w = g_->head(x, j);
                if (w == s_ || w == t_ || !on_path(w) || boundary(w) || seen(w)) continue;
                comp.push_back(w);
                work.push_back(w);
            }
        }
        std::sort(comp.begin(), comp.end());
        std::vector<u32> srcs, snks, cols;
        for (u32 x : comp) {
            bool entry = false, exit_role = false;
            u32 col = 0;
            if (table_has(x)) {
                TableEntry e = table(x);
                entry = e.entry;
                exit_role = e.exit;
                col = e.color;
            }
            for (size_t c = 0; c < starts_.size(); ++c)
                if (starts_[c] == x) {
                    entry = true;
                    col = static_cast<u32>(c) + 1;
                }
            for (size_t c = 0; c < ends_.size(); ++c)
                if (ends_[c] == x) exit_role = true;
            if (entry) {
                srcs.push_back(x);
                cols.push_back(col);
            }
            if (exit_role) snks.push_back(x);
        }
        SPANTD_CHECK(!srcs.empty() && srcs.size() == snks.size(),
                     "region entries and exits out of balance");
        RegionPaths rp = region_paths(*g_, comp, srcs, snks, budget_);
        cache_.valid = true;
        cache_.region = std::move(comp);
        cache_.routes = std::move(rp.routes);
        cache_.colors = std::move(cols);
    }
    for (size_t i = 0; i < cache_.routes.size(); ++i)
        for (u32 x : cache_.routes[i])
            if (x == v) {
                if (route_out) *route_out = cache_.routes[i];
                return cache_.colors[i];
            }
    fail("interior vertex missing from the regional flow");
}

u64 PathDataScheme::alloc_bits() const {
    u64 table_bits = keys_ ? ((u64(keys_->count()) * entry_bits_ + 63) / 64) * 64 : 0;
    u64 key_bits = keys_ ? keys_->alloc_bits() : 0;
    return A_.alloc_bits() + B_.alloc_bits() + key_bits + table_bits +
           u64(starts_.size() + ends_.size()) * 32;
}

std::string PathDataScheme::storage_report() const {
    std::ostringstream os;
    u64 table_bits = keys_ ? ((u64(keys_->count()) * entry_bits_ + 63) / 64) * 64 : 0;
    os << "numbering=" << A_.alloc_bits() << " boundary=" << B_.alloc_bits()
       << " keys=" << (keys_ ? keys_->alloc_bits() : 0) << " table=" << table_bits
       << " anchors=" << u64(starts_.size() + ends_.size()) * 32 << " total=" << alloc_bits();
    return os.str();
}

// ===========================================================================
// scheme_from_single_path
// ===========================================================================

PathDataScheme scheme_from_single_path(const Graph& g, const SinglePath& p, u32 k,
                                       BitBudget* budget) {
    SPANTD_CHECK(p.found, "no path to store");
    PathDataScheme sc(g, p.s, p.t, k, budget);
    if (p.trivial) {
        sc.begin_rebuild(0);
        return sc;
    }
    sc.begin_rebuild(1);
    std::vector<u32> route = p.vertices(g);
    u32 L = path_stride(k);
    u32 icount = static_cast<u32>(route.size()) - 2;
    BitVec b(g.n(), budget, "paths/build_boundary");
    for (u32 i = 1; i <= icount; ++i) {
        u32 v = route[i];
        sc.set_numbering(v, (i - 1) % 3 + 1);
        if (i % L == 0 || g.deg(v) > L) b.set(v);
    }
    sc.set_boundary(b);
    BitVec keys(g.n(), budget, "paths/build_keys");
    for (u32 i = 1; i <= icount; ++i) {
        if (!b.get(route[i])) continue;
        keys.set(route[i]);
        if (i > 1) keys.set(route[i - 1]);
        if (i < icount) keys.set(route[i + 1]);
    }
    sc.reserve_table(keys);
    for (u32 i = 1; i <= icount; ++i) {
        u32 v = route[i];
        if (!keys.get(v)) continue;
        PathDataScheme::TableEntry e;
        e.color = 1;
        e.entry = !b.get(v) && i > 1 && b.get(route[i - 1]);
        e.exit = !b.get(v) && i < icount && b.get(route[i + 1]);
        e.pred_idx = i == 1 ? 0 : adjacency_position(g, v, route[i - 1]);
        e.succ_idx = i == icount ? 0 : adjacency_position(g, v, route[i + 1]);
        sc.set_table(v, e);
    }
    sc.set_anchor(1, route[1], route[icount]);
    return sc;
}

// ===========================================================================
// Rerouting
// ===========================================================================

Rerouting::Rerouting(u32 n, u32 k, BitBudget* budget)
    : vstar_(n, budget, "patch/vstar"),
      next_pos_(n + 1, 0),
      prev_pos_(n + 1, 0),
      cap_(patch_capacity(n, k)),
      lease_(budget, "patch/maps", u64(2 * (n + 1)) * 32) {}

void Rerouting::set_next(u32 v, u32 target) {
    SPANTD_CHECK(v >= 1 && v < next_pos_.size(), "vertex out of range");
    if (next_pos_[v] != 0) {
        next_vals_[next_pos_[v] - 1] = target;
        return;
    }
    next_keys_.push_back(v);
    next_vals_.push_back(target);
    next_pos_[v] = static_cast<u32>(next_keys_.size());
    SPANTD_CHECK(entries() <= 4 * cap_ + 8, "override maps far beyond capacity");
    lease_.resize(u64(2 * next_pos_.size() + next_keys_.size() + next_vals_.size() +
                      prev_keys_.size() + prev_vals_.size()) *
                  32);
}

void Rerouting::set_prev(u32 v, u32 target) {
    SPANTD_CHECK(v >= 1 && v < prev_pos_.size(), "vertex out of range");
    if (prev_pos_[v] != 0) {
        prev_vals_[prev_pos_[v] - 1] = target;
        return;
    }
    prev_keys_.push_back(v);
    prev_vals_.push_back(target);
    prev_pos_[v] = static_cast<u32>(prev_keys_.size());
    SPANTD_CHECK(entries() <= 4 * cap_ + 8, "override maps far beyond capacity");
    lease_.resize(u64(2 * next_pos_.size() + next_keys_.size() + next_vals_.size() +
                      prev_keys_.size() + prev_vals_.size()) *
                  32);
}

u32 Rerouting::next_target(u32 v) const {
    SPANTD_CHECK(has_next(v), "no successor override");
    return next_vals_[next_pos_[v] - 1];
}

u32 Rerouting::prev_target(u32 v) const {
    SPANTD_CHECK(has_prev(v), "no predecessor override");
    return prev_vals_[prev_pos_[v] - 1];
}

u32 Rerouting::rnext(u32 v, const PathDataScheme& base) const {
    if (!has_next(v)) return 0;
    u32 tgt = next_target(v);
    if (tgt == base.s() || tgt == base.t()) return 0;
    return base.on_path(tgt) ? base.color(tgt) : base.paths() + 1;
}

u32 Rerouting::rprev(u32 v, const PathDataScheme& base) const {
    if (!has_prev(v)) return 0;
    u32 tgt = prev_target(v);
    if (tgt == base.s() || tgt == base.t()) return 0;
    return base.on_path(tgt) ? base.color(tgt) : base.paths() + 1;
}

void Rerouting::clear_overrides() {
    for (u32 v : next_keys_) next_pos_[v] = 0;
    for (u32 v : prev_keys_) prev_pos_[v] = 0;
    next_keys_.clear();
    next_vals_.clear();
    prev_keys_.clear();
    prev_vals_.clear();
    lease_.resize(u64(2 * next_pos_.size()) * 32);
}

u64 Rerouting::alloc_bits() const {
    return vstar_.alloc_bits() + u64(2 * next_pos_.size() + next_keys_.size() +
                                     next_vals_.size() + prev_keys_.size() + prev_vals_.size()) *
                                     32;
}

// ===========================================================================
// GoodPathsWitness
// ===========================================================================

std::vector<std::vector<u32>> GoodPathsWitness::stored_paths() const {
    std::vector<std::vector<u32>> out;
    for (u32 c = 1; c <= scheme.paths(); ++c) {
        std::vector<u32> r{scheme.s()};
        u32 v = scheme.start_of(c);
        u32 guard = 0;
        for (;;) {
            SPANTD_CHECK(++guard <= scheme.n() + 2, "stored path does not reach its end");
            r.push_back(v);
            if (v == scheme.end_of(c)) break;
            v = scheme.next(v);
        }
        r.push_back(scheme.t());
        out.push_back(std::move(r));
    }
    return out;
}

// ===========================================================================
// AugmentStep + augment
// ===========================================================================

u32 AugmentStep::walk_next(u32 x) const {
    u32 p = x < wpos.size() ? wpos[x] : 0;
    SPANTD_CHECK(p != 0, "split vertex not on the walk");
    return p < walk.size() ? walk[p] : 0;
}

u32 AugmentStep::walk_prev(u32 x) const {
    u32 p = x < wpos.size() ? wpos[x] : 0;
    SPANTD_CHECK(p != 0, "split vertex not on the walk");
    return p >= 2 ? walk[p - 2] : 0;
}

bool AugmentStep::merged_simple() const {
    if (!found) return false;
    std::vector<char> seen(base_n + 1, 0);
    u32 prevb = 0;
    for (u32 x : walk) {
        u32 b = x > base_n ? x - base_n : x;
        if (b == prevb) continue;
        if (seen[b]) return false;
        seen[b] = 1;
        prevb = b;
    }
    return true;
}

SinglePath AugmentStep::merged(BitBudget* budget) const {
    SPANTD_CHECK(found && merged_simple(), "walk does not merge into a simple path");
    std::vector<u32> seq;
    u32 prevb = 0;
    for (u32 x : walk) {
        u32 b = x > base_n ? x - base_n : x;
        if (b != prevb) {
            seq.push_back(b);
            prevb = b;
        }
    }
    SinglePath p;
    p.found = true;
    p.s = seq.front();
    p.t = seq.back();
    p.A = PathNumbering(base_n, budget, "paths/merged_numbering");
    if (seq.size() == 2) {
        p.trivial = true;
        return p;
    }
    p.first = seq[1];
    p.last = seq[seq.size() - 2];
    p.internal_count = static_cast<u32>(seq.size()) - 2;
    for (size_t i = 1; i + 1 < seq.size(); ++i)
        p.A.set(seq[i], static_cast<u32>((i - 1) % 3) + 1);
    return p;
}

AugmentStep augment(const Graph& g, const PathDataScheme& scheme, BitBudget* budget) {
    SPANTD_CHECK(scheme.n() == g.n(), "scheme bound to a different graph");
    ResidualView rv(g);
    ResidualNet net{&rv, &scheme, scheme.s(), scheme.t()};
    AugmentStep st;
    st.base_n = g.n();
    st.mark = BitVec(2 * g.n(), budget, "paths/walk_mark");
    st.order = PathNumbering(2 * g.n(), budget, "paths/walk_order");
    std::vector<u32> route;
    BitVec visited;
    bool ok = chordless_route(net, rv.out_copy(scheme.s()), rv.in_copy(scheme.t()), 2 * g.n(),
                              route, &visited, budget);
    st.visited = std::move(visited);
    if (!ok) return st;
    st.found = true;
    st.walk = std::move(route);
    st.walk_len = static_cast<u32>(st.walk.size());
    st.wpos.assign(2 * g.n() + 1, 0);
    for (size_t i = 0; i < st.walk.size(); ++i) {
        u32 x = st.walk[i];
        st.wpos[x] = static_cast<u32>(i + 1);
        st.mark.set(x);
        st.order.set(x, static_cast<u32>(i % 3) + 1);
    }
    st.scratch_lease =
        BudgetLease(budget, "paths/walk_vectors", u64(st.walk.size() + st.wpos.size()) * 32);
    return st;
}

// ===========================================================================
// ReroutingState
// ===========================================================================

ReroutingState::ReroutingState(const Graph& g, PathDataScheme& scheme, AugmentStep step,
                               BitBudget* budget)
    : g_(&g),
      scheme_(&scheme),
      budget_(budget),
      rv_(g),
      step_(std::move(step)),
      walk_live_(true),
      ell_(scheme.paths() + 1),
      patch_(g.n(), scheme.k(), budget),
      clean_(g.n(), budget, "repair/clean_area"),
      frontier_(scheme.s()) {
    SPANTD_CHECK(step_.found, "no augmenting walk to absorb");
    SPANTD_CHECK(scheme.paths() < scheme.k(), "family is already at the bound");
    SPANTD_CHECK(step_.walk.size() >= 4, "degenerate augmenting walk");
    u32 s = scheme.s(), t = scheme.t();
    for (u32 v = 1; v <= g.n(); ++v)
        if (scheme.on_path(v)) patch_.restore(v);
    std::vector<char> touched(ell_ + 1, 0);
    touched[ell_] = 1;
    for (u32 x : step_.walk) {
        u32 b = rv_.base_vertex(x);
        if (b == s || b == t) continue;
        if (scheme.on_path(b)) touched[scheme.color(b)] = 1;
        patch_.restore(b);
    }
    for (size_t i = 0; i + 1 < step_.walk.size(); ++i) {
        u32 x = step_.walk[i], y = step_.walk[i + 1];
        u32 b = rv_.base_vertex(x);
        if (b == s || b == t) continue;
        // A reversed pass-through (out-copy then in-copy of one vertex)
        // cancels the unit of flow through it: the vertex leaves the family.
        if (rv_.base_vertex(y) == b && rv_.is_out_copy(x) && !rv_.is_out_copy(y))
            patch_.drop(b);
    }
    starts_.assign(ell_, 0);
    ends_.assign(ell_, 0);
    for (u32 c = 1; c < ell_; ++c) {
        starts_[c - 1] = scheme.start_of(c);
        ends_[c - 1] = scheme.end_of(c);
    }
    starts_[ell_ - 1] = rv_.base_vertex(step_.walk[1]);
    ends_[ell_ - 1] = rv_.base_vertex(step_.walk[step_.walk.size() - 2]);
    ever_dirty_.assign(ell_, 0);
    for (u32 c = 1; c <= ell_; ++c)
        if (touched[c]) {
            dirty_.push_back(c);
            ever_dirty_[c - 1] = 1;
        }
}

u32 ReroutingState::nav_next(u32 v) const {
    SPANTD_CHECK(v >= 1 && v <= g_->n() && in_family(v), "navigating outside the family");
    if (patch_.has_next(v)) return patch_.next_target(v);
    if (walk_live_) {
        u32 x = rv_.out_copy(v);
        if (step_.mark.get(x)) {
            u32 y = step_.walk_next(x);
            SPANTD_CHECK(y != 0, "walk ends inside the family");
            return rv_.base_vertex(y);
        }
    }
    SPANTD_CHECK(scheme_->on_path(v), "family vertex with no successor record");
    return scheme_->next(v);
}

u32 ReroutingState::nav_prev(u32 v) const {
    SPANTD_CHECK(v >= 1 && v <= g_->n() && in_family(v), "navigating outside the family");
    if (patch_.has_prev(v)) return patch_.prev_target(v);
    if (walk_live_) {
        u32 x = rv_.in_copy(v);
        if (step_.mark.get(x)) {
            u32 y = step_.walk_prev(x);
            SPANTD_CHECK(y != 0, "walk starts inside the family");
            return rv_.base_vertex(y);
        }
    }
    SPANTD_CHECK(scheme_->on_path(v), "family vertex with no predecessor record");
    return scheme_->prev(v);
}

std::vector<u32> ReroutingState::route_of(u32 color) const {
    std::vector<u32> r{scheme_->s()};
    u32 v = starts_[color - 1];
    u32 guard = 0;
    while (v != scheme_->t()) {
        SPANTD_CHECK(++guard <= g_->n() + 2, "family navigation does not reach t");
        r.push_back(v);
        v = nav_next(v);
    }
    r.push_back(scheme_->t());
    return r;
}

bool ReroutingState::chordless_pass(std::vector<u32>& dirty, std::vector<u32>* cleaned) {
    if (dirty.empty()) return false;
    std::sort(dirty.begin(), dirty.end());
    dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
    bool any = false;
    std::vector<u32> pending;
    std::vector<u32> pos(g_->n() + 1, 0);
    u32 s = scheme_->s(), t = scheme_->t();
    for (size_t di = 0; di < dirty.size(); ++di) {
        if (patch_.entries() >= patch_.capacity()) {
            pending.insert(pending.end(), dirty.begin() + di, dirty.end());
            break;
        }
        u32 c = dirty[di];
        std::vector<u32> route = route_of(c);
        for (size_t i = 0; i < route.size(); ++i) pos[route[i]] = static_cast<u32>(i + 1);
        bool chord = false;
        for (size_t i = 0; i + 1 < route.size() && !chord; ++i) {
            u32 u = route[i];
            for (u32 j = 1; j <= g_->deg(u); ++j) {
                u32 w = g_->head(u, j);
                u32 pw = pos[w];
                if (pw == 0) continue;
                u32 pu = static_cast<u32>(i + 1);
                u32 d = pw > pu ? pw - pu : pu - pw;
                if (d < 2) continue;
                if ((u == s && w == t) || (u == t && w == s)) continue;
                chord = true;
                break;
            }
        }
        if (chord) {
            any = true;
            ArcFilter within = [&pos, s, t](u32 a, u32 b) {
                if (pos[a] == 0 || pos[b] == 0) return false;
                return !((a == s && b == t) || (a == t && b == s));
            };
            SinglePath sp = find_chordless_path(*g_, s, t, budget_, &within);
            SPANTD_CHECK(sp.found && !sp.trivial, "straightening lost the path");
            std::vector<u32> fresh = sp.vertices(*g_);
            shortcut_path(c, fresh, route);
            if (cleaned)
                for (size_t i = 1; i + 1 < fresh.size(); ++i) cleaned->push_back(fresh[i]);
        } else if (cleaned) {
            for (size_t i = 1; i + 1 < route.size(); ++i) cleaned->push_back(route[i]);
        }
        for (u32 v : route) pos[v] = 0;
    }
    dirty = std::move(pending);
    return any;
}

void ReroutingState::shortcut_path(u32 color, const std::vector<u32>& fresh,
                                   const std::vector<u32>& old_route) {
    std::vector<u32> op(g_->n() + 1, 0), np(g_->n() + 1, 0);
    for (size_t i = 0; i < old_route.size(); ++i) op[old_route[i]] = static_cast<u32>(i + 1);
    for (size_t i = 0; i < fresh.size(); ++i) np[fresh[i]] = static_cast<u32>(i + 1);
    for (size_t i = 1; i + 1 < old_route.size(); ++i)
        if (np[old_route[i]] == 0) patch_.drop(old_route[i]);
    u32 s = scheme_->s(), t = scheme_->t();
    for (size_t i = 0; i + 1 < fresh.size(); ++i) {
        u32 a = fresh[i], b = fresh[i + 1];
        if (a != s) {
            u32 oi = op[a];
            u32 osucc = (oi != 0 && oi < old_route.size()) ? old_route[oi] : 0;
            if (osucc != b) patch_.set_next(a, b);
        }
        if (b != t) {
            u32 oi = op[b];
            u32 opred = oi >= 2 ? old_route[oi - 2] : 0;
            if (opred != a) patch_.set_prev(b, a);
        }
    }
    starts_[color - 1] = fresh[1];
    ends_[color - 1] = fresh[fresh.size() - 2];
}

bool ReroutingState::destroy_one_extended_cycle(bool strict) {
    if (ell_ < 2) return false;
    u32 n = g_->n();
    std::vector<std::vector<u32>> inner(ell_);
    std::vector<u32> pcol(n + 1, 0), ppos(n + 1, 0);
    for (u32 c = 1; c <= ell_; ++c) {
        std::vector<u32> r = route_of(c);
        inner[c - 1].assign(r.begin() + 1, r.end() - 1);
        for (size_t i = 0; i < inner[c - 1].size(); ++i) {
            pcol[inner[c - 1][i]] = c;
            ppos[inner[c - 1][i]] = static_cast<u32>(i + 1);
        }
    }
    auto minx = [&](u32 y, u32 c) -> u32 {
        u32 best = 0;
        for (u32 j = 1; j <= g_->deg(y); ++j) {
            u32 w = g_->head(y, j);
            if (pcol[w] == c && (best == 0 || ppos[w] < best)) best = ppos[w];
        }
        return best;
    };
    std::vector<u32> tuple;
    std::vector<char> used(ell_ + 1, 0);

    // Threshold fixpoint for one directed color arrangement: mx[j] starts at
    // the top of path tuple[j] and only moves down; a stable nonzero vector
    // is a deadlock cycle with entry y_j at position mx[j] and exit x_j at
    // the least neighbor position of y_{j+1}, forced at index `forced` to
    // leave a subpath of three or more vertices.
    auto attempt = [&](u32 forced) -> bool {
        u32 r = static_cast<u32>(tuple.size());
        std::vector<u32> mx(r);
        for (u32 j = 0; j < r; ++j) {
            mx[j] = static_cast<u32>(inner[tuple[j] - 1].size());
            if (mx[j] == 0) return false;
        }
        for (;;) {
            bool changed = false;
            for (u32 j = 0; j < r; ++j) {
                u32 jn = (j + 1) % r;
                u32 off = j == forced ? 2 : 1;
                if (mx[j] <= off) return false;
                u32 lim = mx[j] - off;
                u32 p = mx[jn];
                while (p >= 1) {
                    u32 y = inner[tuple[jn] - 1][p - 1];
                    u32 mn = minx(y, tuple[j]);
                    if (mn != 0 && mn <= lim) break;
                    --p;
                }
                if (p == 0) return false;
                if (p < mx[jn]) {
                    mx[jn] = p;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        if (strict) {
            bool touches = false;
            for (u32 j = 0; j < r; ++j) touches |= ever_dirty_[tuple[j] - 1] != 0;
            if (!touches)
                fail("deadlock among paths that were never rerouted: family is not clean");
        }
        struct Move {
            u32 x, y_next, color, lo, hi;
        };
        std::vector<Move> moves(r);
        for (u32 j = 0; j < r; ++j) {
            u32 jn = (j + 1) % r;
            u32 off = j == forced ? 2 : 1;
            u32 cj = tuple[j];
            u32 ynext = inner[tuple[jn] - 1][mx[jn] - 1];
            u32 bp = minx(ynext, cj);
            SPANTD_CHECK(bp != 0 && bp <= mx[j] - off, "stable state lost its witness");
            moves[j] = {inner[cj - 1][bp - 1], ynext, cj, bp, mx[j]};
        }
        std::vector<u32> new_ends(ends_);
        for (u32 j = 0; j < r; ++j) {
            u32 jn = (j + 1) % r;
            const Move& m = moves[j];
            patch_.set_next(m.x, m.y_next);
            patch_.set_prev(m.y_next, m.x);
            for (u32 p = m.lo + 1; p < m.hi; ++p) patch_.drop(inner[m.color - 1][p - 1]);
            new_ends[m.color - 1] = ends_[tuple[jn] - 1];
        }
        ends_ = std::move(new_ends);
        for (u32 j = 0; j < r; ++j) {
            dirty_.push_back(tuple[j]);
            ever_dirty_[tuple[j] - 1] = 1;
        }
        return true;
    };

    // Tuples are rotations-canonical: the smallest color leads, the rest
    // permute freely, so both orientations of every cycle are covered.
    std::function<bool()> extend = [&]() -> bool {
        if (tuple.size() >= 2) {
            for (u32 forced = 0; forced < tuple.size(); ++forced)
                if (attempt(forced)) return true;
        }
        if (tuple.size() >= ell_) return false;
        for (u32 c = tuple.front() + 1; c <= ell_; ++c) {
            if (used[c]) continue;
            used[c] = 1;
            tuple.push_back(c);
            if (extend()) return true;
            tuple.pop_back();
            used[c] = 0;
        }
        return false;
    };
    for (u32 first = 1; first < ell_; ++first) {
        tuple.assign(1, first);
        std::fill(used.begin(), used.end(), 0);
        used[first] = 1;
        if (extend()) return true;
    }
    return false;
}

bool ReroutingState::repair_batch(bool strict) {
    u32 guard = 0;
    for (;;) {
        SPANTD_CHECK(++guard <= 4 * g_->n() + 4 * ell_ + 8, "repair loop does not converge");
        if (patch_.entries() >= patch_.capacity()) return true;
        if (chordless_pass(dirty_, &cleaned_log_)) continue;
        if (!dirty_.empty()) return true;
        if (destroy_one_extended_cycle(strict)) continue;
        return false;
    }
}

void ReroutingState::rebuild() {
    PathDataScheme next = rebuild_scheme_impl(*this, true);
    *scheme_ = std::move(next);
    walk_live_ = false;
    step_.walk.clear();
    step_.wpos.clear();
    step_.walk_len = 0;
    if (step_.mark.size() != 0) step_.mark.clear_all();
    step_.scratch_lease = BudgetLease();
    patch_.clear_overrides();
    for (u32 v = 1; v <= g_->n(); ++v) {
        if (scheme_->on_path(v))
            patch_.restore(v);
        else
            patch_.drop(v);
    }
    starts_.assign(ell_, 0);
    ends_.assign(ell_, 0);
    for (u32 c = 1; c <= ell_; ++c) {
        starts_[c - 1] = scheme_->start_of(c);
        ends_[c - 1] = scheme_->end_of(c);
    }
    dirty_.clear();
    for (u32 c = 1; c <= ell_; ++c) dirty_.push_back(c);
    std::fill(ever_dirty_.begin(), ever_dirty_.end(), 1);
}

void ReroutingState::run_to_completion() {
    u32 bound = 8 * (static_cast<u32>(std::bit_width(scheme_->k() + 2u)) + 1) + 8;
    u32 rounds = 0;
    for (;;) {
        bool more = repair_batch(false);
        if (!more && !walk_live_ && patch_.entries() == 0) break;
        SPANTD_CHECK(rounds < bound, "rerouting exceeded its rebuild budget");
        rebuild();
        ++rounds;
    }
    frontier_ = scheme_->t();
}

// ===========================================================================
// rebuild_scheme_impl: sweep + two-run propagation
// ===========================================================================

PathDataScheme rebuild_scheme_impl(ReroutingState& st, bool tolerate_stall) {
    const Graph& g = st.graph();
    u32 n = g.n();
    u32 s = st.scheme().s(), t = st.scheme().t(), k = st.scheme().k();
    u32 ell = st.family_size();
    BitBudget* budget = st.scheme().budget();
    u32 L = path_stride(k);
    PathDataScheme out(g, s, t, k, budget);
    out.begin_rebuild(ell);
    if (ell == 0) return out;

    // --- sweep: one moving frontier per path, advancing where exactly one
    // --- neighbor is still undecided; every L(k) advances flush the whole
    // --- frontier into the boundary.
    BitVec bprime(n, budget, "rebuild/boundary");
    BitVec decided(n, budget, "rebuild/decided");
    std::vector<u32> S(ell), dcnt(ell, 0);
    std::vector<char> done(ell, 0);
    std::vector<u32> fpos(n + 1, 0);  // frontier membership: vertex -> path index + 1
    BudgetLease sweep_lease(budget, "rebuild/sweep", (u64(n) + 4 * ell + 8) * 32);
    for (u32 i = 0; i < ell; ++i) {
        S[i] = st.start_of(i + 1);
        decided.set(S[i]);
        bprime.set(S[i]);
        fpos[S[i]] = i + 1;
    }
    auto undecided = [&](u32 v) {
        u32 c = 0;
        for (u32 j = 1; j <= g.deg(v); ++j) {
            u32 w = g.head(v, j);
            if (st.in_family(w) && !decided.get(w)) ++c;
        }
        return c;
    };
    for (u32 i = 0; i < ell; ++i) {
        done[i] = st.nav_next(S[i]) == t;
        dcnt[i] = undecided(S[i]);
    }
    u32 advances = 0;
    u32 phases = 0;
    for (;;) {
        SPANTD_CHECK(++phases <= 4 * n + 4 * ell + 8, "frontier sweep does not terminate");
        bool alldone = true;
        for (u32 i = 0; i < ell; ++i) alldone = alldone && done[i] != 0;
        if (alldone) break;
        bool progressed = false;
        for (u32 i = 0; i < ell; ++i) {
            if (done[i] || dcnt[i] != 1) continue;
            u32 v = st.nav_next(S[i]);
            SPANTD_CHECK(!decided.get(v), "sweep advanced onto a decided vertex");
            fpos[S[i]] = 0;
            S[i] = v;
            fpos[v] = i + 1;
            decided.set(v);
            ++advances;
            progressed = true;
            done[i] = st.nav_next(v) == t;
            dcnt[i] = undecided(v);
            for (u32 j = 1; j <= g.deg(v); ++j) {
                u32 fi = fpos[g.head(v, j)];
                if (fi != 0 && fi != i + 1 && !done[fi - 1] && dcnt[fi - 1] > 0) --dcnt[fi - 1];
            }
        }
        if (!progressed) {
            // Deadlocked frontier: advance all unfinished paths together,
            // retreating any whose old position still sees an undecided
            // neighbor outside the tentative frontier.
            std::vector<u32> tent(ell, 0);
            std::vector<char> adv(ell, 0);
            for (u32 i = 0; i < ell; ++i)
                if (!done[i]) {
                    tent[i] = st.nav_next(S[i]);
                    adv[i] = 1;
                    ++advances;
                }
            auto in_tent = [&](u32 w) {
                for (u32 i = 0; i < ell; ++i) {
                    u32 cur = (!done[i] && adv[i]) ? tent[i] : S[i];
                    if (cur == w) return true;
                }
                return false;
            };
            for (bool changed = true; changed;) {
                changed = false;
                for (u32 i = 0; i < ell; ++i) {
                    if (done[i] || !adv[i]) continue;
                    bool retreat = dcnt[i] > ell;
                    u32 u = S[i];
                    for (u32 j = 1; j <= g.deg(u) && !retreat; ++j) {
                        u32 w = g.head(u, j);
                        if (st.in_family(w) && !decided.get(w) && !in_tent(w)) retreat = true;
                    }
                    if (retreat) {
                        adv[i] = 0;
                        --advances;
                        changed = true;
                    }
                }
            }
            u32 nadv = 0;
            for (u32 i = 0; i < ell; ++i) nadv += !done[i] && adv[i];
            if (nadv == 0) {
                if (!tolerate_stall)
                    fail("path storage rebuild stalled: the stored family is not clean");
                for (u32 i = 0; i < ell; ++i)
                    if (!done[i] && !adv[i]) {
                        adv[i] = 1;
                        ++advances;
                    }
            }
            for (u32 i = 0; i < ell; ++i) {
                if (done[i] || !adv[i]) continue;
                SPANTD_CHECK(!decided.get(tent[i]), "sweep advanced onto a decided vertex");
                fpos[S[i]] = 0;
                S[i] = tent[i];
                fpos[S[i]] = i + 1;
                decided.set(S[i]);
                done[i] = st.nav_next(S[i]) == t;
            }
            for (u32 i = 0; i < ell; ++i)
                if (!done[i]) dcnt[i] = undecided(S[i]);
        }
        if (advances > L) {
            for (u32 i = 0; i < ell; ++i) bprime.set(S[i]);
            advances = 0;
        }
    }
    for (u32 i = 0; i < ell; ++i) bprime.set(S[i]);
    for (u32 v = 1; v <= n; ++v)
        if (st.in_family(v) && g.deg(v) > L) bprime.set(v);

    // --- propagation, run twice: the census run only collects the key set,
    // --- then the table is sized and the fill run writes numbering, table
    // --- entries, and anchors. Both runs walk the identical region flows.
    BitVec keysbv(n, budget, "rebuild/keys");
    for (int pass = 0; pass < 2; ++pass) {
        BitVec assigned(n, budget, "rebuild/assigned");
        std::vector<u32> endv(ell, 0);
        std::vector<u32> markv(n + 1, 0);
        u32 epoch = 0;
        struct Item {
            u32 v, color, phase, pred;
        };
        std::deque<Item> q;
        for (u32 c = 1; c <= ell; ++c) q.push_back({st.start_of(c), c, 1, 0});
        auto key = [&](u32 v) {
            if (pass == 0) keysbv.set(v);
        };
        auto setnum = [&](u32 v, u32 ph) {
            if (pass == 1) out.set_numbering(v, ph);
        };
        auto settab = [&](u32 v, const PathDataScheme::TableEntry& e) {
            if (pass == 1) out.set_table(v, e);
        };
        u32 processed = 0;
        while (!q.empty()) {
            Item it = q.front();
            q.pop_front();
            SPANTD_CHECK(++processed <= 2 * n + 4, "stitched family navigation cycles");
            u32 v = it.v;
            SPANTD_CHECK(bprime.get(v), "propagation reached a non-boundary vertex directly");
            SPANTD_CHECK(!assigned.get(v), "two stored paths claim one vertex");
            assigned.set(v);
            key(v);
            setnum(v, it.phase);
            u32 u = st.nav_next(v);
            if (u == t) {
                settab(v, {it.color, false, false, adjacency_position(g, v, it.pred), 0});
                endv[it.color - 1] = v;
                continue;
            }
            if (bprime.get(u)) {
                settab(v, {it.color, false, false, adjacency_position(g, v, it.pred),
                           adjacency_position(g, v, u)});
                q.push_back({u, it.color, PathNumbering::succ_phase(it.phase), v});
                continue;
            }
            // Region crossing: collect the component of u among unassigned
            // non-boundary family vertices and re-run the regional flow.
            ++epoch;
            std::vector<u32> comp{u}, bfsq{u};
            markv[u] = epoch;
            size_t qi = 0;
            while (qi < bfsq.size()) {
                u32 x = bfsq[qi++];
                for (u32 j = 1; j <= g.deg(x); ++j) {
                    u32 w = g.head(x, j);
                    if (w == s || w == t) continue;
                    if (!st.in_family(w) || bprime.get(w) || markv[w] == epoch) continue;
                    markv[w] = epoch;
                    comp.push_back(w);
                    bfsq.push_back(w);
                }
            }
            std::sort(comp.begin(), comp.end());
            std::vector<u32> srcs, snks;
            for (u32 x : comp) {
                u32 pv = st.nav_prev(x);
                if (pv != s && bprime.get(pv)) srcs.push_back(x);
                u32 nx = st.nav_next(x);
                if (nx != t && bprime.get(nx)) snks.push_back(x);
            }
            SPANTD_CHECK(!srcs.empty() && srcs.size() == snks.size(),
                         "region crossings out of balance");
            RegionPaths rp = region_paths(g, comp, srcs, snks, budget);
            const std::vector<u32>* myroute = nullptr;
            for (const auto& rt : rp.routes)
                if (rt.front() == u) {
                    myroute = &rt;
                    break;
                }
            SPANTD_CHECK(myroute != nullptr, "entry vertex missing from the regional flow");
            settab(v, {it.color, false, false, adjacency_position(g, v, it.pred),
                       adjacency_position(g, v, u)});
            u32 ph = it.phase;
            for (u32 x : *myroute) {
                ph = PathNumbering::succ_phase(ph);
                SPANTD_CHECK(!assigned.get(x), "two stored paths claim one vertex");
                assigned.set(x);
                setnum(x, ph);
            }
            u32 entry = myroute->front(), exitv = myroute->back();
            u32 after = st.nav_next(exitv);
            SPANTD_CHECK(after == t || bprime.get(after), "region exit does not meet the boundary");
            key(entry);
            if (myroute->size() == 1) {
                settab(entry, {it.color, true, true, adjacency_position(g, entry, v),
                               after == t ? 0 : adjacency_position(g, entry, after)});
            } else {
                settab(entry, {it.color, true, false, adjacency_position(g, entry, v),
                               adjacency_position(g, entry, (*myroute)[1])});
                key(exitv);
                settab(exitv,
                       {it.color, false, true,
                        adjacency_position(g, exitv, (*myroute)[myroute->size() - 2]),
                        after == t ? 0 : adjacency_position(g, exitv, after)});
            }
            if (after == t) {
                endv[it.color - 1] = exitv;
            } else {
                q.push_back({after, it.color, PathNumbering::succ_phase(ph), exitv});
            }
        }
        if (pass == 0) {
            out.set_boundary(bprime);
            out.reserve_table(keysbv);
        } else {
            for (u32 c = 1; c <= ell; ++c) {
                SPANTD_CHECK(endv[c - 1] != 0, "a stored path never reached t");
                out.set_anchor(c, st.start_of(c), endv[c - 1]);
            }
            if (!tolerate_stall) {
                for (u32 v = 1; v <= n; ++v)
                    SPANTD_CHECK(st.in_family(v) == assigned.get(v),
                                 "rebuilt family must cover exactly the surviving vertices");
            }
        }
    }
    return out;
}

PathDataScheme rebuild_scheme(ReroutingState& state) { return rebuild_scheme_impl(state, false); }

RerouteBatchResult reroute_batch(ReroutingState& state) {
    RerouteBatchResult out{&state.patch(), {}, state.scheme().s()};
    bool more = state.repair_batch(true);
    out.cleaned = std::move(state.cleaned_log_);
    state.cleaned_log_.clear();
    for (u32 v : out.cleaned)
        if (!state.clean_area().contains(v)) state.clean_area().add(v);
    if (!more)
        state.frontier_ = state.scheme().t();
    else if (!out.cleaned.empty())
        state.frontier_ = out.cleaned.back();
    out.frontier = state.clean_frontier();
    return out;
}

// ===========================================================================
// Drivers
// ===========================================================================

GoodPathsWitness add_path(const Graph& g, GoodPathsWitness witness, AugmentStep step,
                          BitBudget* budget) {
    SPANTD_CHECK(step.found, "augmentation found no walk");
    ReroutingState rs(g, witness.scheme, std::move(step), budget);
    rs.run_to_completion();
    witness.total_paths += 1;
    return witness;
}

GoodPathsWitness max_disjoint_paths(const Graph& g, u32 s, u32 t, u32 k, BitBudget* budget) {
    SPANTD_CHECK(k >= 1, "path bound must be positive");
    GoodPathsWitness w;
    w.scheme = PathDataScheme(g, s, t, k, budget);
    w.scheme.begin_rebuild(0);
    if (g.has_edge(s, t)) {
        w.trivial = true;
        w.total_paths = 1;
    }
    if (w.total_paths >= k) return w;
    ArcFilter ban = [s, t](u32 a, u32 b) {
        return !((a == s && b == t) || (a == t && b == s));
    };
    SinglePath sp = find_chordless_path(g, s, t, budget, &ban);
    if (!sp.found) return w;
    w.scheme = scheme_from_single_path(g, sp, k, budget);
    w.total_paths += 1;
    while (w.total_paths < k) {
        AugmentStep step = augment(g, w.scheme, budget);
        if (!step.found) break;
        w = add_path(g, std::move(w), std::move(step), budget);
    }
    return w;
}

std::vector<u32> st_separator(const Graph& g, u32 s, u32 t, u32 k, BitBudget* budget) {
    GoodPathsWitness w = max_disjoint_paths(g, s, t, k, budget);
    if (w.total_paths == 0) return {};
    AugmentStep extra = augment(g, w.scheme, budget);
    if (extra.found) {
        SPANTD_CHECK(w.total_paths == u64(w.scheme.paths()) + (w.trivial ? 1 : 0) &&
                         w.total_paths == k,
                     "augmentation succeeded below the bound");
        throw TreewidthExceeded(static_cast<int>(k));
    }
    ResidualView rv(g);
    auto processed = [&](u32 v) {
        return extra.visited.get(rv.in_copy(v)) || extra.visited.get(rv.out_copy(v));
    };
    std::vector<u32> sep;
    for (u32 c = 1; c <= w.scheme.paths(); ++c) {
        u32 lastz = 0;
        u32 v = w.scheme.start_of(c);
        u32 first = v;
        u32 guard = 0;
        for (;;) {
            SPANTD_CHECK(++guard <= g.n() + 2, "stored path does not reach its end");
            if (processed(v)) lastz = v;
            if (v == w.scheme.end_of(c)) break;
            v = w.scheme.next(v);
        }
        // When the failed search processed no internal vertex, the path is
        // cut right after s: take its first internal vertex.
        sep.push_back(lastz != 0 ? lastz : first);
    }
    if (w.trivial) sep.push_back(s);
    std::sort(sep.begin(), sep.end());
    sep.erase(std::unique(sep.begin(), sep.end()), sep.end());
    SPANTD_CHECK(sep.size() == w.total_paths, "separator must take one vertex per path");
    BitVec skip(g.n(), budget, "paths/separator_check");
    for (u32 v : sep) skip.set(v);
    bool has_endpoint = skip.get(s) || skip.get(t);
    bool reach = false;
    if (!has_endpoint)
        bfs(g, {s}, &skip, [&](u32 v, u32) { reach = reach || v == t; }, budget);
    SPANTD_CHECK(has_endpoint || !reach, "separator fails to disconnect the endpoints");
    return sep;
}

}  // namespace spantd
