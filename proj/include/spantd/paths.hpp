#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/choice_dict.hpp"
#include "spantd/graph.hpp"

namespace spantd {

// Region/stride constant: max(2, ceil(k*log2(k))). Controls the boundary
// stride, the large-degree threshold, and the region-size acceptance.
u32 path_stride(u32 k);

// Patch-map capacity used while rerouting: ceil(n / ceil(log2(k+1))).
u64 patch_capacity(u32 n, u32 k);

// ---------------------------------------------------------------------------
// Residual split view: directed graph where every vertex v of the base
// graph becomes an in-copy v and an out-copy v+n joined by the arc
// (v, v+n), and every undirected edge {u,v} contributes the arcs
// (u+n, v) and (v+n, u). All queries are answered by formula in constant
// time; nothing is materialized. n' = 2n, m' = 2m + n.
// ---------------------------------------------------------------------------
class ResidualView {
public:
    explicit ResidualView(const Graph& g) : g_(&g) {}

    u32 base_n() const { return g_->n(); }
    u32 n() const { return 2 * g_->n(); }
    u64 m() const { return 2 * g_->m() + g_->n(); }

    bool is_out_copy(u32 x) const { return x > g_->n(); }
    u32 base_vertex(u32 x) const { return is_out_copy(x) ? x - g_->n() : x; }
    u32 in_copy(u32 v) const { return v; }
    u32 out_copy(u32 v) const { return v + g_->n(); }

    u32 deg_out(u32 x) const;
    u32 head_out(u32 x, u32 j) const;  // j in 1..deg_out(x)
    u32 deg_in(u32 x) const;
    u32 head_in(u32 x, u32 j) const;  // j in 1..deg_in(x)

    const Graph& base() const { return *g_; }

private:
    const Graph* g_;
};

// ---------------------------------------------------------------------------
// Path numbering: two bits per vertex. 0 = on no stored path; internal
// vertices of a path carry 1,2,3,1,2,3 along the path, so a successor
// always has value (A[v] mod 3) + 1 and a predecessor never does.
// ---------------------------------------------------------------------------
class PathNumbering {
public:
    PathNumbering() = default;
    PathNumbering(u32 n, BitBudget* budget, const char* tag = "path_numbering")
        : n_(n), bits_(2 * u64(n), budget, tag) {}

    u32 n() const { return n_; }
    u32 get(u32 v) const {
        check(v);
        return static_cast<u32>(bits_.get(2 * u64(v) - 1)) |
               (static_cast<u32>(bits_.get(2 * u64(v))) << 1);
    }
    void set(u32 v, u32 a) {
        check(v);
        SPANTD_CHECK(a <= 3, "path numbering value out of range");
        bits_.set(2 * u64(v) - 1, a & 1u);
        bits_.set(2 * u64(v), (a >> 1) & 1u);
    }
    static u32 succ_phase(u32 a) { return (a % 3) + 1; }
    u64 alloc_bits() const { return bits_.alloc_bits(); }

private:
    void check(u32 v) const { SPANTD_CHECK(v >= 1 && v <= n_, "vertex out of range"); }

    u32 n_ = 0;
    BitVec bits_;
};

// A single chordless s-t path: the numbering plus endpoint anchors. The
// direct edge {s,t} is the trivial path: empty interior, A all zero.
struct SinglePath {
    bool found = false;
    bool trivial = false;
    u32 s = 0, t = 0;
    u32 first = 0, last = 0;  // first/last internal vertex; 0 when trivial
    u32 internal_count = 0;
    PathNumbering A;

    // Materializes s,...,t (test/CLI aid; walks by numbering phase).
    std::vector<u32> vertices(const Graph& g) const;
};

// Arc filter: returns true if the undirected edge {u,v} may be used in
// the direction u -> v. Applied to every edge use, including chord scans.
using ArcFilter = std::function<bool(u32 u, u32 v)>;

// DFS to t, then backward removal of skippable subpaths: every processed
// vertex jumps to its deepest usable predecessor on the stack, dropping
// what lies between. Returns found=false when t is unreachable under the
// filter. A direct edge {s,t} yields the trivial path.
SinglePath find_chordless_path(const Graph& g, u32 s, u32 t, BitBudget* budget = nullptr,
                               const ArcFilter* filter = nullptr);

// ---------------------------------------------------------------------------
// Deterministic regional flow: connects each source to a sink inside the
// region by unit-vertex-capacity augmentation, augmenting from sources in
// ascending local id with ascending adjacency scans. Pure function of
// (region, sources, sinks): reruns produce identical output.
// ---------------------------------------------------------------------------
struct RegionPaths {
    // One entry per source, each a vertex sequence source..sink (a single
    // vertex when source == sink); pairwise vertex-disjoint.
    std::vector<std::vector<u32>> routes;
};

RegionPaths region_paths(const Graph& g, const std::vector<u32>& region,
                         const std::vector<u32>& sources, const std::vector<u32>& sinks,
                         BitBudget* budget = nullptr);

// ---------------------------------------------------------------------------
// Path data scheme: numbering A, boundary B, and a packed table C over the
// boundary and its path neighbors. B holds every path_stride(k)-th vertex
// of every stored path plus all vertices of degree > path_stride(k), so
// removing B leaves regions of at most 4*path_stride(k) vertices. C gives
// each table vertex its path color, its role relative to its region
// (boundary member / region entry / region exit), and the adjacency
// positions of its path predecessor and successor, which pins the stored
// family without per-vertex pointers. Interior vertices are answered by
// re-running the regional flow, so the table is only sound if the fixed
// flow routine reconnects exactly the stored routes; rebuilds construct C
// from those routes, never from inference.
// ---------------------------------------------------------------------------
class PathDataScheme {
public:
    PathDataScheme() = default;
    PathDataScheme(const Graph& g, u32 s, u32 t, u32 k, BitBudget* budget);

    u32 n() const { return n_; }
    u32 s() const { return s_; }
    u32 t() const { return t_; }
    u32 k() const { return k_; }
    u32 paths() const { return ell_; }

    // Stored-path anchors, indexed by color-1. start = first internal
    // vertex (a neighbor of s), end = last internal vertex.
    u32 start_of(u32 color) const;
    u32 end_of(u32 color) const;

    bool on_path(u32 v) const { return A_.get(v) != 0; }
    u32 numbering(u32 v) const { return A_.get(v); }
    bool boundary(u32 v) const { return B_.get(v); }

    // Stored-path navigation. prev/next return s/t at the path ends.
    // Boundary and table vertices answer from C; interior vertices load
    // their region, classify its entries and exits from C, re-run the
    // regional flow, and walk the recovered route.
    u32 next(u32 v) const;
    u32 prev(u32 v) const;
    u32 color(u32 v) const;

    u64 alloc_bits() const;
    std::string storage_report() const;

    // --- construction interface used by the engine ---
    struct TableEntry {
        u32 color = 0;
        bool entry = false;    // region entry: path predecessor is boundary
        bool exit = false;     // region exit: path successor is boundary
        u32 pred_idx = 0;      // adjacency position of path predecessor, 0 = s
        u32 succ_idx = 0;      // adjacency position of path successor, 0 = t
    };
    void begin_rebuild(u32 ell);
    void set_numbering(u32 v, u32 a) { A_.set(v, a); }
    void set_boundary(const BitVec& b);
    void reserve_table(const BitVec& keys);
    void set_table(u32 v, const TableEntry& e);
    void set_anchor(u32 color, u32 start, u32 end);
    bool table_has(u32 v) const;
    TableEntry table(u32 v) const;

    const Graph& graph() const { return *g_; }
    BitBudget* budget() const { return budget_; }

private:
    u32 region_route(u32 v, std::vector<u32>* route_out) const;
    u32 adjacency_index(u32 v, u32 target) const;

    const Graph* g_ = nullptr;
    BitBudget* budget_ = nullptr;
    u32 n_ = 0, s_ = 0, t_ = 0, k_ = 0, ell_ = 0;
    PathNumbering A_;
    BitVec B_;
    // Key bitmap lives behind a stable address: the table holds a pointer
    // to it, so the scheme stays movable.
    std::unique_ptr<BitVec> keys_;
    StaticAlloc table_;
    u32 entry_bits_ = 0;
    std::vector<u32> starts_, ends_;
    // One-region memo for consecutive interior queries along a walk.
    mutable struct {
        bool valid = false;
        std::vector<u32> region;                // sorted
        std::vector<std::vector<u32>> routes;
        std::vector<u32> colors;                // per route
    } cache_;
};

// Builds the scheme for one stored chordless s-t path: boundary = every
// path_stride(k)-th internal vertex plus every large-degree vertex.
PathDataScheme scheme_from_single_path(const Graph& g, const SinglePath& p, u32 k,
                                       BitBudget* budget);

// ---------------------------------------------------------------------------
// Rerouting overlay: surviving-vertex mask plus capped successor and
// predecessor overrides recorded against a base scheme. The public view
// reports override colors (0 = unchanged); navigation resolves overrides
// to the recorded neighbor.
// ---------------------------------------------------------------------------
class Rerouting {
public:
    Rerouting() = default;
    Rerouting(u32 n, u32 k, BitBudget* budget);

    bool in_vstar(u32 v) const { return vstar_.get(v); }
    void drop(u32 v) { vstar_.set(v, false); }
    void restore(u32 v) { vstar_.set(v, true); }
    const BitVec& vstar() const { return vstar_; }

    void set_next(u32 v, u32 target);
    void set_prev(u32 v, u32 target);
    bool has_next(u32 v) const { return next_pos_[v] != 0; }
    bool has_prev(u32 v) const { return prev_pos_[v] != 0; }
    u32 next_target(u32 v) const;
    u32 prev_target(u32 v) const;

    // Override colors as stored by the scheme of record (0 = no entry).
    u32 rnext(u32 v, const PathDataScheme& base) const;
    u32 rprev(u32 v, const PathDataScheme& base) const;

    u64 entries() const { return next_keys_.size() + prev_keys_.size(); }
    u64 capacity() const { return cap_; }
    void clear_overrides();
    u64 alloc_bits() const;

private:
    BitVec vstar_;
    std::vector<u32> next_pos_, prev_pos_;  // vertex -> 1-based slot
    std::vector<u32> next_keys_, next_vals_, prev_keys_, prev_vals_;
    u64 cap_ = 0;
    BudgetLease lease_;
};

// ---------------------------------------------------------------------------
// Good family witness: the stored paths plus the trivial direct edge flag.
// total_paths counts both; the scheme stores only the non-trivial ones.
// ---------------------------------------------------------------------------
struct GoodPathsWitness {
    u32 total_paths = 0;
    bool trivial = false;  // the direct {s,t} edge used as one path
    PathDataScheme scheme;

    // Materialized stored paths (s..t each), indexed by color-1.
    std::vector<std::vector<u32>> stored_paths() const;
};

// ---------------------------------------------------------------------------
// Augmentation: one depth-first search over the residual split view of the
// stored family, arcs of each split vertex presented out-arcs first, flow
// and blocked arcs skipped, direct s-t arcs excluded. The found route is
// made chordless in split space by the same backward removal as
// find_chordless_path and returned as a marked, phase-numbered walk over
// split vertices.
// ---------------------------------------------------------------------------
struct AugmentStep {
    bool found = false;
    u32 base_n = 0;
    BitVec mark;         // over split vertices 1..2n
    PathNumbering order; // walk phases over split vertices
    BitVec visited;      // split vertices processed by the search
    u32 walk_len = 0;
    // Explicit walk sequence plus 1-based positions; phase scans alone are
    // ambiguous when a usable backward arc lands at walk distance 1 mod 3.
    std::vector<u32> walk;
    std::vector<u32> wpos;
    BudgetLease scratch_lease;  // accounts the two vectors above

    // Walk navigation: successor/predecessor of split vertex x (0 at ends).
    u32 walk_next(u32 x) const;
    u32 walk_prev(u32 x) const;
    // True when the merged base-graph projection visits no vertex twice.
    bool merged_simple() const;
    // Merged projection as a numbering (requires merged_simple).
    SinglePath merged(BitBudget* budget) const;
};

AugmentStep augment(const Graph& g, const PathDataScheme& scheme, BitBudget* budget);

struct RerouteBatchResult;

// ---------------------------------------------------------------------------
// Rerouting engine state: the augmentation walk overlaid on the base
// scheme plus accumulated overrides. Exposes the combined navigation the
// repair passes and the rebuild consume.
// ---------------------------------------------------------------------------
class ReroutingState {
public:
    ReroutingState(const Graph& g, PathDataScheme& scheme, AugmentStep step, BitBudget* budget);

    u32 family_size() const { return ell_; }
    bool in_family(u32 v) const { return patch_.in_vstar(v); }
    u32 nav_next(u32 v) const;
    u32 nav_prev(u32 v) const;
    u32 start_of(u32 color) const { return starts_[color - 1]; }
    u32 end_of(u32 color) const { return ends_[color - 1]; }

    Rerouting& patch() { return patch_; }
    const Rerouting& patch() const { return patch_; }
    ChoiceDict& clean_area() { return clean_; }
    u32 clean_frontier() const { return frontier_; }

    bool walk_absorbed() const { return !walk_live_; }

    // Applies one repair batch; returns true while work remains. Stops
    // early once the override maps reach their capacity. strict reports
    // an error if an extended deadlock survives among supposedly clean
    // paths instead of destroying it.
    bool repair_batch(bool strict);

    // Folds the current navigation into a fresh scheme, clearing the walk
    // overlay and the overrides.
    void rebuild();

    // Repair-and-rebuild driver; bounded by O(log k) rebuild rounds.
    void run_to_completion();

    const Graph& graph() const { return *g_; }
    PathDataScheme& scheme() { return *scheme_; }

private:
    friend PathDataScheme rebuild_scheme_impl(ReroutingState& st, bool tolerate_stall);
    friend RerouteBatchResult reroute_batch(ReroutingState& state);

    bool chordless_pass(std::vector<u32>& dirty, std::vector<u32>* cleaned);
    bool destroy_one_extended_cycle(bool strict);
    void shortcut_path(u32 color, const std::vector<u32>& new_route,
                       const std::vector<u32>& old_route);
    std::vector<u32> route_of(u32 color) const;

    const Graph* g_ = nullptr;
    PathDataScheme* scheme_ = nullptr;
    BitBudget* budget_ = nullptr;
    ResidualView rv_;
    AugmentStep step_;
    bool walk_live_ = false;
    u32 ell_ = 0;  // family size including the new path
    Rerouting patch_;
    ChoiceDict clean_;
    u32 frontier_ = 0;
    std::vector<u32> starts_, ends_;
    std::vector<u32> dirty_;
    std::vector<char> ever_dirty_;  // per color; guards the strict mode
    std::vector<u32> cleaned_log_;  // drained by reroute_batch
};

// One batch of the rerouting loop over explicit state, per the engine's
// staged contract: processes touch structures of the new path against the
// stored family, filling the override maps up to their capacity.
// Returns the override view, the vertices cleaned this batch, and the new
// clean frontier (t once the family verifies clean).
struct RerouteBatchResult {
    const Rerouting* overrides;
    std::vector<u32> cleaned;
    u32 frontier;
};
RerouteBatchResult reroute_batch(ReroutingState& state);

// Rebuilds a full scheme from the combined navigation: boundary by the
// moving-separator sweep from the neighbors of s toward t with per-path
// undecided counters and the simultaneous-advance deadlock case, colors
// propagated region by region through the deterministic flow, table sized
// by a census pass before the filling pass. Errors if the sweep stalls
// while the family is supposed to be clean.
PathDataScheme rebuild_scheme(ReroutingState& state);

// Adds the walk found by augment to the witness: alternates repair
// batches and rebuilds until the family verifies clean, then installs the
// final scheme. Returns the enlarged witness.
GoodPathsWitness add_path(const Graph& g, GoodPathsWitness witness, AugmentStep step,
                          BitBudget* budget);

// Up to k pairwise internally vertex-disjoint chordless s-t paths; a
// direct {s,t} edge counts as one trivial path kept outside the scheme.
GoodPathsWitness max_disjoint_paths(const Graph& g, u32 s, u32 t, u32 k,
                                    BitBudget* budget = nullptr);

// Separator from a saturated family: one more residual search records the
// processed set, and each path contributes its last processed vertex (the
// trivial path contributes s). Errors if the extra search reaches t.
std::vector<u32> st_separator(const Graph& g, u32 s, u32 t, u32 k, BitBudget* budget = nullptr);

}  // namespace spantd
