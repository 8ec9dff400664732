#pragma once

// Brute-force reference implementations used by the test suite. This
// library shares nothing with the main algorithms: it has its own graph
// type, its own file parsers, and no space discipline. Everything here
// favors obvious correctness over speed and enforces small size caps.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spanoracle {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

struct OGraph {
    u32 n = 0;
    std::vector<std::vector<u32>> adj;  // 1-indexed; adj[0] unused

    OGraph() = default;
    explicit OGraph(u32 n_) { init(n_); }
    void init(u32 n_) {
        n = n_;
        adj.assign(n + 1, {});
    }
    void add_edge(u32 u, u32 v);
    bool has_edge(u32 u, u32 v) const;
    u64 m() const;
    std::vector<std::pair<u32, u32>> edges() const;
};

// --- .gr / .td parsing (independent of the main pipeline's parsers) ---

OGraph parse_gr(std::istream& in);
OGraph parse_gr_file(const std::string& path);
std::string write_gr(const OGraph& g);

struct TDBags {
    u32 nbags = 0;
    u32 declared_width_plus1 = 0;
    u32 n = 0;
    std::vector<std::vector<u32>> bags;  // 1-indexed by bag id
    std::vector<std::pair<u32, u32>> tree_edges;
};

TDBags parse_td(std::istream& in);
TDBags parse_td_file(const std::string& path);

// --- disjoint paths / separators ---

// Maximum number of pairwise internally vertex-disjoint s-t paths
// (vertex-split max-flow). If cap >= 0, stops once the flow reaches cap.
int max_disjoint_paths(const OGraph& g, u32 s, u32 t, int cap = -1);

// One optimal family of pairwise internally vertex-disjoint s-t paths,
// each given as a full vertex sequence from s to t.
std::vector<std::vector<u32>> disjoint_path_family(const OGraph& g, u32 s, u32 t);

// True if removing `removed` (none of which may be s or t) leaves s and t
// in different components.
bool separates(const OGraph& g, const std::vector<u32>& removed, u32 s, u32 t);

// Size of a minimum s-t vertex cut by subset enumeration (requires
// {s,t} not an edge; n <= 20).
int min_vertex_cut_brute(const OGraph& g, u32 s, u32 t);

// --- goodness of path families ---

struct GoodnessReport {
    bool well_formed = true;
    bool disjoint = true;
    bool chordless = true;
    bool no_extended_deadlock = true;
    std::string detail;
    bool all() const { return well_formed && disjoint && chordless && no_extended_deadlock; }
};

// Checks that the family is pairwise internally vertex-disjoint, each path
// chordless, and that no extended deadlock cycle exists (exhaustive search
// over subpath selections linked by cross edges). An edge {s,t} is treated
// as its own trivial path and is not counted as a chord of longer paths.
GoodnessReport goodness_verify(const OGraph& g, const std::vector<std::vector<u32>>& paths,
                               u32 s, u32 t);

// --- exact treewidth and exact problem optima ---

int brute_treewidth(const OGraph& g);  // n <= 12

enum class Problem { VC, IS, DS, MAXCUT, QCOLOR };

Problem problem_from_name(const std::string& name);
std::string problem_name(Problem p);

// Exact optimum by exhaustive search (n <= 20): minimum vertex cover,
// maximum independent set, minimum dominating set, maximum cut, or
// q-colorability (1 feasible / 0 infeasible).
i64 brute_solve(const OGraph& g, Problem p, int q = 0);

// --- tree decomposition validation ---

struct TDReport {
    bool shape_ok = true;       // tree edges form a tree; header counts consistent
    bool td1_vertices = true;   // every vertex in some bag
    bool td1_edges = true;      // every edge inside some bag
    bool td2 = true;            // bags holding any vertex induce a connected subtree
    bool width_ok = true;       // max bag size - 1 <= 8k+6 and header matches
    bool binary_ok = true;      // rooted at bag 1, every node has <= 2 children
    bool height_ok = true;      // root-leaf edge count <= 3*log2(n) + 2
    u32 width = 0;
    u32 height = 0;
    std::string detail;
    bool all() const {
        return shape_ok && td1_vertices && td1_edges && td2 && width_ok && binary_ok &&
               height_ok;
    }
};

TDReport td_validate(const TDBags& td, const OGraph& g, int k);

// --- instance generators (deterministic in the seed) ---

OGraph gen_ktree(u32 n, u32 k, u64 seed);
OGraph gen_partial_ktree(u32 n, u32 k, double keep, u64 seed);
OGraph gen_gnp(u32 n, double p, u64 seed);
OGraph gen_path(u32 n);
OGraph gen_cycle(u32 n);
OGraph gen_clique(u32 n);
OGraph gen_grid(u32 rows, u32 cols);

}  // namespace spanoracle
