#pragma once

#include <memory>
#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/graph.hpp"

namespace spantd {

// Stack of nested subgraphs over a fixed base graph. Each level stores a
// vertex bitmap and an arc bitmap over its parent's index spaces; vertex
// and arc names are dense ranks, so translation between adjacent levels
// is one rank/select each way. Untuned levels answer deg/head by chaining
// translations down to the base; toptune materializes an adjacency-array
// copy of the top level so subsequent accesses stop chaining. Caches stay
// alive for ancestor levels, so a pop restores an already-tuned parent.
class SubgraphStack {
public:
    explicit SubgraphStack(const Graph& g, BitBudget* budget = nullptr);
    ~SubgraphStack();
    SubgraphStack(const SubgraphStack&) = delete;
    SubgraphStack& operator=(const SubgraphStack&) = delete;

    u32 depth() const { return static_cast<u32>(levels_.size()); }
    u32 n_at(u32 level) const;
    u64 m_at(u32 level) const;
    const GraphView& at(u32 level) const;
    const GraphView& top() const { return at(depth()); }
    u32 top_n() const { return n_at(depth()); }
    u64 top_m() const { return m_at(depth()); }

    // keep_vertices is sized to the top's vertex count, keep_arcs to the
    // top's arc count (2m); kept arcs must join kept vertices.
    void push(const BitVec& keep_vertices, const BitVec& keep_arcs);
    // Convenience: keep exactly the arcs joining two kept vertices.
    void push_induced(const BitVec& keep_vertices);
    void pop();
    void toptune();
    bool top_tuned() const;

    u32 deg_at(u32 level, u32 v) const;
    u32 head_at(u32 level, u32 v, u32 j) const;

    u32 orig_of(u32 v) const;        // top name -> base name
    u32 top_of(u32 orig) const;      // base name -> top name, 0 if absent
    u32 name_down(u32 level, u32 v) const;  // level name -> base name
    u32 name_up(u32 level, u32 orig) const; // base name -> level name, 0 if absent

    // Number of cross-level translation hops performed so far; used by
    // tests to confirm that tuned access does not chain.
    u64 chain_ops() const { return chain_ops_; }

private:
    struct LevelView;
    struct Level {
        BitVec verts;
        BitVec arcs;
        u32 nv = 0;
        u64 na = 0;
        bool tuned = false;
        std::vector<u64> t_off;
        std::vector<u32> t_heads;
        BudgetLease t_lease;
        std::unique_ptr<LevelView> view;
    };

    std::pair<u64, u64> slice(u32 level, u32 v) const;  // 1-based inclusive arc range

    const Graph* g0_;
    BitBudget* budget_;
    std::vector<Level> levels_;
    mutable u64 chain_ops_ = 0;
};

// Space-lean variant: levels keep only their vertex bitmap plus O(k)
// "incomplete" vertices (those missing arcs relative to the base graph)
// and a small bit matrix M of the edges among them. Complete vertices
// answer deg/head straight from the base graph through name translation;
// incomplete vertices only support cursor iteration, which scans complete
// vertices' base neighborhoods and reads M for incomplete neighbors.
class MinimalSubgraphStack {
public:
    MinimalSubgraphStack(const Graph& g, u32 max_incomplete, BitBudget* budget = nullptr);
    ~MinimalSubgraphStack();
    MinimalSubgraphStack(const MinimalSubgraphStack&) = delete;
    MinimalSubgraphStack& operator=(const MinimalSubgraphStack&) = delete;

    u32 depth() const { return static_cast<u32>(levels_.size()); }
    u32 n_at(u32 level) const;
    const GraphView& at(u32 level) const;
    const GraphView& top() const { return at(depth()); }
    u32 top_n() const { return n_at(depth()); }

    // new_incomplete must contain every inherited incomplete vertex that
    // survives plus the new separator; both arguments use top names.
    void minimal_push(const BitVec& keep_vertices, const BitVec& new_incomplete);
    void pop();

    bool incomplete_at(u32 level, u32 v) const;
    const std::vector<u32>& incomplete_list() const;  // top names, ascending

    u32 deg_at(u32 level, u32 v) const;        // complete vertices only
    u32 head_at(u32 level, u32 v, u32 j) const;
    u64 list_first(u32 level, u32 v) const;    // cursor interface for any vertex
    u32 list_head(u32 level, u32 v, u64 cur) const;
    u64 list_next(u32 level, u32 v, u64 cur) const;

    u32 orig_of(u32 v) const;
    u32 top_of(u32 orig) const;
    u32 name_down(u32 level, u32 v) const;
    u32 name_up(u32 level, u32 orig) const;

    u64 alloc_bits() const;

private:
    struct MLevelView;
    struct MLevel {
        BitVec verts;
        u32 nv = 0;
        std::vector<u32> inc;  // incomplete, level names, ascending
        BitVec inc_marks;
        BitVec M;  // r x r, row-major, 1-indexed via (a*r + b + 1)
        BudgetLease lease;
        std::unique_ptr<MLevelView> view;
    };

    u32 inc_row(u32 level, u32 v) const;  // index into inc, or UINT32_MAX
    u64 advance_complete_scan(u32 level, u32 v_orig, u32 u, u32 j) const;
    u64 advance_matrix_scan(u32 level, u32 v, u32 idx) const;

    const Graph* g0_;
    BitBudget* budget_;
    u32 max_incomplete_;
    std::vector<MLevel> levels_;
    std::vector<u32> empty_;
};

}  // namespace spantd
