#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/common.hpp"

namespace spantd {

// Read interface every graph-shaped structure implements. Vertices are
// 1..n. Unrestricted vertices answer deg/head by position; restricted
// vertices only support cursor iteration (adjfirst/adjhead/adjnext),
// mirroring structures that cannot afford per-vertex adjacency arrays.
class GraphView {
public:
    virtual ~GraphView() = default;
    virtual u32 n() const = 0;
    virtual u32 deg(u32 v) const = 0;
    virtual u32 head(u32 v, u32 j) const = 0;
    virtual bool restricted(u32 v) const {
        (void)v;
        return false;
    }
    // Cursor iteration; cursors are opaque non-zero values, 0 = end.
    virtual u64 adjfirst(u32 v) const { return deg(v) ? 1 : 0; }
    virtual u32 adjhead(u32 v, u64 cur) const { return head(v, static_cast<u32>(cur)); }
    virtual u64 adjnext(u32 v, u64 cur) const { return cur < deg(v) ? cur + 1 : 0; }

    u64 degree_sum() const {
        u64 s = 0;
        for (u32 v = 1; v <= n(); ++v) s += deg(v);
        return s;
    }
};

// The read-only input graph in compressed sparse rows, with arc mates for
// symmetric-arc bookkeeping. Arcs are globally indexed 1..2m in CSR order;
// arc_index(v,j) names the j-th arc of v.
class Graph : public GraphView {
public:
    Graph() = default;
    Graph(u32 n, const std::vector<std::pair<u32, u32>>& edges);

    u32 n() const override { return n_; }
    u64 m() const { return heads_.size() / 2; }
    u32 deg(u32 v) const override {
        check_vertex(v);
        return offsets_[v + 1] - offsets_[v];
    }
    u32 head(u32 v, u32 j) const override {
        check_vertex(v);
        SPANTD_CHECK(j >= 1 && j <= deg(v), "adjacency index out of range");
        return heads_[offsets_[v] + j - 1];
    }
    // Undirected graphs answer in/out queries identically.
    u32 deg_in(u32 v) const { return deg(v); }
    u32 deg_out(u32 v) const { return deg(v); }
    u32 head_in(u32 v, u32 j) const { return head(v, j); }
    u32 head_out(u32 v, u32 j) const { return head(v, j); }

    u64 arc_index(u32 v, u32 j) const {
        check_vertex(v);
        SPANTD_CHECK(j >= 1 && j <= deg(v), "adjacency index out of range");
        return offsets_[v] + j;
    }
    u64 arc_count() const { return heads_.size(); }
    u32 arc_head(u64 a) const { return heads_[a - 1]; }
    u64 arc_mate(u64 a) const { return mate_[a - 1]; }
    // Owner of arc a, by binary search over the offsets.
    u32 arc_tail(u64 a) const;

    bool has_edge(u32 u, u32 v) const;

private:
    void check_vertex(u32 v) const {
        SPANTD_CHECK(v >= 1 && v <= n_, "vertex out of range");
    }

    u32 n_ = 0;
    std::vector<u64> offsets_;  // offsets_[v] = arcs before v's slice; size n+2
    std::vector<u32> heads_;
    std::vector<u64> mate_;
};

// Strict loader for "p tw n m" edge-list files: 1-indexed endpoints,
// comment lines start with 'c', duplicate edges and self-loops rejected,
// declared edge count enforced.
Graph parse_gr(std::istream& in);
Graph parse_gr_file(const std::string& path);
void write_gr_file(const Graph& g, std::ostream& out);

// A view that marks a vertex subset as restricted without changing the
// underlying adjacency. Restricted vertices must be iterated by cursor.
class RestrictedOverlay : public GraphView {
public:
    RestrictedOverlay(const GraphView& base, BitVec marks)
        : base_(&base), marks_(std::move(marks)) {
        SPANTD_CHECK(marks_.size() == base.n(), "restriction mask size mismatch");
    }

    u32 n() const override { return base_->n(); }
    bool restricted(u32 v) const override { return marks_.get(v); }
    u32 deg(u32 v) const override {
        SPANTD_CHECK(!marks_.get(v), "array access to a restricted vertex");
        return base_->deg(v);
    }
    u32 head(u32 v, u32 j) const override {
        SPANTD_CHECK(!marks_.get(v), "array access to a restricted vertex");
        return base_->head(v, j);
    }
    u64 adjfirst(u32 v) const override { return base_->deg(v) ? 1 : 0; }
    u32 adjhead(u32 v, u64 cur) const override { return base_->head(v, static_cast<u32>(cur)); }
    u64 adjnext(u32 v, u64 cur) const override {
        return cur < base_->deg(v) ? cur + 1 : 0;
    }

private:
    const GraphView* base_;
    BitVec marks_;
};

}  // namespace spantd
