#pragma once

#include <functional>
#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/graph.hpp"

namespace spantd {

struct DfsCallbacks {
    std::function<void(u32)> preorder;
    std::function<void(u32)> postorder;
    // Fires when control returns to `parent` after `child` finished.
    std::function<void(u32 parent, u32 child)> backtrack;
};

// Instrumentation for the bounded-stack engine: how often each vertex's
// adjacency iteration was started from the front, and how often each
// vertex was touched by a stack-restoration walk.
struct TraversalStats {
    std::vector<u32> list_starts;
    std::vector<u32> restored_hits;
    u32 restorations = 0;
};

// Layered BFS with a 2-bit color array: emits every vertex reachable from
// the roots while avoiding `skip` (may be null), as visit(v, dist), in
// nondecreasing dist with ascending vertex ids inside a layer.
void bfs(const GraphView& g, const std::vector<u32>& roots, const BitVec* skip,
         const std::function<void(u32 v, u32 dist)>& visit, BitBudget* budget = nullptr);

// Iterative DFS holding at most two stack segments; dropped lower
// segments are rebuilt by walking the gray path from the root. Touches
// the view only through the cursor interface, so access-restricted
// vertices are legal everywhere. segment_capacity 0 picks n/log n.
void dfs(const GraphView& g, u32 root, const DfsCallbacks& cb, BitBudget* budget = nullptr,
         u32 segment_capacity = 0, TraversalStats* stats = nullptr);

// DFS from every vertex in ascending id order (spanning forest).
void dfs_forest(const GraphView& g, const DfsCallbacks& cb, BitBudget* budget = nullptr,
                u32 segment_capacity = 0, TraversalStats* stats = nullptr);

// Entry point for views with access-restricted vertices; same engine,
// instrumentation on demand.
void dfs_restricted(const GraphView& g, u32 root, const DfsCallbacks& cb,
                    BitBudget* budget = nullptr, u32 segment_capacity = 0,
                    TraversalStats* stats = nullptr);

// Vertices whose bottom-up descendant count (resetting to zero at every
// mark) exceeds the threshold, computed by two DFS passes over a
// balanced-parentheses image of the forest with in-place self-delimiting
// counters. |result| <= ceil(n/threshold) + 1.
BitVec compute_R(const GraphView& g, u64 threshold, BitBudget* budget = nullptr);

}  // namespace spantd
