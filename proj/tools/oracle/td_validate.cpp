#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "oracle/oracle.hpp"

namespace spanoracle {

// Validates a decomposition against its graph: coverage of vertices and
// edges, connectedness of every vertex's bag set, the width bound 8k+6,
// binary shape, and the height bound 3*log2(n) + 2. The tree is rooted at
// bag 1 (the emitter writes the root first); height counts edges.
TDReport td_validate(const TDBags& td, const OGraph& g, int k) {
    TDReport rep;
    std::ostringstream detail;

    if (td.n != g.n) {
        rep.shape_ok = false;
        detail << "vertex count mismatch; ";
    }
    if (td.nbags == 0) {
        rep.shape_ok = false;
        rep.detail = "no bags";
        return rep;
    }
    if (td.tree_edges.size() != td.nbags - 1) {
        rep.shape_ok = false;
        detail << "tree edge count " << td.tree_edges.size() << " for " << td.nbags
               << " bags; ";
    }
    std::vector<std::vector<u32>> tadj(td.nbags + 1);
    for (auto [a, b] : td.tree_edges) {
        tadj[a].push_back(b);
        tadj[b].push_back(a);
    }
    // Connectivity + acyclicity via BFS from bag 1.
    std::vector<u32> parent(td.nbags + 1, 0), depth(td.nbags + 1, 0);
    std::vector<char> seen(td.nbags + 1, 0);
    std::queue<u32> bq;
    bq.push(1);
    seen[1] = 1;
    u32 reached = 0;
    while (!bq.empty()) {
        u32 b = bq.front();
        bq.pop();
        ++reached;
        for (u32 c : tadj[b])
            if (!seen[c]) {
                seen[c] = 1;
                parent[c] = b;
                depth[c] = depth[b] + 1;
                bq.push(c);
            }
    }
    if (reached != td.nbags) {
        rep.shape_ok = false;
        detail << "tree not connected; ";
    }
    if (!rep.shape_ok) {
        rep.detail = detail.str();
        return rep;
    }

    // TD1: vertex and edge coverage.
    std::vector<char> covered(g.n + 1, 0);
    u32 maxbag = 0;
    for (u32 b = 1; b <= td.nbags; ++b) {
        maxbag = std::max<u32>(maxbag, static_cast<u32>(td.bags[b].size()));
        for (u32 v : td.bags[b]) covered[v] = 1;
    }
    for (u32 v = 1; v <= g.n; ++v)
        if (!covered[v]) {
            rep.td1_vertices = false;
            detail << "vertex " << v << " in no bag; ";
        }
    for (auto [u, v] : g.edges()) {
        bool found = false;
        for (u32 b = 1; b <= td.nbags && !found; ++b) {
            const auto& bag = td.bags[b];
            if (std::find(bag.begin(), bag.end(), u) != bag.end() &&
                std::find(bag.begin(), bag.end(), v) != bag.end())
                found = true;
        }
        if (!found) {
            rep.td1_edges = false;
            detail << "edge " << u << "-" << v << " in no bag; ";
        }
    }

    // TD2: bags containing v form a connected subtree.
    std::vector<std::vector<u32>> holding(g.n + 1);
    for (u32 b = 1; b <= td.nbags; ++b)
        for (u32 v : td.bags[b]) holding[v].push_back(b);
    for (u32 v = 1; v <= g.n; ++v) {
        if (holding[v].size() <= 1) continue;
        std::set<u32> members(holding[v].begin(), holding[v].end());
        std::queue<u32> q;
        std::set<u32> vis;
        q.push(holding[v][0]);
        vis.insert(holding[v][0]);
        while (!q.empty()) {
            u32 b = q.front();
            q.pop();
            for (u32 c : tadj[b])
                if (members.count(c) && !vis.count(c)) {
                    vis.insert(c);
                    q.push(c);
                }
        }
        if (vis.size() != members.size()) {
            rep.td2 = false;
            detail << "bags of vertex " << v << " disconnected; ";
        }
    }

    // Width: the header must state the true max bag size, and the bound
    // max bag size - 1 <= 8k+6 must hold.
    rep.width = maxbag == 0 ? 0 : maxbag - 1;
    if (td.declared_width_plus1 != maxbag) {
        rep.width_ok = false;
        detail << "declared width+1 " << td.declared_width_plus1 << " but max bag " << maxbag
               << "; ";
    }
    if (static_cast<int>(rep.width) > 8 * k + 6) {
        rep.width_ok = false;
        detail << "width " << rep.width << " exceeds " << (8 * k + 6) << "; ";
    }

    // Binary, rooted at bag 1 (the root has no parent, so all its
    // neighbors are children).
    for (u32 b = 1; b <= td.nbags; ++b) {
        u32 children = 0;
        for (u32 c : tadj[b])
            if (b == 1 || c != parent[b]) ++children;
        if (children > 2) {
            rep.binary_ok = false;
            detail << "bag " << b << " has " << children << " children; ";
        }
    }

    rep.height = *std::max_element(depth.begin() + 1, depth.end());
    double bound = (g.n <= 1) ? 2.0 : 3.0 * std::log2(double(g.n)) + 2.0;
    if (double(rep.height) > bound) {
        rep.height_ok = false;
        detail << "height " << rep.height << " exceeds " << bound << "; ";
    }

    rep.detail = detail.str();
    return rep;
}

}  // namespace spanoracle
