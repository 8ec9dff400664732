#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <functional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracle/oracle.hpp"
#include "spantd/graph.hpp"
#include "spantd/traversal.hpp"

using spantd::BitBudget;
using spantd::BitVec;
using spantd::DfsCallbacks;
using spantd::Graph;
using spantd::GraphView;
using spantd::RestrictedOverlay;
using spantd::TraversalStats;
using spantd::u32;
using spantd::u64;

namespace {

Graph from_oracle(const spanoracle::OGraph& og) { return Graph(og.n, og.edges()); }

Graph path_graph(u32 n) {
    std::vector<std::pair<u32, u32>> e;
    for (u32 v = 1; v < n; ++v) e.push_back({v, v + 1});
    return Graph(n, e);
}

// Event trace of a DFS: "+v" preorder, "-v" postorder, "b p<c" backtrack.
std::vector<std::string> dfs_trace(const GraphView& g, u32 root, u32 cap = 0,
                                   TraversalStats* stats = nullptr) {
    std::vector<std::string> out;
    DfsCallbacks cb;
    cb.preorder = [&](u32 v) { out.push_back("+" + std::to_string(v)); };
    cb.postorder = [&](u32 v) { out.push_back("-" + std::to_string(v)); };
    cb.backtrack = [&](u32 p, u32 c) {
        out.push_back("b" + std::to_string(p) + "<" + std::to_string(c));
    };
    spantd::dfs(g, root, cb, nullptr, cap, stats);
    return out;
}

// Reference recursive DFS with identical tie-breaking (cursor order).
void reference_dfs(const GraphView& g, u32 v, std::vector<char>& seen,
                   std::vector<std::string>& out) {
    seen[v] = 1;
    out.push_back("+" + std::to_string(v));
    for (u64 c = g.adjfirst(v); c != 0; c = g.adjnext(v, c)) {
        u32 w = g.adjhead(v, c);
        if (!seen[w]) {
            reference_dfs(g, w, seen, out);
            out.push_back("b" + std::to_string(v) + "<" + std::to_string(w));
        }
    }
    out.push_back("-" + std::to_string(v));
}

std::vector<std::string> reference_trace(const GraphView& g, u32 root) {
    std::vector<char> seen(g.n() + 1, 0);
    std::vector<std::string> out;
    reference_dfs(g, root, seen, out);
    return out;
}

struct UnionFind {
    std::vector<u32> p;
    explicit UnionFind(u32 n) : p(n + 1) {
        for (u32 i = 0; i <= n; ++i) p[i] = i;
    }
    u32 find(u32 x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(u32 a, u32 b) { p[find(a)] = find(b); }
};

// Count-and-reset over an explicit rooted tree: returns the surviving
// count of v's subtree and marks vertices whose count would exceed the
// threshold.
u64 count_reset(const std::vector<std::vector<u32>>& kids, u32 v, u64 thr,
                std::set<u32>& marked) {
    u64 x = 0;
    for (u32 c : kids[v]) x += count_reset(kids, c, thr, marked);
    if (x + 1 > thr) {
        marked.insert(v);
        return 0;
    }
    return x + 1;
}

std::set<u32> bits_of(const BitVec& b) {
    std::set<u32> out;
    for (u64 i = 1; i <= b.size(); ++i)
        if (b.get(i)) out.insert(static_cast<u32>(i));
    return out;
}

}  // namespace

TEST_CASE("bfs visits layers and honors the skip set") {
    Graph g = path_graph(3);
    std::vector<std::pair<u32, u32>> seen;
    auto collect = [&](u32 v, u32 d) { seen.push_back({v, d}); };
    spantd::bfs(g, {1}, nullptr, collect);
    CHECK(seen == std::vector<std::pair<u32, u32>>{{1, 0}, {2, 1}, {3, 2}});

    seen.clear();
    BitVec skip(3);
    skip.set(2);
    spantd::bfs(g, {1}, &skip, collect);
    CHECK(seen == std::vector<std::pair<u32, u32>>{{1, 0}});

    CHECK_THROWS_AS(spantd::bfs(g, {2}, &skip, collect), spantd::Error);
    CHECK_THROWS_AS(spantd::bfs(g, {9}, nullptr, collect), spantd::Error);
}

TEST_CASE("bfs agrees with union-find components and queue distances") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 30; ++trial) {
        spanoracle::OGraph og = spanoracle::gen_gnp(20, 0.2, 600 + trial);
        Graph g = from_oracle(og);
        UnionFind uf(g.n());
        for (auto [u, v] : og.edges()) uf.unite(u, v);
        u32 root = 1 + static_cast<u32>(rng() % g.n());

        std::vector<u32> dist(g.n() + 1, UINT32_MAX);
        std::queue<u32> q;
        dist[root] = 0;
        q.push(root);
        while (!q.empty()) {
            u32 v = q.front();
            q.pop();
            for (u32 j = 1; j <= g.deg(v); ++j) {
                u32 w = g.head(v, j);
                if (dist[w] == UINT32_MAX) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
            }
        }

        std::set<u32> visited;
        u32 last_d = 0;
        spantd::bfs(g, {root}, nullptr, [&](u32 v, u32 d) {
            CHECK(d >= last_d);
            last_d = d;
            CHECK(dist[v] == d);
            CHECK(visited.insert(v).second);
        });
        for (u32 v = 1; v <= g.n(); ++v)
            CHECK(visited.count(v) == (uf.find(v) == uf.find(root) ? 1u : 0u));
    }
}

TEST_CASE("bfs from several roots takes the nearest one") {
    Graph g = path_graph(7);
    std::vector<u32> dist(8, 99);
    spantd::bfs(g, {1, 7}, nullptr, [&](u32 v, u32 d) { dist[v] = d; });
    CHECK(dist[1] == 0);
    CHECK(dist[7] == 0);
    CHECK(dist[4] == 3);
    CHECK(dist[2] == 1);
    CHECK(dist[6] == 1);
}

TEST_CASE("dfs emits the documented traces") {
    Graph single(1, {});
    CHECK(dfs_trace(single, 1) == std::vector<std::string>{"+1", "-1"});

    Graph tri(3, {{1, 2}, {1, 3}, {2, 3}});
    CHECK(dfs_trace(tri, 1) ==
          std::vector<std::string>{"+1", "+2", "+3", "-3", "b2<3", "-2", "b1<2", "-1"});

    // Star rooted at the center: four leaf pre/post pairs nested inside.
    Graph star(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}});
    std::vector<std::string> want{"+1"};
    for (u32 leaf = 2; leaf <= 5; ++leaf) {
        want.push_back("+" + std::to_string(leaf));
        want.push_back("-" + std::to_string(leaf));
        want.push_back("b1<" + std::to_string(leaf));
    }
    want.push_back("-1");
    CHECK(dfs_trace(star, 1) == want);
}

TEST_CASE("dfs matches a reference recursion on random graphs") {
    for (int trial = 0; trial < 40; ++trial) {
        spanoracle::OGraph og = spanoracle::gen_gnp(24, 0.15, 2300 + trial);
        Graph g = from_oracle(og);
        u32 root = 1 + static_cast<u32>(trial % g.n());
        CHECK(dfs_trace(g, root) == reference_trace(g, root));
    }
}

TEST_CASE("segment drops and restorations stay invisible to callbacks") {
    // A long path forces maximal stack depth; tiny segments force many
    // restorations.
    Graph g = path_graph(300);
    TraversalStats stats;
    auto tiny = dfs_trace(g, 1, 4, &stats);
    CHECK(tiny == dfs_trace(g, 1));
    CHECK(stats.restorations > 0);

    for (int trial = 0; trial < 20; ++trial) {
        spanoracle::OGraph og = spanoracle::gen_gnp(40, 0.09, 3400 + trial);
        Graph rg = from_oracle(og);
        u32 root = 1 + static_cast<u32>(trial % rg.n());
        TraversalStats s2;
        CHECK(dfs_trace(rg, root, 3, &s2) == reference_trace(rg, root));
    }

    // The instrumented bound: each restoration walk touches a vertex at
    // most twice per appearance, on top of its one organic iteration.
    Graph deep = path_graph(500);
    TraversalStats s3;
    dfs_trace(deep, 1, 8, &s3);
    CHECK(s3.restorations > 1);
    for (u32 v = 1; v <= deep.n(); ++v)
        CHECK(s3.list_starts[v] <= 1 + 2 * s3.restored_hits[v]);
}

TEST_CASE("restricted views traverse identically through cursors") {
    // Degenerate restriction: traces match exactly.
    spanoracle::OGraph og = spanoracle::gen_gnp(18, 0.2, 77);
    Graph g = from_oracle(og);
    RestrictedOverlay plain(g, BitVec(g.n()));
    DfsCallbacks cb;
    std::vector<std::string> a, b;
    cb.preorder = [&](u32 v) { a.push_back("+" + std::to_string(v)); };
    cb.postorder = [&](u32 v) { a.push_back("-" + std::to_string(v)); };
    spantd::dfs_restricted(plain, 1, cb);
    std::swap(a, b);
    cb.preorder = [&](u32 v) { a.push_back("+" + std::to_string(v)); };
    cb.postorder = [&](u32 v) { a.push_back("-" + std::to_string(v)); };
    spantd::dfs(g, 1, cb);
    CHECK(a == b);

    // C5 with one restricted vertex: all five visited.
    Graph c5(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}});
    BitVec marks(5);
    marks.set(3);
    RestrictedOverlay rv(c5, std::move(marks));
    std::set<u32> visited;
    DfsCallbacks count;
    count.preorder = [&](u32 v) { visited.insert(v); };
    spantd::dfs_restricted(rv, 1, count);
    CHECK(visited == std::set<u32>{1, 2, 3, 4, 5});

    // A separate component stays unvisited.
    Graph two(6, {{1, 2}, {2, 3}, {4, 5}, {5, 6}});
    visited.clear();
    spantd::dfs_restricted(RestrictedOverlay(two, BitVec(6)), 1, count);
    CHECK(visited == std::set<u32>{1, 2, 3});

    // Restricted vertices under forced restorations: same trace as the
    // unrestricted graph, and the list-iteration bound holds for them.
    Graph deep = path_graph(120);
    BitVec rmask(120);
    for (u32 v = 10; v <= 120; v += 10) rmask.set(v);
    RestrictedOverlay rdeep(deep, std::move(rmask));
    TraversalStats stats;
    std::vector<std::string> rt;
    DfsCallbacks rcb;
    rcb.preorder = [&](u32 v) { rt.push_back("+" + std::to_string(v)); };
    rcb.postorder = [&](u32 v) { rt.push_back("-" + std::to_string(v)); };
    spantd::dfs_restricted(rdeep, 1, rcb, nullptr, 5, &stats);
    std::vector<std::string> ut;
    rcb.preorder = [&](u32 v) { ut.push_back("+" + std::to_string(v)); };
    rcb.postorder = [&](u32 v) { ut.push_back("-" + std::to_string(v)); };
    spantd::dfs(deep, 1, rcb);
    CHECK(rt == ut);
    CHECK(stats.restorations > 0);
    for (u32 v = 10; v <= 120; v += 10)
        CHECK(stats.list_starts[v] <= 1 + 2 * stats.restored_hits[v]);
}

TEST_CASE("descendant marking matches the documented examples") {
    CHECK(bits_of(spantd::compute_R(path_graph(3), 10)).empty());

    // Path rooted at an end: counts run 1,2,3,4 -> reset at the fourth.
    CHECK(bits_of(spantd::compute_R(path_graph(10), 3)) == std::set<u32>{3, 7});

    // Star rooted at the center: the center accumulates all nine leaves.
    Graph star(10, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}, {1, 8}, {1, 9}, {1, 10}});
    CHECK(bits_of(spantd::compute_R(star, 5)) == std::set<u32>{1});

    CHECK_THROWS_AS(spantd::compute_R(path_graph(3), 0), spantd::Error);
}

TEST_CASE("descendant marking equals the recursive oracle") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 25; ++trial) {
        u32 n = 2 + static_cast<u32>(rng() % 499);
        std::vector<std::pair<u32, u32>> edges;
        for (u32 v = 2; v <= n; ++v)
            edges.push_back({1 + static_cast<u32>(rng() % (v - 1)), v});
        Graph g(n, edges);
        u64 thr = 1 + rng() % 12;

        // Rebuild the engine's DFS forest, then run the count-and-reset
        // recursion over it.
        std::vector<std::vector<u32>> kids(n + 1);
        std::vector<u32> stack;
        std::vector<u32> roots;
        DfsCallbacks cb;
        cb.preorder = [&](u32 v) {
            if (stack.empty())
                roots.push_back(v);
            else
                kids[stack.back()].push_back(v);
            stack.push_back(v);
        };
        cb.postorder = [&](u32) { stack.pop_back(); };
        spantd::dfs_forest(g, cb);

        std::set<u32> expect;
        for (u32 r : roots) count_reset(kids, r, thr, expect);
        CHECK(bits_of(spantd::compute_R(g, thr)) == expect);
        CHECK(expect.size() <= (n + thr - 1) / thr + 1);
    }

    // General graphs exercise non-tree edges in the parentheses image.
    for (int trial = 0; trial < 15; ++trial) {
        spanoracle::OGraph og = spanoracle::gen_gnp(60, 0.08, 9100 + trial);
        Graph g = from_oracle(og);
        u64 thr = 2 + trial % 9;
        std::vector<std::vector<u32>> kids(g.n() + 1);
        std::vector<u32> stack, roots;
        DfsCallbacks cb;
        cb.preorder = [&](u32 v) {
            if (stack.empty())
                roots.push_back(v);
            else
                kids[stack.back()].push_back(v);
            stack.push_back(v);
        };
        cb.postorder = [&](u32) { stack.pop_back(); };
        spantd::dfs_forest(g, cb);
        std::set<u32> expect;
        for (u32 r : roots) count_reset(kids, r, thr, expect);
        CHECK(bits_of(spantd::compute_R(g, thr)) == expect);
    }
}

TEST_CASE("traversal memory grows linearly with the graph") {
    auto dfs_peak = [](u32 n) {
        Graph g = path_graph(n);
        BitBudget budget;
        DfsCallbacks cb;
        spantd::dfs(g, 1, cb, &budget);
        return budget.peak();
    };
    auto r_peak = [](u32 n) {
        Graph g = path_graph(n);
        BitBudget budget;
        (void)spantd::compute_R(g, 7, &budget);
        return budget.peak();
    };
    CHECK(dfs_peak(4000) <= 2.3 * static_cast<double>(dfs_peak(2000)));
    CHECK(r_peak(4000) <= 2.3 * static_cast<double>(r_peak(2000)));
}
