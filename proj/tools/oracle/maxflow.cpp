#include <algorithm>
#include <bit>
#include <queue>

#include "oracle/oracle.hpp"

namespace spanoracle {
namespace {

// Unit-capacity flow network for internally vertex-disjoint s-t paths:
// every vertex v splits into v_in = v and v_out = v + n joined by a
// capacity-1 arc (unbounded for s and t), and each undirected edge {u,v}
// becomes u_out -> v_in and v_out -> u_in.
struct FlowNet {
    struct Arc {
        u32 to;
        int cap;
        int orig;
        u32 rev;
    };
    std::vector<std::vector<Arc>> arcs;

    explicit FlowNet(u32 nodes) : arcs(nodes) {}

    void add(u32 a, u32 b, int cap) {
        arcs[a].push_back({b, cap, cap, static_cast<u32>(arcs[b].size())});
        arcs[b].push_back({a, 0, 0, static_cast<u32>(arcs[a].size() - 1)});
    }

    // One BFS augmentation of value 1; true if an augmenting path exists.
    bool augment(u32 src, u32 snk) {
        std::vector<std::pair<u32, u32>> par(arcs.size(), {UINT32_MAX, 0});
        std::queue<u32> q;
        q.push(src);
        par[src] = {src, 0};
        while (!q.empty() && par[snk].first == UINT32_MAX) {
            u32 v = q.front();
            q.pop();
            for (u32 i = 0; i < arcs[v].size(); ++i) {
                const Arc& a = arcs[v][i];
                if (a.cap > 0 && par[a.to].first == UINT32_MAX) {
                    par[a.to] = {v, i};
                    q.push(a.to);
                }
            }
        }
        if (par[snk].first == UINT32_MAX) return false;
        for (u32 v = snk; v != src;) {
            auto [pv, pi] = par[v];
            arcs[pv][pi].cap -= 1;
            arcs[arcs[pv][pi].to][arcs[pv][pi].rev].cap += 1;
            v = pv;
        }
        return true;
    }
};

FlowNet build_net(const OGraph& g, u32 s, u32 t) {
    FlowNet net(2 * g.n + 1);
    int big = static_cast<int>(g.n) + 1;
    for (u32 v = 1; v <= g.n; ++v) net.add(v, v + g.n, (v == s || v == t) ? big : 1);
    for (u32 v = 1; v <= g.n; ++v)
        for (u32 w : g.adj[v]) net.add(v + g.n, w, 1);
    return net;
}

}  // namespace

int max_disjoint_paths(const OGraph& g, u32 s, u32 t, int cap) {
    if (s == t || s == 0 || t == 0 || s > g.n || t > g.n)
        throw std::runtime_error("bad terminals");
    FlowNet net = build_net(g, s, t);
    int flow = 0;
    while ((cap < 0 || flow < cap) && net.augment(s + g.n, t)) ++flow;
    return flow;
}

std::vector<std::vector<u32>> disjoint_path_family(const OGraph& g, u32 s, u32 t) {
    if (s == t || s == 0 || t == 0 || s > g.n || t > g.n)
        throw std::runtime_error("bad terminals");
    FlowNet net = build_net(g, s, t);
    int flow = 0;
    while (net.augment(s + g.n, t)) ++flow;

    // Remaining flow per forward arc is orig - cap; peel one unit-walk at
    // a time from s_out. Conservation guarantees each walk ends at t_in,
    // and the unit vertex arcs make the walks internally disjoint.
    std::vector<std::vector<u32>> paths;
    for (int p = 0; p < flow; ++p) {
        std::vector<u32> path{s};
        u32 cur = s + g.n;
        while (cur != t) {
            bool moved = false;
            for (auto& a : net.arcs[cur]) {
                if (a.orig == 0 || a.orig - a.cap <= 0) continue;
                a.cap += 1;
                cur = a.to;
                if (cur <= g.n && cur != t) {
                    path.push_back(cur);
                    // Cross the vertex arc immediately.
                    for (auto& va : net.arcs[cur])
                        if (va.to == cur + g.n && va.orig > 0) {
                            if (va.orig - va.cap <= 0)
                                throw std::runtime_error("vertex arc without flow");
                            va.cap += 1;
                            cur = cur + g.n;
                            break;
                        }
                }
                moved = true;
                break;
            }
            if (!moved) throw std::runtime_error("flow decomposition stuck");
        }
        path.push_back(t);
        paths.push_back(std::move(path));
    }
    return paths;
}

bool separates(const OGraph& g, const std::vector<u32>& removed, u32 s, u32 t) {
    std::vector<char> blocked(g.n + 1, 0), seen(g.n + 1, 0);
    for (u32 v : removed) {
        if (v == s || v == t) throw std::runtime_error("separator contains a terminal");
        blocked[v] = 1;
    }
    std::queue<u32> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
        u32 v = q.front();
        q.pop();
        if (v == t) return false;
        for (u32 w : g.adj[v])
            if (!seen[w] && !blocked[w]) {
                seen[w] = 1;
                q.push(w);
            }
    }
    return true;
}

int min_vertex_cut_brute(const OGraph& g, u32 s, u32 t) {
    if (g.n > 20) throw std::runtime_error("size cap exceeded");
    if (g.has_edge(s, t)) throw std::runtime_error("terminals are adjacent: no vertex cut");
    std::vector<u32> others;
    for (u32 v = 1; v <= g.n; ++v)
        if (v != s && v != t) others.push_back(v);
    u32 r = static_cast<u32>(others.size());
    int best = static_cast<int>(r);
    for (u64 mask = 0; mask < (u64(1) << r); ++mask) {
        int size = std::popcount(mask);
        if (size >= best) continue;
        std::vector<u32> rem;
        for (u32 i = 0; i < r; ++i)
            if (mask >> i & 1) rem.push_back(others[i]);
        if (separates(g, rem, s, t)) best = size;
    }
    return best;
}

}  // namespace spanoracle
