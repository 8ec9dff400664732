#include <algorithm>

#include "spantd/graph.hpp"

namespace spantd {

Graph::Graph(u32 n, const std::vector<std::pair<u32, u32>>& edges) : n_(n) {
    offsets_.assign(n_ + 2, 0);
    for (auto [u, v] : edges) {
        SPANTD_CHECK(u >= 1 && u <= n_ && v >= 1 && v <= n_, "edge endpoint out of range");
        SPANTD_CHECK(u != v, "self loop");
        offsets_[u + 1] += 1;
        offsets_[v + 1] += 1;
    }
    {
        std::vector<std::pair<u32, u32>> norm(edges);
        for (auto& [u, v] : norm)
            if (u > v) std::swap(u, v);
        std::sort(norm.begin(), norm.end());
        SPANTD_CHECK(std::adjacent_find(norm.begin(), norm.end()) == norm.end(),
                     "duplicate edge");
    }
    for (u32 v = 1; v <= n_; ++v) offsets_[v + 1] += offsets_[v];
    heads_.assign(offsets_[n_ + 1], 0);
    mate_.assign(heads_.size(), 0);
    std::vector<u64> cursor(n_ + 1, 0);
    for (u32 v = 1; v <= n_; ++v) cursor[v] = offsets_[v];
    for (auto [u, v] : edges) {
        u64 pu = cursor[u]++, pv = cursor[v]++;
        heads_[pu] = v;
        heads_[pv] = u;
        mate_[pu] = pv + 1;
        mate_[pv] = pu + 1;
    }
}

u32 Graph::arc_tail(u64 a) const {
    SPANTD_CHECK(a >= 1 && a <= heads_.size(), "arc index out of range");
    u32 lo = 1, hi = n_;
    while (lo < hi) {
        u32 mid = (lo + hi + 1) / 2;
        if (offsets_[mid] < a)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

bool Graph::has_edge(u32 u, u32 v) const {
    if (u < 1 || u > n_ || v < 1 || v > n_ || u == v) return false;
    u32 a = deg(u) <= deg(v) ? u : v;
    u32 b = (a == u) ? v : u;
    for (u32 j = 1; j <= deg(a); ++j)
        if (head(a, j) == b) return true;
    return false;
}

}  // namespace spantd
