#include <algorithm>
#include <bit>

#include "oracle/oracle.hpp"

namespace spanoracle {
namespace {

i64 best_independent_set(const OGraph& g) {
    u32 n = g.n;
    std::vector<u32> nb(n, 0);
    for (u32 v = 1; v <= n; ++v)
        for (u32 w : g.adj[v]) nb[v - 1] |= u32(1) << (w - 1);
    u64 full = (u64(1) << n) - 1;
    i64 best = 0;
    std::vector<char> indep(full + 1, 0);
    indep[0] = 1;
    for (u64 S = 1; S <= full; ++S) {
        u64 bit = S & (0 - S);
        u32 v = static_cast<u32>(std::countr_zero(bit));
        indep[S] = indep[S ^ bit] && ((nb[v] & S) == 0);
        if (indep[S]) best = std::max<i64>(best, std::popcount(S));
    }
    return best;
}

i64 min_dominating_set(const OGraph& g) {
    u32 n = g.n;
    std::vector<u32> closed(n, 0);
    for (u32 v = 1; v <= n; ++v) {
        closed[v - 1] |= u32(1) << (v - 1);
        for (u32 w : g.adj[v]) closed[v - 1] |= u32(1) << (w - 1);
    }
    u64 full = (u64(1) << n) - 1;
    i64 best = n;
    for (u64 S = 0; S <= full; ++S) {
        int size = std::popcount(S);
        if (size >= best) continue;
        u32 dom = 0;
        for (u64 c = S; c;) {
            u64 cb = c & (0 - c);
            c ^= cb;
            dom |= closed[std::countr_zero(cb)];
        }
        if (dom == full) best = size;
    }
    return best;
}

i64 max_cut(const OGraph& g) {
    auto edges = g.edges();
    if (g.n <= 1) return 0;
    u64 half = u64(1) << (g.n - 1);  // fix vertex n on side 0
    i64 best = 0;
    for (u64 S = 0; S < half; ++S) {
        i64 cut = 0;
        for (auto [u, v] : edges) cut += ((S >> (u - 1)) ^ (S >> (v - 1))) & 1;
        best = std::max(best, cut);
    }
    return best;
}

bool q_colorable(const OGraph& g, int q, std::vector<int>& color, u32 fixed,
                 const std::vector<u32>& order) {
    if (fixed == order.size()) return true;
    u32 v = order[fixed];
    int used_max = 0;
    for (u32 i = 0; i < fixed; ++i) used_max = std::max(used_max, color[order[i]]);
    int limit = std::min(q, used_max + 1);  // color symmetry break
    for (int c = 1; c <= limit; ++c) {
        bool ok = true;
        for (u32 w : g.adj[v])
            if (color[w] == c) {
                ok = false;
                break;
            }
        if (!ok) continue;
        color[v] = c;
        if (q_colorable(g, q, color, fixed + 1, order)) return true;
        color[v] = 0;
    }
    return false;
}

}  // namespace

Problem problem_from_name(const std::string& name) {
    if (name == "vc") return Problem::VC;
    if (name == "is") return Problem::IS;
    if (name == "ds") return Problem::DS;
    if (name == "maxcut") return Problem::MAXCUT;
    if (name == "qcolor") return Problem::QCOLOR;
    throw std::runtime_error("unknown problem: " + name);
}

std::string problem_name(Problem p) {
    switch (p) {
        case Problem::VC: return "vc";
        case Problem::IS: return "is";
        case Problem::DS: return "ds";
        case Problem::MAXCUT: return "maxcut";
        case Problem::QCOLOR: return "qcolor";
    }
    return "?";
}

i64 brute_solve(const OGraph& g, Problem p, int q) {
    if (g.n > 20) throw std::runtime_error("size cap exceeded");
    if (g.n == 0) throw std::runtime_error("empty graph");
    switch (p) {
        case Problem::VC: return i64(g.n) - best_independent_set(g);
        case Problem::IS: return best_independent_set(g);
        case Problem::DS: return min_dominating_set(g);
        case Problem::MAXCUT: return max_cut(g);
        case Problem::QCOLOR: {
            if (q < 1) throw std::runtime_error("qcolor needs q >= 1");
            std::vector<u32> order(g.n);
            for (u32 v = 1; v <= g.n; ++v) order[v - 1] = v;
            std::sort(order.begin(), order.end(), [&](u32 a, u32 b) {
                return g.adj[a].size() > g.adj[b].size();
            });
            std::vector<int> color(g.n + 1, 0);
            return q_colorable(g, q, color, 0, order) ? 1 : 0;
        }
    }
    throw std::runtime_error("unreachable");
}

}  // namespace spanoracle
