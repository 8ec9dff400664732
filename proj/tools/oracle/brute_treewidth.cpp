#include <algorithm>
#include <bit>

#include "oracle/oracle.hpp"

namespace spanoracle {

// Exact treewidth by dynamic programming over elimination prefixes:
// tw(S) = min over v in S of max(tw(S \ v), q(S \ v, v)) where q(S', v)
// counts the vertices outside S' adjacent to the component of v in
// G[S' + v]. Answer is tw(V).
int brute_treewidth(const OGraph& g) {
    if (g.n > 12) throw std::runtime_error("size cap exceeded");
    if (g.n == 0) throw std::runtime_error("empty graph");
    u32 n = g.n;
    std::vector<u32> nb(n, 0);
    for (u32 v = 1; v <= n; ++v)
        for (u32 w : g.adj[v]) nb[v - 1] |= u32(1) << (w - 1);

    u32 full = (n == 32) ? ~u32(0) : ((u32(1) << n) - 1);
    std::vector<int> dp(u64(full) + 1, 0);
    for (u32 S = 1; S <= full; ++S) {
        int best = static_cast<int>(n);
        for (u32 rest = S; rest;) {
            u32 bit = rest & (0u - rest);
            rest ^= bit;
            u32 Sv = S ^ bit;
            // Component of v in G[Sv + v], grown by bitmask BFS.
            u32 comp = bit;
            while (true) {
                u32 grow = comp;
                for (u32 c = comp; c;) {
                    u32 cb = c & (0u - c);
                    c ^= cb;
                    grow |= nb[std::countr_zero(cb)] & (Sv | bit);
                }
                if (grow == comp) break;
                comp = grow;
            }
            u32 outside = 0;
            for (u32 c = comp; c;) {
                u32 cb = c & (0u - c);
                c ^= cb;
                outside |= nb[std::countr_zero(cb)];
            }
            outside &= ~(Sv | bit);
            int q = std::popcount(outside);
            best = std::min(best, std::max(dp[Sv], q));
        }
        dp[S] = best;
    }
    return dp[full];
}

}  // namespace spanoracle
