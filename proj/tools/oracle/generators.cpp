#include <algorithm>
#include <numeric>
#include <random>

#include "oracle/oracle.hpp"

namespace spanoracle {
namespace {

// Uniform pick in [0, bound); plain modulo keeps results identical across
// standard library versions.
u64 pick(std::mt19937_64& rng, u64 bound) { return rng() % bound; }

}  // namespace

// Random k-tree: a (k+1)-clique plus n-k-1 vertices each attached to a
// uniformly chosen existing k-clique. Labels are shuffled afterwards so
// construction order leaks nothing. Treewidth is exactly k for n > k.
OGraph gen_ktree(u32 n, u32 k, u64 seed) {
    if (n < k + 1) throw std::runtime_error("k-tree needs n >= k+1");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<u32> label(n + 1);
    std::iota(label.begin(), label.end(), 0);
    for (u32 i = n; i >= 2; --i) std::swap(label[i], label[1 + pick(rng, i)]);

    OGraph g(n);
    std::vector<std::vector<u32>> cliques;  // k-cliques open for attachment
    for (u32 a = 1; a <= k + 1; ++a)
        for (u32 b = a + 1; b <= k + 1; ++b) g.add_edge(label[a], label[b]);
    for (u32 drop = 1; drop <= k + 1; ++drop) {
        std::vector<u32> c;
        for (u32 a = 1; a <= k + 1; ++a)
            if (a != drop) c.push_back(a);
        cliques.push_back(c);
    }
    for (u32 v = k + 2; v <= n; ++v) {
        const std::vector<u32> base = cliques[pick(rng, cliques.size())];
        for (u32 u : base) g.add_edge(label[v], label[u]);
        for (u32 drop = 0; drop < base.size(); ++drop) {
            std::vector<u32> c;
            for (u32 i = 0; i < base.size(); ++i) c.push_back(i == drop ? v : base[i]);
            cliques.push_back(std::move(c));
        }
    }
    return g;
}

OGraph gen_partial_ktree(u32 n, u32 k, double keep, u64 seed) {
    OGraph full = gen_ktree(n, k, seed);
    std::mt19937_64 rng(seed ^ 0xda942042e4dd58b5ULL);
    OGraph g(n);
    for (auto [u, v] : full.edges())
        if (double(rng() >> 11) / double(u64(1) << 53) < keep) g.add_edge(u, v);
    return g;
}

OGraph gen_gnp(u32 n, double p, u64 seed) {
    std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
    OGraph g(n);
    for (u32 u = 1; u <= n; ++u)
        for (u32 v = u + 1; v <= n; ++v)
            if (double(rng() >> 11) / double(u64(1) << 53) < p) g.add_edge(u, v);
    return g;
}

OGraph gen_path(u32 n) {
    OGraph g(n);
    for (u32 v = 1; v + 1 <= n; ++v) g.add_edge(v, v + 1);
    return g;
}

OGraph gen_cycle(u32 n) {
    if (n < 3) throw std::runtime_error("cycle needs n >= 3");
    OGraph g = gen_path(n);
    g.add_edge(n, 1);
    return g;
}

OGraph gen_clique(u32 n) {
    OGraph g(n);
    for (u32 u = 1; u <= n; ++u)
        for (u32 v = u + 1; v <= n; ++v) g.add_edge(u, v);
    return g;
}

OGraph gen_grid(u32 rows, u32 cols) {
    OGraph g(rows * cols);
    auto id = [cols](u32 r, u32 c) { return r * cols + c + 1; };
    for (u32 r = 0; r < rows; ++r)
        for (u32 c = 0; c < cols; ++c) {
            if (c + 1 < cols) g.add_edge(id(r, c), id(r, c + 1));
            if (r + 1 < rows) g.add_edge(id(r, c), id(r + 1, c));
        }
    return g;
}

}  // namespace spanoracle
