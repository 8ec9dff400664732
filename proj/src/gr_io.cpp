#include <fstream>
#include <sstream>

#include "spantd/graph.hpp"

namespace spantd {

Graph parse_gr(std::istream& in) {
    bool header = false;
    u32 n = 0;
    u64 m_declared = 0;
    std::vector<std::pair<u32, u32>> edges;
    std::vector<std::vector<u32>> seen;
    std::string line;
    u64 lineno = 0;
    auto bad = [&](const std::string& why) {
        fail("gr parse error at line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            if (header) bad("duplicate problem line");
            std::string p, tw;
            if (!(ls >> p >> tw >> n >> m_declared) || p != "p" || tw != "tw")
                bad("malformed problem line");
            std::string rest;
            if (ls >> rest) bad("trailing tokens on problem line");
            seen.assign(n + 1, {});
            header = true;
        } else {
            if (!header) bad("edge before problem line");
            u32 u, v;
            if (!(ls >> u >> v)) bad("malformed edge line");
            std::string rest;
            if (ls >> rest) bad("trailing tokens on edge line");
            if (u < 1 || u > n || v < 1 || v > n) bad("endpoint out of range");
            if (u == v) bad("self loop");
            auto& su = seen[std::min(u, v)];
            u32 other = std::max(u, v);
            for (u32 w : su)
                if (w == other) bad("duplicate edge");
            su.push_back(other);
            edges.emplace_back(u, v);
        }
    }
    if (!header) fail("gr parse error: missing problem line");
    if (edges.size() != m_declared)
        fail("gr parse error: declared " + std::to_string(m_declared) + " edges, found " +
             std::to_string(edges.size()));
    return Graph(n, edges);
}

Graph parse_gr_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    return parse_gr(in);
}

void write_gr_file(const Graph& g, std::ostream& out) {
    out << "p tw " << g.n() << " " << g.m() << "\n";
    for (u32 v = 1; v <= g.n(); ++v)
        for (u32 j = 1; j <= g.deg(v); ++j)
            if (v < g.head(v, j)) out << v << " " << g.head(v, j) << "\n";
}

}  // namespace spantd
