#include <algorithm>
#include <fstream>
#include <sstream>

#include "oracle/oracle.hpp"

namespace spanoracle {

void OGraph::add_edge(u32 u, u32 v) {
    if (u == 0 || v == 0 || u > n || v > n) throw std::runtime_error("edge endpoint out of range");
    if (u == v) throw std::runtime_error("self loop");
    if (has_edge(u, v)) throw std::runtime_error("duplicate edge");
    adj[u].push_back(v);
    adj[v].push_back(u);
}

bool OGraph::has_edge(u32 u, u32 v) const {
    if (u == 0 || v == 0 || u > n || v > n) return false;
    const auto& a = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
    u32 other = adj[u].size() <= adj[v].size() ? v : u;
    return std::find(a.begin(), a.end(), other) != a.end();
}

u64 OGraph::m() const {
    u64 d = 0;
    for (u32 v = 1; v <= n; ++v) d += adj[v].size();
    return d / 2;
}

std::vector<std::pair<u32, u32>> OGraph::edges() const {
    std::vector<std::pair<u32, u32>> e;
    for (u32 v = 1; v <= n; ++v)
        for (u32 w : adj[v])
            if (v < w) e.emplace_back(v, w);
    return e;
}

OGraph parse_gr(std::istream& in) {
    OGraph g;
    bool header = false;
    u64 m_declared = 0, m_seen = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            if (header) throw std::runtime_error("duplicate problem line");
            std::string p, tw;
            u32 n;
            if (!(ls >> p >> tw >> n >> m_declared) || p != "p" || tw != "tw")
                throw std::runtime_error("malformed problem line");
            g.init(n);
            header = true;
        } else {
            if (!header) throw std::runtime_error("edge before problem line");
            u32 u, v;
            if (!(ls >> u >> v)) throw std::runtime_error("malformed edge line");
            std::string rest;
            if (ls >> rest) throw std::runtime_error("trailing tokens on edge line");
            g.add_edge(u, v);
            ++m_seen;
        }
    }
    if (!header) throw std::runtime_error("missing problem line");
    if (m_seen != m_declared) throw std::runtime_error("edge count mismatch");
    return g;
}

OGraph parse_gr_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_gr(in);
}

std::string write_gr(const OGraph& g) {
    std::ostringstream out;
    out << "p tw " << g.n << " " << g.m() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
    return out.str();
}

TDBags parse_td(std::istream& in) {
    TDBags td;
    bool header = false;
    std::vector<bool> seen;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 's') {
            if (header) throw std::runtime_error("duplicate solution line");
            std::string s, t;
            if (!(ls >> s >> t >> td.nbags >> td.declared_width_plus1 >> td.n) || s != "s" ||
                t != "td")
                throw std::runtime_error("malformed solution line");
            td.bags.assign(td.nbags + 1, {});
            seen.assign(td.nbags + 1, false);
            header = true;
        } else if (line[0] == 'b') {
            if (!header) throw std::runtime_error("bag before solution line");
            std::string b;
            u32 id;
            ls >> b >> id;
            if (b != "b" || id == 0 || id > td.nbags || seen[id])
                throw std::runtime_error("malformed bag line");
            seen[id] = true;
            u32 v;
            while (ls >> v) {
                if (v == 0 || v > td.n) throw std::runtime_error("bag vertex out of range");
                td.bags[id].push_back(v);
            }
        } else {
            if (!header) throw std::runtime_error("tree edge before solution line");
            u32 a, b;
            if (!(ls >> a >> b)) throw std::runtime_error("malformed tree edge");
            if (a == 0 || b == 0 || a > td.nbags || b > td.nbags || a == b)
                throw std::runtime_error("tree edge out of range");
            td.tree_edges.emplace_back(a, b);
        }
    }
    if (!header) throw std::runtime_error("missing solution line");
    for (u32 i = 1; i <= td.nbags; ++i)
        if (!seen[i]) throw std::runtime_error("missing bag " + std::to_string(i));
    return td;
}

TDBags parse_td_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_td(in);
}

}  // namespace spanoracle
