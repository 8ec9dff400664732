#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "oracle/oracle.hpp"

namespace spanoracle {
namespace {

// Searches for a deadlock cycle over the given ordered tuple of paths
// (internal vertex lists). A deadlock cycle picks on each path i a
// subpath from x_i to y_i (position(x_i) < position(y_i)) such that the
// cross edge {x_i, y_{i+1 mod r}} exists. Returns true if some choice is
// extended, i.e. at least one subpath spans three or more vertices.
//
// Enumerates x_0 and then runs a reachability sweep around the tuple with
// states (path index, position of y_i, saw-long-subpath), choosing x_i
// anywhere before y_i.
bool tuple_has_extended_deadlock(const OGraph& g,
                                 const std::vector<const std::vector<u32>*>& tuple,
                                 const std::vector<u32>& global_idx,
                                 const std::map<u32, std::pair<u32, u32>>& locate) {
    u32 r = static_cast<u32>(tuple.size());
    const auto& first = *tuple[0];
    for (u32 px0 = 0; px0 < first.size(); ++px0) {
        // states[i][py][ext]: subpath on path i ends at position py, ext
        // records whether any completed subpath so far had length >= 3.
        std::vector<std::vector<std::array<bool, 2>>> reach(r + 1);
        for (u32 i = 1; i <= r; ++i)
            reach[i].assign(i == r ? first.size() : tuple[i]->size(), {false, false});

        auto push_from_x = [&](u32 i, u32 px, bool ext) {
            // Cross edge from x_i leads to y_{i+1} on the next tuple path
            // (the first path again when i = r-1).
            u32 nxt = (i + 1) % r;
            u32 slot = (nxt == 0) ? r : nxt;
            for (u32 w : g.adj[(*tuple[i])[px]]) {
                auto it = locate.find(w);
                if (it == locate.end()) continue;
                auto [pi, pos] = it->second;
                if (pi != global_idx[nxt]) continue;
                reach[slot][pos][ext] = true;
            }
        };
        push_from_x(0, px0, false);

        for (u32 i = 1; i < r; ++i) {
            const auto& cur = *tuple[i];
            for (u32 py = 0; py < cur.size(); ++py)
                for (int e = 0; e < 2; ++e) {
                    if (!reach[i][py][e]) continue;
                    for (u32 px = 0; px < py; ++px)
                        push_from_x(i, px, e || (py - px >= 2));
                }
        }
        // Closure: y_0 must lie strictly after x_0 on the first path.
        for (u32 py = px0 + 1; py < first.size(); ++py)
            for (int e = 0; e < 2; ++e)
                if (reach[r][py][e] && (e || (py - px0 >= 2))) return true;
    }
    return false;
}

void enumerate_tuples(u32 count, u32 first, std::vector<u32>& tuple, std::vector<bool>& used,
                      const std::function<bool(const std::vector<u32>&)>& visit, bool& found) {
    if (found) return;
    if (tuple.size() >= 2 && visit(tuple)) {
        found = true;
        return;
    }
    if (tuple.size() == count) return;
    for (u32 j = first + 1; j < count; ++j) {
        if (used[j]) continue;
        used[j] = true;
        tuple.push_back(j);
        enumerate_tuples(count, first, tuple, used, visit, found);
        tuple.pop_back();
        used[j] = false;
        if (found) return;
    }
}

}  // namespace

GoodnessReport goodness_verify(const OGraph& g, const std::vector<std::vector<u32>>& paths,
                               u32 s, u32 t) {
    GoodnessReport rep;
    std::ostringstream detail;

    for (size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        if (p.size() < 2 || p.front() != s || p.back() != t) {
            rep.well_formed = false;
            detail << "path " << i << " does not run from s to t; ";
            continue;
        }
        std::set<u32> seen;
        for (size_t j = 0; j < p.size(); ++j) {
            u32 v = p[j];
            if (!seen.insert(v).second) {
                rep.well_formed = false;
                detail << "path " << i << " repeats vertex " << v << "; ";
            }
            if (j > 0 && !g.has_edge(p[j - 1], v)) {
                rep.well_formed = false;
                detail << "path " << i << " uses missing edge " << p[j - 1] << "-" << v << "; ";
            }
            if (j > 0 && j + 1 < p.size() && (v == s || v == t)) {
                rep.well_formed = false;
                detail << "path " << i << " passes through a terminal; ";
            }
        }
    }

    // Pairwise internal disjointness.
    std::map<u32, std::pair<u32, u32>> locate;  // internal vertex -> (path, position)
    for (u32 i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        for (u32 j = 1; j + 1 < p.size(); ++j) {
            auto [it, fresh] = locate.try_emplace(p[j], i, j - 1);
            if (!fresh) {
                rep.disjoint = false;
                detail << "vertex " << p[j] << " on paths " << it->second.first << " and " << i
                       << "; ";
            }
        }
    }

    // Chordlessness over the full vertex sequence including s and t. The
    // pair {s,t} is exempt: a direct s-t edge is a path of its own, not a
    // chord.
    for (u32 i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        for (u32 a = 0; a + 2 < p.size() && rep.chordless; ++a)
            for (u32 b = a + 2; b < p.size(); ++b) {
                if (a == 0 && b + 1 == p.size()) continue;
                if (g.has_edge(p[a], p[b])) {
                    rep.chordless = false;
                    detail << "chord " << p[a] << "-" << p[b] << " on path " << i << "; ";
                    break;
                }
            }
    }

    // Extended deadlock cycles over tuples of distinct paths. Rotations
    // are identical cycles, so the tuple's first element is fixed to its
    // smallest member; both directions are still enumerated because the
    // cross-edge relation is oriented.
    std::vector<std::vector<u32>> internals(paths.size());
    for (size_t i = 0; i < paths.size(); ++i)
        if (paths[i].size() >= 2)
            internals[i] = std::vector<u32>(paths[i].begin() + 1, paths[i].end() - 1);

    u32 count = static_cast<u32>(paths.size());
    bool found = false;
    auto visit = [&](const std::vector<u32>& idx) {
        std::vector<const std::vector<u32>*> tuple;
        for (u32 i : idx) {
            if (internals[i].empty()) return false;
            tuple.push_back(&internals[i]);
        }
        return tuple_has_extended_deadlock(g, tuple, idx, locate);
    };
    for (u32 f = 0; f < count && !found; ++f) {
        std::vector<u32> tuple{f};
        std::vector<bool> used(count, false);
        used[f] = true;
        enumerate_tuples(count, f, tuple, used, visit, found);
    }
    if (found) {
        rep.no_extended_deadlock = false;
        detail << "extended deadlock cycle present; ";
    }

    rep.detail = detail.str();
    return rep;
}

}  // namespace spanoracle
