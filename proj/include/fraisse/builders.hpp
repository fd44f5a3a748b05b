#pragma once

#include <string>
#include <vector>

#include "fraisse/core/structure.hpp"

// Signatures and small structures that recur in examples and tests.
namespace fraisse::builders {

inline SignaturePtr graph_signature() { return make_signature({{"E", 2, true}}); }

/// r-uniform hypergraphs: one symmetric r-ary symbol.
inline SignaturePtr hypergraph_signature(int r) { return make_signature({{"H", r, true}}); }

/// Metric spaces with distances in {1,2,3}: d1 and d3 are explicit, any
/// other pair is at distance 2.
inline SignaturePtr urysohn_signature() { return make_signature({{"d1", 2, true}, {"d3", 2, true}}); }

inline RelStructure graph(int n, const std::vector<std::pair<int, int>> &edges)
{
    StructureBuilder b(graph_signature(), n);
    for (auto [u, v] : edges)
        b.add(0, {u, v});
    return b.build();
}

inline RelStructure complete_graph(int n)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            e.emplace_back(i, j);
    return graph(n, e);
}

inline RelStructure cycle_graph(int n)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        e.emplace_back(i, (i + 1) % n);
    return graph(n, e);
}

inline RelStructure path_graph(int n)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i)
        e.emplace_back(i, i + 1);
    return graph(n, e);
}

/// Two triangles sharing vertex 0.
inline RelStructure bowtie() { return graph(5, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}}); }

/// Complete r-uniform hypergraph on n vertices.
inline RelStructure complete_hypergraph(int r, int n)
{
    StructureBuilder b(hypergraph_signature(r), n);
    Tuple t;
    auto rec = [&](auto &&self, int from) -> void {
        if (static_cast<int>(t.size()) == r) {
            b.add(0, t);
            return;
        }
        for (int v = from; v < n; ++v) {
            t.push_back(v);
            self(self, v + 1);
            t.pop_back();
        }
    };
    rec(rec, 0);
    return b.build();
}

/// Forbidden structures for {1,2,3}-valued metric spaces: a pair carrying
/// two distances, and the only triangle violating the triangle inequality,
/// (1,1,3).
inline std::vector<RelStructure> urysohn_family()
{
    auto sig = urysohn_signature();
    StructureBuilder pair(sig, 2);
    pair.add("d1", {0, 1}).add("d3", {0, 1});
    StructureBuilder tri(sig, 3);
    tri.add("d1", {0, 1}).add("d1", {1, 2}).add("d3", {0, 2});
    return {pair.build(), tri.build()};
}

} // namespace fraisse::builders
