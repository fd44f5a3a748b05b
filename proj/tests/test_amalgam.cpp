#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace fraisse;
namespace b = fraisse::builders;

namespace {

std::uint64_t mask_of(const std::vector<int> &pts)
{
    std::uint64_t m = 0;
    for (int p : pts)
        m |= std::uint64_t{1} << p;
    return m;
}

} // namespace

TEST(FreeAmalgam, TwoTrianglesOverAPointIsTheBowtie)
{
    auto k3 = b::complete_graph(3);
    auto d = free_amalgam({k3, k3, {{0, 0}}});
    EXPECT_EQ(d.structure.size(), 5);
    EXPECT_TRUE(isomorphic(d.structure, b::bowtie()));
}

TEST(FreeAmalgam, SidesEmbedAndAreIndependentOverTheBase)
{
    std::mt19937_64 rng(5);
    auto sig = b::urysohn_signature();
    for (int rep = 0; rep < 200; ++rep) {
        auto c = oracle::random_structure(sig, static_cast<int>(rng() % 3), rng);
        auto extend = [&](int extra) {
            auto lists = c.instance_lists();
            StructureBuilder sb(sig, c.size() + extra);
            for (std::size_t s = 0; s < lists.size(); ++s)
                for (auto &t : lists[s])
                    sb.add(s, t);
            auto noise = oracle::random_structure(sig, c.size() + extra, rng);
            for (std::size_t s = 0; s < noise.symbol_count(); ++s)
                for (std::size_t i = 0; i < noise.instance_count(s); ++i) {
                    auto t = noise.instance(s, i);
                    if (std::any_of(t.begin(), t.end(), [&](int p) { return p >= c.size(); }))
                        sb.add(s, Tuple(t.begin(), t.end()));
                }
            return sb.build();
        };
        auto a = extend(static_cast<int>(rng() % 3));
        auto bb = extend(static_cast<int>(rng() % 3));
        AmalgamProblem p{a, bb, {}};
        for (int i = 0; i < c.size(); ++i)
            p.glue.emplace_back(i, i);
        auto r = free_amalgam(p);
        ASSERT_EQ(r.structure.size(), a.size() + bb.size() - c.size());
        ASSERT_TRUE(oracle::is_embedding(a, r.structure, r.a_map, EmbeddingMode::Induced));
        ASSERT_TRUE(oracle::is_embedding(bb, r.structure, r.b_map, EmbeddingMode::Induced));
        ASSERT_TRUE(oracle::fa_independent(r.structure, r.a_side.mask(), r.b_side.mask(), r.base.mask()));
        ASSERT_EQ(r.structure.total_instances(), a.total_instances() + bb.total_instances() - c.total_instances());
    }
}

TEST(FreeAmalgam, RejectsBadGlue)
{
    auto k2 = b::complete_graph(2);
    auto e2 = RelStructure::empty(b::graph_signature(), 2);
    EXPECT_THROW(free_amalgam({k2, e2, {{0, 0}, {1, 1}}}), PreconditionError);
    EXPECT_THROW(free_amalgam({k2, k2, {{0, 0}, {1, 0}}}), PreconditionError);
    EXPECT_THROW(free_amalgam({k2, k2, {{0, 5}}}), PreconditionError);
    EXPECT_THROW(free_amalgam({k2, RelStructure::empty(b::hypergraph_signature(3), 3), {}}), PreconditionError);
}

TEST(Independence, AgreesWithDefinitionOnAllTriples)
{
    std::mt19937_64 rng(9);
    for (auto sig : {b::graph_signature(), b::hypergraph_signature(3), b::urysohn_signature()})
        for (int rep = 0; rep < 20; ++rep) {
            auto d = oracle::random_structure(sig, 4, rng);
            for (std::uint64_t t = 0; t < 4096; ++t) {
                std::uint64_t a = t & 15, bb = (t >> 4) & 15, c = (t >> 8) & 15;
                ASSERT_EQ(fa_independent_mask(d, a, bb, c), oracle::fa_independent(d, a, bb, c));
            }
        }
}

TEST(Independence, UrysohnMeansDistanceTwoAcross)
{
    // d1(0,1), d3(1,2): 0 and 2 sit at distance 2, 1 is at distance 1 from 0.
    auto s = RelStructure(b::urysohn_signature(), 3, {{{0, 1}}, {{1, 2}}});
    EXPECT_TRUE(fa_independent(s, PointSet{0}, PointSet{2}, PointSet{}));
    EXPECT_FALSE(fa_independent(s, PointSet{0}, PointSet{1}, PointSet{}));
    EXPECT_TRUE(fa_independent(s, PointSet{0}, PointSet{2}, PointSet{1}));
    EXPECT_FALSE(fa_independent(s, PointSet{0, 1}, PointSet{1}, PointSet{}));
    EXPECT_EQ(fa_independent(s, PointSet{0}, PointSet{2}, PointSet{}),
              oracle::fa_independent(s, mask_of({0}), mask_of({2}), 0));
}

TEST(Axioms, HoldForGraphsUpToFourAndHypergraphs)
{
    auto g = check_axioms(b::graph_signature(), 4);
    EXPECT_TRUE(g.all_hold());
    EXPECT_EQ(g.structures, 1U + 1 + 2 + 4 + 11);
    for (const auto &o : g.outcomes)
        EXPECT_GT(o.checks, 0U) << to_string(o.axiom);
    EXPECT_TRUE(check_axioms(b::hypergraph_signature(3), 4).all_hold());
    EXPECT_TRUE(check_axioms(b::urysohn_signature(), 3).all_hold());
}

TEST(Axioms, ThreadCountDoesNotChangeTheReport)
{
    auto one = check_axioms(b::graph_signature(), 4, fa_predicate(), 1);
    auto four = check_axioms(b::graph_signature(), 4, fa_predicate(), 4);
    ASSERT_EQ(one.outcomes.size(), four.outcomes.size());
    for (std::size_t i = 0; i < one.outcomes.size(); ++i)
        EXPECT_EQ(one.outcomes[i].checks, four.outcomes[i].checks);
}

// The harness must catch a predicate that is not symmetric.
TEST(Axioms, DetectsAsymmetricPredicate)
{
    TriplePredicate a_inside_c = [](const RelStructure &, std::uint64_t a, std::uint64_t, std::uint64_t c) {
        return (a & ~c) == 0;
    };
    auto r = check_axioms(b::graph_signature(), 3, a_inside_c);
    const auto &sym = r.outcome(Axiom::Symmetry);
    ASSERT_FALSE(sym.holds());
    EXPECT_TRUE(confirms_violation(Axiom::Symmetry, *sym.counterexample, a_inside_c));
    EXPECT_FALSE(confirms_violation(Axiom::Symmetry, *sym.counterexample, fa_predicate()));
}

// Everything independent: stationarity must fail once there are edges.
TEST(Axioms, DetectsNonStationaryPredicate)
{
    TriplePredicate always = [](const RelStructure &, std::uint64_t, std::uint64_t, std::uint64_t) { return true; };
    auto r = check_axioms(b::graph_signature(), 3, always);
    const auto &st = r.outcome(Axiom::Stationarity);
    ASSERT_FALSE(st.holds());
    EXPECT_TRUE(confirms_violation(Axiom::Stationarity, *st.counterexample, always));
    EXPECT_TRUE(r.outcome(Axiom::Symmetry).holds());
    EXPECT_TRUE(r.outcome(Axiom::Invariance).holds());
}

// A predicate that depends on labels rather than structure.
TEST(Axioms, DetectsNonInvariantPredicate)
{
    TriplePredicate point_zero = [](const RelStructure &, std::uint64_t a, std::uint64_t, std::uint64_t) {
        return (a & 1U) == 0;
    };
    auto r = check_axioms(b::graph_signature(), 2, point_zero);
    const auto &inv = r.outcome(Axiom::Invariance);
    ASSERT_FALSE(inv.holds());
    EXPECT_TRUE(confirms_violation(Axiom::Invariance, *inv.counterexample, point_zero));
}
