#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace fraisse;
namespace b = fraisse::builders;

TEST(Embedding, CountsAgreeWithBruteForceOnSmallGraphs)
{
    auto sig = b::graph_signature();
    auto as = enumerate_up_to(sig, 3);
    std::vector<RelStructure> bs;
    for (int n = 0; n <= 4; ++n)
        for (auto &s : oracle::all_labelled(sig, n))
            bs.push_back(s);
    for (const auto &a : as)
        for (const auto &bb : bs)
            for (auto mode : {EmbeddingMode::Weak, EmbeddingMode::Induced})
                ASSERT_EQ(count_embeddings(a, bb, mode), oracle::count_embeddings(a, bb, mode));
}

TEST(Embedding, EveryReportedMapIsAnEmbedding)
{
    std::mt19937_64 rng(11);
    auto sig = make_signature({{"R", 2, false}, {"T", 3, false}});
    for (int rep = 0; rep < 300; ++rep) {
        auto a = oracle::random_structure(sig, 1 + static_cast<int>(rng() % 3), rng, 0.3);
        auto bb = oracle::random_structure(sig, 3 + static_cast<int>(rng() % 3), rng, 0.5);
        for (auto mode : {EmbeddingMode::Weak, EmbeddingMode::Induced}) {
            std::uint64_t n = 0;
            for_each_embedding(a, bb, mode, {}, [&](const std::vector<int> &m) {
                EXPECT_TRUE(oracle::is_embedding(a, bb, m, mode));
                ++n;
                return true;
            });
            ASSERT_EQ(n, oracle::count_embeddings(a, bb, mode));
        }
    }
}

TEST(Embedding, PartialMapIsRespected)
{
    auto k3 = b::complete_graph(3);
    auto k4 = b::complete_graph(4);
    std::uint64_t n = 0;
    for_each_embedding(k3, k4, EmbeddingMode::Weak, {{0, 3}}, [&](const std::vector<int> &m) {
        EXPECT_EQ(m[0], 3);
        ++n;
        return true;
    });
    EXPECT_EQ(n, 6U);
    EXPECT_FALSE(find_embedding(k3, b::cycle_graph(5), EmbeddingMode::Weak));
}

TEST(Embedding, WeakVersusInduced)
{
    auto p3 = b::path_graph(3);
    auto k3 = b::complete_graph(3);
    EXPECT_TRUE(find_embedding(p3, k3, EmbeddingMode::Weak));
    EXPECT_FALSE(find_embedding(p3, k3, EmbeddingMode::Induced));
    auto e = find_embedding(p3, b::cycle_graph(5), EmbeddingMode::Induced);
    ASSERT_TRUE(e);
    EXPECT_TRUE(is_embedding(p3, b::cycle_graph(5), e->map, EmbeddingMode::Induced));
}

TEST(Embedding, BudgetExhaustionIsDistinctFromAbsence)
{
    auto k4 = b::complete_graph(4);
    auto big = b::complete_graph(7);
    auto bip = b::graph(8, {{0, 4}, {0, 5}, {0, 6}, {0, 7}, {1, 4}, {1, 5}, {1, 6}, {1, 7},
                            {2, 4}, {2, 5}, {2, 6}, {2, 7}, {3, 4}, {3, 5}, {3, 6}, {3, 7}});
    SearchOptions tiny;
    tiny.node_budget = 1;
    EXPECT_EQ(search_embedding(k4, big, EmbeddingMode::Weak, {}, tiny).status, SearchStatus::BudgetExceeded);
    EXPECT_EQ(search_embedding(k4, bip, EmbeddingMode::Weak, {}, tiny).status, SearchStatus::BudgetExceeded);
    EXPECT_EQ(search_embedding(k4, bip, EmbeddingMode::Weak).status, SearchStatus::NotFound);
    EXPECT_EQ(search_embedding(k4, big, EmbeddingMode::Weak).status, SearchStatus::Found);
}

TEST(Embedding, AutomorphismGroupOrders)
{
    EXPECT_EQ(automorphisms(b::complete_graph(4)).size(), 24U);
    EXPECT_EQ(automorphisms(b::cycle_graph(6)).size(), 12U);
    EXPECT_EQ(automorphisms(b::path_graph(4)).size(), 2U);
    EXPECT_EQ(automorphisms(b::bowtie()).size(), 8U);
    for (const auto &p : automorphisms(b::bowtie()))
        EXPECT_TRUE(oracle::is_embedding(b::bowtie(), b::bowtie(), p, EmbeddingMode::Induced));
}

TEST(Embedding, SignatureMismatchIsRejected)
{
    auto a = b::complete_graph(2);
    auto h = RelStructure::empty(b::hypergraph_signature(3), 3);
    EXPECT_THROW(find_embedding(a, h, EmbeddingMode::Weak), PreconditionError);
}
