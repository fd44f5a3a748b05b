#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace fraisse;
namespace b = fraisse::builders;

namespace {

ForbiddenFamily fam(SignaturePtr sig, std::vector<RelStructure> members)
{
    return minimalize(ForbiddenFamily(std::move(sig), members));
}

PairPattern edge_pattern() { return {b::path_graph(2), {0}, {1}, {}}; }

} // namespace

TEST(HalfGraph, EdgeCountAndFreeness)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    for (int rows = 1; rows <= 6; ++rows) {
        auto w = nonsimplicity_witness(f, b::complete_graph(3), rows);
        EXPECT_EQ(w.e.total_instances(), static_cast<std::size_t>(rows * (rows - 1) / 2));
        EXPECT_TRUE(oracle::is_free(w.e, f.members()));
        EXPECT_TRUE(oracle::is_free(w.e_with_b1, f.members()));
        EXPECT_TRUE(verify_nonsimplicity(w, f)) << verify_nonsimplicity(w, f).reason;
        EXPECT_EQ(w.certificate.has_value(), rows >= 2);
        if (w.certificate) {
            EXPECT_TRUE(oracle::is_embedding(b::complete_graph(3), w.certificate->extended,
                                             w.certificate->embedding.map, EmbeddingMode::Weak));
        }
    }
}

TEST(HalfGraph, LargerCliquesAndUrysohn)
{
    auto f4 = fam(b::graph_signature(), {b::complete_graph(4)});
    auto w4 = nonsimplicity_witness(f4, b::complete_graph(4), 4);
    EXPECT_TRUE(verify_nonsimplicity(w4, f4));
    auto ury = fam(b::urysohn_signature(), b::urysohn_family());
    auto tri = b::urysohn_family()[1];
    auto wu = nonsimplicity_witness(ury, tri, 3);
    EXPECT_TRUE(verify_nonsimplicity(wu, ury));
}

TEST(HalfGraph, HypothesesAreChecked)
{
    auto bow = fam(b::graph_signature(), {b::bowtie()});
    EXPECT_THROW(nonsimplicity_witness(bow, b::bowtie(), 3), PreconditionError);
    auto h = fam(b::hypergraph_signature(3), {b::complete_hypergraph(3, 4)});
    EXPECT_THROW(nonsimplicity_witness(h, b::complete_hypergraph(3, 4), 3), PreconditionError);
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    EXPECT_THROW(nonsimplicity_witness(f, b::complete_graph(4), 3), PreconditionError);
    EXPECT_THROW(nonsimplicity_witness(f, b::complete_graph(3), 0), PreconditionError);
    EXPECT_THROW(nonsimplicity_witness(f, b::complete_graph(3), 3, std::array<int, 3>{0, 0, 1}), PreconditionError);
}

TEST(HalfGraph, TamperingIsDetected)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    auto w = nonsimplicity_witness(f, b::complete_graph(3), 4);
    auto lists = w.e.instance_lists();
    lists[0].pop_back();
    auto fewer = w;
    fewer.e = RelStructure(w.e.signature_ptr(), w.e.size(), lists);
    EXPECT_FALSE(verify_nonsimplicity(fewer, f));
    auto bad_map = w;
    bad_map.certificate->embedding.map[1] = bad_map.certificate->embedding.map[0];
    EXPECT_FALSE(verify_nonsimplicity(bad_map, f));
    auto no_cert = w;
    no_cert.certificate.reset();
    EXPECT_FALSE(verify_nonsimplicity(no_cert, f));
}

TEST(Sop3, ProofsCoverEveryPair)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    for (int rows = 2; rows <= 5; ++rows) {
        auto w = nonsimplicity_witness(f, b::complete_graph(3), rows);
        auto c = sop3_certificate(w, f);
        EXPECT_EQ(c.proofs.size(), static_cast<std::size_t>(rows * (rows - 1) / 2));
        for (const auto &p : c.proofs) {
            EXPECT_LT(p.i, p.j);
            EXPECT_EQ(p.cases.size(), std::size_t{1} << p.open.size());
        }
        EXPECT_TRUE(verify_sop3(c, f)) << verify_sop3(c, f).reason;
        EXPECT_TRUE(is_free(c.structure, f));
    }
}

TEST(Sop3, TamperingIsDetected)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    auto w = nonsimplicity_witness(f, b::complete_graph(3), 3);
    auto c = sop3_certificate(w, f);
    auto dropped = c;
    dropped.proofs.pop_back();
    EXPECT_FALSE(verify_sop3(dropped, f));
    auto wrong_case = c;
    wrong_case.proofs[0].cases[0].embedding.map[0] = wrong_case.proofs[0].cases[0].embedding.map[1];
    EXPECT_FALSE(verify_sop3(wrong_case, f));
    auto tampered = w;
    tampered.rows = 2;
    EXPECT_THROW(sop3_certificate(tampered, f), VerificationError);
}

TEST(Dividing, FreeForClosedFamilies)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    for (int k = 1; k <= 5; ++k) {
        auto w = dividing_witness(edge_pattern(), f, k);
        EXPECT_FALSE(w.blocked);
        EXPECT_TRUE(verify_dividing(w, edge_pattern(), f));
        EXPECT_EQ(w.d.size(), k + 1);
        EXPECT_EQ(w.d.total_instances(), static_cast<std::size_t>(k));
    }
}

TEST(Dividing, BlockedWhenCopiesCompleteAMember)
{
    // A point adjacent to both ends of each edge copy: k >= 2 builds a bowtie.
    auto f = fam(b::graph_signature(), {b::bowtie()});
    PairPattern p{b::complete_graph(3), {0}, {1, 2}, {}};
    EXPECT_FALSE(dividing_witness(p, f, 1).blocked);
    auto w = dividing_witness(p, f, 2);
    EXPECT_TRUE(w.blocked);
    EXPECT_TRUE(verify_dividing(w, p, f));
    auto lie = w;
    lie.blocked = false;
    EXPECT_FALSE(verify_dividing(lie, p, f));
}

TEST(Dividing, RejectsBadPatterns)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    EXPECT_THROW(dividing_witness({b::path_graph(3), {0}, {1}, {}}, f, 2), PreconditionError);
    EXPECT_THROW(dividing_witness({b::path_graph(2), {0, 1}, {1}, {}}, f, 2), PreconditionError);
    EXPECT_THROW(dividing_witness({b::complete_graph(3), {0}, {1}, {2}}, f, 2), NotFreeError);
    EXPECT_THROW(dividing_witness(edge_pattern(), f, 0), PreconditionError);
}

TEST(Cycle, TriangleFamilyBlocksOnlyTriangles)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    for (int n = 3; n <= 7; ++n) {
        auto w = sop_cycle(edge_pattern(), f, n);
        EXPECT_EQ(w.blocked, n == 3) << n;
        EXPECT_TRUE(verify_cycle(w, edge_pattern(), f));
        EXPECT_TRUE(isomorphic(w.cycle, b::cycle_graph(n)));
    }
    auto w3 = sop_cycle(edge_pattern(), f, 3);
    auto lie = w3;
    lie.blocked = false;
    EXPECT_FALSE(verify_cycle(lie, edge_pattern(), f));
    auto wrong = sop_cycle(edge_pattern(), f, 4);
    wrong.cycle = b::complete_graph(4);
    EXPECT_FALSE(verify_cycle(wrong, edge_pattern(), f));
}

TEST(Cycle, RequiresSelfPairedPattern)
{
    auto f = fam(b::graph_signature(), {b::complete_graph(3)});
    PairPattern lopsided{b::path_graph(3), {0}, {1, 2}, {}};
    EXPECT_FALSE(self_paired(lopsided));
    EXPECT_THROW(sop_cycle(lopsided, f, 4), PreconditionError);
    EXPECT_THROW(sop_cycle(edge_pattern(), f, 2), PreconditionError);
}

TEST(Sequence, CopiesAreFreeOverTheBase)
{
    PairPattern p{b::path_graph(3), {0}, {2}, {1}};
    auto s = independent_sequence(p, 4);
    EXPECT_EQ(s.structure.size(), 5);
    EXPECT_EQ(s.structure.total_instances(), 4U); // each copy hangs off the base point
    for (std::size_t i = 0; i < s.copies.size(); ++i)
        for (std::size_t j = i + 1; j < s.copies.size(); ++j)
            EXPECT_TRUE(fa_independent(s.structure, PointSet(s.copies[i]), PointSet(s.copies[j]), PointSet(s.base)));
}
