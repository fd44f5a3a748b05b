#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace fraisse;
namespace b = fraisse::builders;

namespace {

std::string first_code(const std::string &text)
{
    auto r = dsl::parse_workspace(text);
    EXPECT_FALSE(r.ok());
    return r.diagnostics.empty() ? "" : r.diagnostics.front().code;
}

const char *kGraph = "signature graph { rel E : 2 symmetric }\n";

std::string slurp(const std::string &path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Dsl, ParsesTheBasicExample)
{
    auto r = dsl::parse_workspace("signature graph { rel E : 2 symmetric }\n"
                                  "structure K3 over graph { points 3; E: (0,1) (0,2) (1,2) }\n");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.workspace->signatures.size(), 1U);
    ASSERT_EQ(r.workspace->structures.size(), 1U);
    EXPECT_TRUE(isomorphic(r.workspace->structure("K3").structure, b::complete_graph(3)));
}

TEST(Dsl, CommentsLineEndingsAndSeparators)
{
    auto r = dsl::parse_workspace("# leading comment\r\n"
                                  "signature s { rel R : 2 ; rel H : 3 symmetric } # trailing\r\n"
                                  "structure A over s {\r\n  points 3\r\n  R: (1,0) (1,0)\r\n  H: (2,0,1) (0,1,2);\r\n}\r\n"
                                  "structure B over s { points 1 }\n"
                                  "family F over s { forbid A; forbid B }\n"
                                  "family Empty over s { }\n");
    ASSERT_TRUE(r.ok()) << r.diagnostics.front().str();
    const auto &a = r.workspace->structure("A").structure;
    EXPECT_EQ(a.instance_count(0), 1U);
    EXPECT_TRUE(a.holds(0, {1, 0}));
    EXPECT_FALSE(a.holds(0, {0, 1}));
    EXPECT_EQ(a.instance_count(1), 1U);
    EXPECT_EQ(r.workspace->family("F").size(), 2U);
    EXPECT_TRUE(r.workspace->family("Empty").empty());
}

TEST(Dsl, DistinctDiagnosticCodes)
{
    std::string g = kGraph;
    EXPECT_EQ(first_code(g + "structure A over graph { points 2; E: (0,0) }"), "repeated-coordinate");
    EXPECT_EQ(first_code("signature h { rel H : 3 }\nstructure A over h { points 3; H: (0,1) }"), "arity-mismatch");
    EXPECT_EQ(first_code(g + "structure A over graph { points 2; E: (0,2) }"), "out-of-range");
    EXPECT_EQ(first_code(g + "structure A over nope { points 2 }"), "unresolved-name");
    EXPECT_EQ(first_code(g + "structure A over graph { points 2; F: (0,1) }"), "unresolved-name");
    EXPECT_EQ(first_code(g + "family F over graph { forbid Missing }"), "unresolved-name");
    EXPECT_EQ(first_code(g + "structure A over graph { points 2 E (0,1) }"), "syntax");
    EXPECT_EQ(first_code(g + "structure A over graph { points 1 }\nstructure A over graph { points 2 }"),
              "duplicate-name");
    EXPECT_EQ(first_code("signature e { }"), "empty-signature");
    EXPECT_EQ(first_code(g + "signature h { rel H : 3 }\nstructure A over h { points 3 }\n"
                             "family F over graph { forbid A }"),
              "signature-mismatch");
    EXPECT_EQ(first_code(g + "structure P over graph { points 3 }\n"
                             "pattern p over graph { carrier P; left (0); right (1) }"),
              "invalid-pattern");
    EXPECT_EQ(first_code("bogus"), "syntax");
}

TEST(Dsl, DiagnosticsCarryPositionAndCause)
{
    auto r = dsl::parse_workspace(std::string(kGraph) + "structure A over graph {\n  points 2; E: (0,0)\n}");
    ASSERT_EQ(r.diagnostics.size(), 1U);
    const auto &d = r.diagnostics.front();
    EXPECT_EQ(d.line, 3);
    EXPECT_EQ(d.column, 16);
    EXPECT_NE(d.message.find("repeated coordinate violates irreflexivity"), std::string::npos);
    EXPECT_NE(d.str().find("3:16: error[repeated-coordinate]"), std::string::npos);
}

TEST(Dsl, PatternsResolveAndValidate)
{
    auto r = dsl::parse_workspace(std::string(kGraph) + "structure P over graph { points 3; E: (0,1) (1,2) }\n"
                                                        "pattern p over graph { base (1); right (2); carrier P; left (0) }");
    ASSERT_TRUE(r.ok());
    auto p = r.workspace->pattern("p");
    EXPECT_EQ(p.base, (std::vector<int>{1}));
    EXPECT_EQ(p.carrier.size(), 3);
    EXPECT_THROW(r.workspace->pattern("q"), dsl::LookupError);
}

// print(parse(x)) parses to canonically equal structures.
TEST(Dsl, RoundTripOnRandomWorkspaces)
{
    std::mt19937_64 rng(31);
    auto sig = make_signature({{"E", 2, true}, {"R", 2, false}, {"T", 3, false}});
    for (int rep = 0; rep < 50; ++rep) {
        dsl::Workspace ws;
        ws.signatures.push_back({"s", sig});
        dsl::NamedFamily fam{"F", "s", {}};
        for (int i = 0; i < 4; ++i) {
            auto name = "S" + std::to_string(i);
            auto s = oracle::random_structure(sig, static_cast<int>(rng() % 5), rng, 0.3);
            ws.structures.push_back({name, "s", s});
            if (s.size() > 0)
                fam.members.push_back(name);
        }
        ws.families.push_back(fam);
        auto text = dsl::print_workspace(ws);
        auto r = dsl::parse_workspace(text);
        ASSERT_TRUE(r.ok()) << text;
        ASSERT_EQ(r.workspace->structures.size(), ws.structures.size());
        for (std::size_t i = 0; i < ws.structures.size(); ++i) {
            ASSERT_EQ(r.workspace->structures[i].structure, ws.structures[i].structure);
            ASSERT_EQ(canonical_form(r.workspace->structures[i].structure),
                      canonical_form(ws.structures[i].structure));
        }
        ASSERT_EQ(dsl::print_workspace(*r.workspace), text);
    }
}

TEST(Dsl, SamplesParseAndRoundTrip)
{
    for (const char *name : {"henson3.fl", "randomgraph.fl", "bowtie.fl", "hyper3.fl", "urysohn.fl"}) {
        auto r = dsl::parse_workspace(slurp(std::string(FRAISSE_SAMPLES) + "/" + name));
        ASSERT_TRUE(r.ok()) << name << ": " << r.diagnostics.front().str();
        auto again = dsl::parse_workspace(dsl::print_workspace(*r.workspace));
        ASSERT_TRUE(again.ok());
        for (const auto &s : r.workspace->structures)
            EXPECT_EQ(again.workspace->structure(s.name).structure, s.structure) << name;
        for (const auto &p : r.workspace->patterns)
            EXPECT_EQ(again.workspace->pattern(p.name).base, r.workspace->pattern(p.name).base);
    }
}
