#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fraisse/cli.hpp"

using fraisse::report::json;
namespace fs = std::filesystem;

namespace {

std::string sample(const std::string &name) { return std::string(FRAISSE_SAMPLES) + "/" + name; }

struct Outcome
{
    int code;
    json report;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = fraisse::cli::run_command(args, out, err);
    json r;
    if (!out.str().empty())
        r = json::parse(out.str());
    return {code, r, err.str()};
}

fs::path scratch(const std::string &name)
{
    auto dir = fs::temp_directory_path() / "fraisse-lab-tests";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path &p, const std::string &text)
{
    std::ofstream(p) << text;
}

// Writes the report to disk and runs `verify` on it.
Outcome verify(const json &report, const std::string &tag)
{
    auto p = scratch(tag + ".json");
    write(p, report.dump(2));
    return run({"verify", p.string()});
}

json without_timing(json r)
{
    r["timing"]["ms"] = 0;
    return r;
}

} // namespace

TEST(Cli, ReportEnvelope)
{
    auto o = run({"classify", sample("henson3.fl"), "--family", "henson3"});
    ASSERT_EQ(o.code, 0);
    std::vector<std::string> keys;
    for (auto it = o.report.begin(); it != o.report.end(); ++it)
        keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"schema", "tool", "version", "command", "inputs", "verdict", "result",
                                              "diagnostics", "timing"}));
    EXPECT_EQ(o.report["schema"], 1);
    EXPECT_EQ(o.report["tool"], "fraisse-lab");
    EXPECT_EQ(o.report["command"]["name"], "classify");
    EXPECT_TRUE(o.report["diagnostics"].empty());
}

TEST(Cli, ClassifyNamedFamilies)
{
    struct Case
    {
        std::string file, family, verdict;
    };
    for (const auto &c : std::vector<Case>{{"henson3.fl", "henson3", "NotSimple"},
                                           {"henson3.fl", "henson4", "NotSimple"},
                                           {"henson3.fl", "redundant", "NotSimple"},
                                           {"randomgraph.fl", "empty", "Simple"},
                                           {"bowtie.fl", "bowtie", "Undetermined"},
                                           {"hyper3.fl", "no_k4", "Simple"},
                                           {"hyper3.fl", "no_k5", "Simple"},
                                           {"urysohn.fl", "urysohn", "NotSimple"}}) {
        auto o = run({"classify", sample(c.file), "--family", c.family});
        ASSERT_EQ(o.code, 0) << o.err;
        EXPECT_EQ(o.report["verdict"], c.verdict) << c.family;
        EXPECT_EQ(verify(o.report, "classify").code, 0) << c.family;
    }
}

TEST(Cli, EveryCommandVerifies)
{
    auto gen = scratch("generated.fl");
    std::vector<std::pair<std::vector<std::string>, int>> cases = {
        {{"minimalize", sample("henson3.fl"), "--family", "redundant"}, 0},
        {{"irreducible", sample("henson3.fl"), "--structure", "K3", "--k", "2"}, 0},
        {{"irreducible", sample("henson3.fl"), "--structure", "K3", "--k", "3"}, 1},
        {{"generate", sample("henson3.fl"), "--family", "henson3", "--size", "20", "--seed", "3"}, 0},
        {{"generate", sample("henson3.fl"), "--family", "henson3", "--size", "20", "--fill", "--out", gen.string()},
         0},
        {{"audit", sample("henson3.fl"), "--structure", "C5", "--family", "henson3", "--depth", "1"}, 0},
        {{"audit", sample("henson3.fl"), "--structure", "C5", "--family", "henson3", "--depth", "2"}, 1},
        {{"audit", sample("henson3.fl"), "--structure", "K3", "--family", "henson3"}, 1},
        {{"witness", "nonsimplicity", sample("henson3.fl"), "--family", "henson3", "--rows", "4"}, 0},
        {{"witness", "sop3", sample("henson3.fl"), "--family", "henson3"}, 0},
        {{"witness", "dividing", sample("henson3.fl"), "--family", "henson3", "--pattern", "edge"}, 0},
        {{"witness", "sop-cycle", sample("henson3.fl"), "--family", "henson3", "--pattern", "edge"}, 0},
        {{"witness", "sop-cycle", sample("henson3.fl"), "--family", "henson3", "--pattern", "edge", "--n", "5"}, 0},
        {{"witness", "dividing", sample("hyper3.fl"), "--family", "no_k4", "--pattern", "split", "--copies", "4"}, 0},
        {{"axioms", "--signature", "graph", "--max-size", "3"}, 0},
        {{"embed", sample("henson3.fl"), "--a", "P2", "--b", "C5", "--mode", "induced"}, 0},
        {{"embed", sample("henson3.fl"), "--a", "K3", "--b", "C5"}, 1},
    };
    for (const auto &[args, code] : cases) {
        auto o = run(args);
        ASSERT_EQ(o.code, code) << args[0] << " " << o.err;
        auto v = verify(o.report, args[0]);
        EXPECT_EQ(v.code, 0) << args[0] << ": " << v.report["result"]["reason"];
        EXPECT_EQ(v.report["result"]["verified_command"], args[0]);
    }
}

TEST(Cli, WitnessVerdicts)
{
    auto rows = run({"witness", "nonsimplicity", sample("henson3.fl"), "--family", "henson3", "--rows", "3"});
    EXPECT_EQ(rows.report["verdict"], "certified");
    EXPECT_EQ(rows.report["command"]["kind"], "nonsimplicity");
    auto c3 = run({"witness", "sop-cycle", sample("henson3.fl"), "--family", "henson3", "--pattern", "edge"});
    EXPECT_EQ(c3.report["verdict"], "blocked");
    auto c4 = run({"witness", "sop-cycle", sample("henson3.fl"), "--family", "henson3", "--pattern", "edge",
                   "--n", "4"});
    EXPECT_EQ(c4.report["verdict"], "free");
    auto bad = run({"witness", "nonsimplicity", sample("bowtie.fl"), "--family", "bowtie"});
    EXPECT_EQ(bad.code, 2);
}

TEST(Cli, EmbedExitCodes)
{
    auto budget = run({"embed", sample("henson3.fl"), "--a", "K3", "--b", "C5", "--budget", "1"});
    EXPECT_EQ(budget.code, 3);
    EXPECT_EQ(budget.report["verdict"], "budget-exceeded");
    auto weak = run({"embed", sample("henson3.fl"), "--a", "C5", "--b", "K4"});
    EXPECT_EQ(weak.code, 1);
    auto found = run({"embed", sample("henson3.fl"), "--a", "P2", "--b", "K4", "--mode", "weak"});
    EXPECT_EQ(found.code, 0);
    EXPECT_EQ(found.report["verdict"], "found");
}

TEST(Cli, InputErrors)
{
    auto missing = run({"classify", "/nonexistent/file.fl", "--family", "x"});
    EXPECT_EQ(missing.code, 2);
    EXPECT_EQ(missing.report["verdict"], "error");
    EXPECT_FALSE(missing.report["diagnostics"].empty());

    auto bad = scratch("bad.fl");
    write(bad, "signature graph { rel E : 2 symmetric }\nstructure A over graph { points 2; E: (1,1) }\n");
    auto parse = run({"classify", bad.string(), "--family", "x"});
    EXPECT_EQ(parse.code, 2);
    EXPECT_EQ(parse.report["diagnostics"][0]["code"], "repeated-coordinate");
    EXPECT_EQ(parse.report["diagnostics"][0]["line"], 2);
    EXPECT_NE(parse.err.find("repeated-coordinate"), std::string::npos);

    EXPECT_EQ(run({"classify", sample("henson3.fl"), "--family", "nope"}).code, 2);
    EXPECT_EQ(run({"classify", sample("henson3.fl")}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"embed", sample("henson3.fl"), "--a", "P2", "--b", "K4", "--mode", "sideways"}).code, 2);
}

TEST(Cli, ReportsAreIndependentOfThreadCount)
{
    std::vector<std::vector<std::string>> cmds = {
        {"classify", sample("urysohn.fl"), "--family", "urysohn"},
        {"generate", sample("henson3.fl"), "--family", "henson3", "--size", "25", "--seed", "7"},
        {"axioms", "--signature", "graph", "--max-size", "3"},
    };
    for (const auto &cmd : cmds) {
        std::string baseline;
        for (const char *t : {"1", "3", "8"}) {
            auto args = cmd;
            args.insert(args.end(), {"--threads", t});
            auto o = run(args);
            ASSERT_EQ(o.code, 0) << o.err;
            auto r = without_timing(o.report);
            r["command"]["argv"] = json::array();
            if (baseline.empty())
                baseline = r.dump();
            EXPECT_EQ(r.dump(), baseline) << cmd[0] << " threads=" << t;
        }
    }
}

TEST(Cli, ThreadCountFallsBackToEnvironment)
{
    ::setenv("FRAISSE_LAB_THREADS", "2", 1);
    auto a = run({"classify", sample("henson3.fl"), "--family", "henson3"});
    ::setenv("FRAISSE_LAB_THREADS", "junk", 1);
    auto b = run({"classify", sample("henson3.fl"), "--family", "henson3"});
    ::unsetenv("FRAISSE_LAB_THREADS");
    EXPECT_EQ(fraisse::resolve_threads(3), 3);
    EXPECT_GE(fraisse::resolve_threads(0), 1);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(without_timing(a.report), without_timing(b.report));
}

TEST(Cli, GeneratedWorkspaceIsSelfContained)
{
    auto out = scratch("self_contained.fl");
    auto g = run({"generate", sample("henson3.fl"), "--family", "henson3", "--size", "30", "--out", out.string()});
    ASSERT_EQ(g.code, 0) << g.err;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    auto parsed = fraisse::dsl::parse_workspace(ss.str());
    ASSERT_TRUE(parsed.ok());
    auto a = run({"audit", out.string(), "--structure", "henson3_generic", "--family", "henson3", "--depth", "2"});
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.report["verdict"], "complete");

    auto m = scratch("minimal.fl");
    auto mm = run({"minimalize", sample("henson3.fl"), "--family", "redundant", "--out", m.string()});
    ASSERT_EQ(mm.code, 0);
    auto again = run({"classify", m.string(), "--family", "redundant"});
    EXPECT_EQ(again.report["verdict"], "NotSimple");
    EXPECT_EQ(again.report["result"]["family"]["members"].size(), 1U);
}

TEST(Cli, TamperedReportsAreRejected)
{
    auto w = run({"witness", "nonsimplicity", sample("henson3.fl"), "--family", "henson3", "--rows", "3"});
    ASSERT_EQ(w.code, 0);
    auto flipped = w.report;
    flipped["verdict"] = "blocked";
    EXPECT_EQ(verify(flipped, "tamper1").code, 1);

    auto c = run({"classify", sample("henson3.fl"), "--family", "henson3"});
    auto lie = c.report;
    lie["verdict"] = "Simple";
    EXPECT_EQ(verify(lie, "tamper2").code, 1);

    auto e = run({"embed", sample("henson3.fl"), "--a", "P2", "--b", "C5"});
    auto bad_map = e.report;
    bad_map["result"]["embedding"]["map"][1] = bad_map["result"]["embedding"]["map"][0];
    EXPECT_EQ(verify(bad_map, "tamper3").code, 1);

    auto garbage = scratch("garbage.json");
    write(garbage, "{ not json");
    EXPECT_EQ(run({"verify", garbage.string()}).code, 2);
}
