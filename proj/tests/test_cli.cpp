#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "resolvix/family.hpp"
#include "resolvix/forcing.hpp"
#include "resolvix/poset_io.hpp"

namespace fs = std::filesystem;
using namespace resolvix;

namespace {

const std::string kData = RESOLVIX_DATA_DIR;

struct Run {
    int rc = -1;
    std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
    std::string cmd = (env.empty() ? "" : env + " ") + std::string(RESOLVIX_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "resolvix_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> verbs() {
    const std::string d = kData + "/";
    return {
        "stone --poset tree2 --steps 100",
        "stone --poset grid --steps 100",
        "resolve --family " + d + "dyadic8.family",
        "negligible --family " + d + "dyadic8.family --target 1",
        "finunion --bits 3",
        "cohen --family " + d + "dyadic8.family",
        "ik-check --poset " + d + "diamond.poset",
        "build-grid --stages 3 --coloring seeded",
        "forcing validate --p " + d + "side_a.condition",
        "forcing oplus --p " + d + "side_a.condition --q " + d + "side_b.condition",
        "forcing extend --p " + d + "side_a.condition --spec 'add-point (1,0) 50'",
        "forcing run --schedule " + d + "twins.schedule",
        "space check --fragment " + d + "fragment.condition --partition " + d + "fragment.partition",
        "quotient --family " + d + "dyadic8.family",
    };
}

}  // namespace

TEST(Cli, EveryVerbSucceedsWithJson) {
    for (auto& v : verbs()) {
        auto r = cli("--seed 7 " + v);
        EXPECT_EQ(r.rc, 0) << v;
        auto j = nlohmann::json::parse(r.out, nullptr, false);
        ASSERT_FALSE(j.is_discarded()) << v;
        EXPECT_EQ(j["tool"], "resolvix");
        EXPECT_EQ(j["version"], kVersion);
    }
}

TEST(Cli, ByteDeterministicUnderSeed) {
    for (auto& v : verbs()) {
        auto a = cli("--seed 11 " + v), b = cli("--seed 11 " + v);
        EXPECT_EQ(a.out, b.out) << v;
    }
}

TEST(Cli, EnvSeedOverridesFlag) {
    auto v = "build-grid --stages 4 --coloring seeded";
    auto a = cli(std::string("--seed 1 ") + v, "RESOLVIX_SEED=5");
    auto b = cli(std::string("--seed 5 ") + v);
    auto c = cli(std::string("--seed 1 ") + v);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(cli(v, "RESOLVIX_SEED=abc").rc, 1);
}

TEST(Cli, ReportFileMatchesStdout) {
    auto rep = scratch("report.json");
    auto v = "--seed 2 resolve --family " + kData + "/dyadic8.family";
    auto a = cli(v);
    EXPECT_EQ(cli("--report " + rep.string() + " " + v).out, "");
    EXPECT_EQ(read_file(rep), a.out);
}

TEST(Cli, OutFilesRoundTrip) {
    auto g = scratch("g.poset");
    ASSERT_EQ(cli("--seed 4 build-grid --stages 2 --out " + g.string()).rc, 0);
    auto text = read_file(g);
    auto parsed = order::parse_poset(text);
    EXPECT_EQ(order::write_poset(parsed.name, parsed.poset), text);

    auto q = scratch("q.family");
    ASSERT_EQ(cli("quotient --family " + kData + "/dyadic8.family --out " + q.string()).rc, 0);
    auto qt = read_file(q);
    EXPECT_EQ(family::write_family(family::parse_family(qt)), qt);
    // quotient of a quotient is itself
    auto q2 = scratch("q2.family");
    ASSERT_EQ(cli("quotient --family " + q.string() + " --out " + q2.string()).rc, 0);
    EXPECT_EQ(family::parse_family(read_file(q2)).ground().size(), family::parse_family(qt).ground().size());

    auto c = scratch("o.condition");
    ASSERT_EQ(cli("forcing oplus --p " + kData + "/side_a.condition --q " + kData + "/side_b.condition --out " + c.string()).rc, 0);
    auto ct = read_file(c);
    auto back = forcing::parse_condition(ct);
    EXPECT_TRUE(forcing::valid(back));
    EXPECT_EQ(cli("forcing leq --p " + c.string() + " --q " + kData + "/side_a.condition").rc, 0);
    EXPECT_EQ(cli("forcing validate --p " + c.string()).rc, 0);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("").rc, 1);
    EXPECT_EQ(cli("stone --poset /nonexistent/file").rc, 1);
    EXPECT_EQ(cli("finunion --bits 9").rc, 1);
    EXPECT_EQ(cli("build-grid --coloring odd").rc, 1);
    auto bad = scratch("bad.family");
    std::ofstream(bad) << "this is not a family\n";
    EXPECT_EQ(cli("resolve --family " + bad.string()).rc, 1);
    // property violation: the twins are incomparable
    EXPECT_EQ(cli("forcing leq --p " + kData + "/side_a.condition --q " + kData + "/side_b.condition").rc, 3);
    // library refusals
    EXPECT_EQ(cli("stone --poset " + kData + "/diamond.poset").rc, 2);
    EXPECT_EQ(cli("negligible --family " + kData + "/dyadic8.family --target 4").rc, 2);
    EXPECT_EQ(cli("--version").rc, 0);
}
