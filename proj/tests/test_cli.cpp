#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flatreg/cli.hpp"
#include "flatreg/errors.hpp"
#include "flatreg/multiscale.hpp"

using namespace flatreg;
using json = nlohmann::json;

namespace {

struct CliRun {
    int code = 0;
    std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    CliRun r;
    r.code = run_cli(args, o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("flatreg_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') v.push_back(line);
    return v;
}

} // namespace

TEST(ParseComplex, Forms) {
    EXPECT_EQ(parse_complex("0.1"), cplx(0.1, 0.0));
    EXPECT_EQ(parse_complex("0.1i"), cplx(0.0, 0.1));
    EXPECT_EQ(parse_complex("0.3-0.2i"), cplx(0.3, -0.2));
    EXPECT_EQ(parse_complex("1e-3+2e-4i"), cplx(1e-3, 2e-4));
    EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
    const cplx z = parse_complex("0.05@1.2");
    EXPECT_NEAR(std::abs(z - std::polar(0.05, 1.2)), 0.0, 1e-16);
    EXPECT_THROW(parse_complex("abc"), ConfigError);
    EXPECT_EQ(parse_real_list("0.1,0.2").size(), 2u);
}

TEST(Hash, Fnv1aKnownValue) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Cli, ScanWritesOneRowPerEps) {
    const CliRun r = run({"scan", "--chart", "torus", "--k", "1", "--eps", "0.1,0.2,0.4", "--samples", "20000",
                       "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = data_lines(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "chart,k,eps_1,estimate,stderr,samples,seed");
    EXPECT_EQ(rows[1].rfind("torus,1,", 0), 0u);
    EXPECT_NE(r.out.find("# config_hash: "), std::string::npos);
    EXPECT_NE(r.out.find("# seed: 3"), std::string::npos);
    EXPECT_NE(r.out.find(std::string("# flatreg ") + kVersion), std::string::npos);
}

TEST(Cli, ScanTwoEpsColumns) {
    const CliRun r = run({"scan", "--chart", "torus", "--k", "2", "--eps", "0.5,1", "--samples", "5000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = data_lines(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], "chart,k,eps_1,eps_2,estimate,stderr,samples,seed");
}

TEST(Cli, OutputIsThreadIndependent) {
    const std::vector<std::string> base = {"scan", "--chart", "torus", "--eps", "0.3,0.6", "--samples", "30000"};
    auto with = [&](const char* n) {
        auto a = base;
        a.insert(a.end(), {"--threads", n});
        return run(a);
    };
    const CliRun a = with("1"), b = with("4");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, EmptyEpsIsConfigError) {
    const CliRun r = run({"scan", "--chart", "torus", "--eps", ""});
    EXPECT_EQ(r.code, 2);
    const json e = json::parse(r.err);
    EXPECT_EQ(e["error"]["kind"], "config");
}

TEST(Cli, UnknownConfigKeyIsConfigError) {
    const std::string cfg = temp_file("cfg.json", R"({"chart": "torus", "bogus": 1})");
    const CliRun r = run({"scan", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST(Cli, ConfigFileAndFlagOverride) {
    const std::string cfg =
        temp_file("cfg2.json", R"({"chart": "torus", "eps": [0.2, 0.4], "samples": 5000, "seed": 9})");
    const CliRun a = run({"scan", "--config", cfg});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("# seed: 9"), std::string::npos);
    const CliRun b = run({"scan", "--config", cfg, "--seed", "10"});
    EXPECT_NE(b.out.find("# seed: 10"), std::string::npos);
}

TEST(Cli, UnknownSubcommandIsConfigError) { EXPECT_EQ(run({"frobnicate"}).code, 2); }

TEST(Cli, HelpExitsZero) {
    const CliRun r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("scan"), std::string::npos);
}

TEST(Cli, NoninjReportsJson) {
    const std::string g = temp_file("h31.json", to_json(h31_graph(2)));
    const CliRun r = run({"noninj", "--graph", g, "--t", "0.05", "--pairs", "500", "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_LT(j["period_distance"].get<double>(), 1e-12);
    EXPECT_FALSE(j["same_sector_possible"].get<bool>());
    EXPECT_EQ(j["header"]["seed"], 2);
}

TEST(Cli, InvalidGraphIsConfigError) {
    EnhancedLevelGraph G = h31_graph(2);
    G.half_edges[1].order = 5;
    const std::string g = temp_file("bad.json", to_json(G));
    EXPECT_EQ(run({"noninj", "--graph", g}).code, 2);
}

TEST(Cli, VerifyPeriodsResidueFamily) {
    const CliRun r = run({"verify-periods", "--family", "residue", "--b", "2", "--r", "0.3+0.1i", "--t-hi", "0.1",
                       "--t-lo", "1e-4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j.contains("header"));
    EXPECT_NE(r.out.find("config_hash"), std::string::npos);
}

TEST(Cli, OrderingsSingleForTwoLevels) {
    const std::string g = temp_file("h22.json", to_json(h22_graph()));
    const CliRun r = run({"orderings", "--graph", g});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# orderings: 1"), std::string::npos);
}

TEST(Cli, PlumbWritesPeriods) {
    const std::string g = temp_file("h31b.json", to_json(h31_graph(2)));
    const CliRun r = run({"plumb", "--graph", g, "--t", "0.01+0.002i"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_lines(r.out).size(), 2u);
}

TEST(Cli, OutFlagWritesFile) {
    const auto path = (std::filesystem::temp_directory_path() / "flatreg_test_out.csv").string();
    std::remove(path.c_str());
    const CliRun r = run({"scan", "--chart", "torus", "--eps", "0.3,0.6", "--samples", "2000", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_TRUE(std::filesystem::exists(path));
}
