#include "wdvv/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wdvv;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "wdvv");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

fs::path temp_file(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("wdvv-cli-" + std::to_string(::getpid()) + "-" + name);
    fs::remove(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, InvariantExamples)
{
    EXPECT_EQ(run({"invariant", "--d", "6", "--alpha", "2^8", "--k", "1"}).out, "-92\n");
    EXPECT_EQ(run({"invariant", "--d", "1", "--k", "0"}).out, "1\n");
    EXPECT_EQ(run({"invariant", "--d", "1", "--k", "1"}).out, "0\n");
    EXPECT_EQ(run({"invariant", "--d", "6", "--beta", "2^3", "--k", "5", "--mode", "welschinger"}).out, "78\n");
    EXPECT_EQ(run({"invariant", "--d", "1", "--alpha", "1,1", "--mode", "both"}).out,
              "gamma=-2\nwelschinger=1\nsign=-1\n");
}

TEST(Cli, TraceNamesRelation)
{
    const Result r = run({"invariant", "--d", "6", "--alpha", "2^5", "--k", "7", "--trace"});
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 5u);
    EXPECT_EQ(ls[0], "8320");
    EXPECT_EQ(ls[1], "mu=8");
    EXPECT_EQ(ls[2], "l=0");
    EXPECT_EQ(ls[3].rfind("relation=OGW", 0), 0u) << ls[3];
}

TEST(Cli, MalformedInputExitsTwo)
{
    EXPECT_EQ(run({"invariant", "--d", "6", "--alpha", "2^x"}).code, 2);
    EXPECT_EQ(run({"invariant", "--alpha", "2"}).code, 2);
    EXPECT_EQ(run({"invariant", "--d", "2", "--alpha", "1,1", "--r", "3"}).code, 2);
    EXPECT_EQ(run({"invariant", "--d", "1", "--k", "1", "--mode", "welschinger"}).code, 2);
    EXPECT_EQ(run({"nosuchcommand"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, TableCsv)
{
    const Result r = run({"table", "--d", "6", "--alpha", "2^5", "--alpha", "2^6", "--alpha", "2^7", "--alpha", "2^8",
                          "--l", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "d,alpha,beta,k,l,gamma,welschinger,sign\n"
                     "6,2^5,0,7,0,8320,4160,1\n"
                     "6,2^6,0,5,0,-2000,1000,-1\n"
                     "6,2^7,0,3,0,448,224,1\n"
                     "6,2^8,0,1,0,-92,46,-1\n");
    const Result big = run({"table", "--d", "10", "--alpha", "3^9", "--k", "2"});
    ASSERT_EQ(big.code, 0) << big.err;
    EXPECT_NE(big.out.find(",-713472,"), std::string::npos) << big.out;
}

TEST(Cli, EmptyRangeGivesHeaderOnly)
{
    const Result r = run({"table", "--d", "3..2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "d,alpha,beta,k,l,gamma,welschinger,sign\n");
}

TEST(Cli, TableJson)
{
    const Result r = run({"table", "--d", "1..2", "--alpha", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_TRUE(doc.is_array());
    ASSERT_FALSE(doc.empty());
    for (const auto& row : doc) {
        for (const char* field : {"d", "alpha", "beta", "k", "l", "gamma", "welschinger", "sign"})
            EXPECT_TRUE(row.contains(field)) << field;
        const RelativeClassIndex key{row["d"].get<int>(), parse_multi_index(row["alpha"].get<std::string>()), {},
                                     row["k"].get<int>()};
        EXPECT_EQ(run({"invariant", "--d", std::to_string(key.d), "--alpha", "1", "--k", std::to_string(key.k)}).out,
                  row["gamma"].get<std::string>() + "\n");
    }
}

TEST(Cli, VerifyPasses)
{
    const Result r = run({"verify"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find(", 0 failures"), std::string::npos);
    EXPECT_NE(r.out.find("also printed as -96"), std::string::npos);
}

TEST(Cli, CorruptSeedFailsVerify)
{
    const Result r = run({"verify", "--corrupt-line-seed", "2"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("first failure:"), std::string::npos);
}

TEST(Cli, WarmAndColdCacheAgree)
{
    const fs::path cache = temp_file("warm");
    const std::vector<std::string> args = {"--cache", cache.string(), "table", "--d", "4..5", "--alpha", "1^2",
                                           "--beta", "1"};
    std::vector<std::string> plain(args.begin() + 2, args.end());
    const Result none = run(plain);
    const Result cold = run(args);
    const std::string saved = slurp(cache);
    const Result warm = run(args);
    EXPECT_EQ(cold.code, 0);
    EXPECT_EQ(cold.out, none.out);
    EXPECT_EQ(warm.out, cold.out);
    EXPECT_FALSE(saved.empty());
    EXPECT_EQ(slurp(cache), saved);
    fs::remove(cache);
}

TEST(Cli, ThreadCountDoesNotChangeOutput)
{
    const std::vector<std::string> args = {"table", "--d", "3..6", "--alpha", "2^3", "--alpha", "1^4", "--beta", "1"};
    std::vector<std::string> three = args;
    three.insert(three.begin(), {"--threads", "3"});
    const Result a = run(args), b = run(three);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ModesAndConvertAreConsistent)
{
    const std::vector<std::string> key = {"--d", "6", "--alpha", "2^2", "--beta", "2^2", "--k", "5"};
    auto with = [&](std::vector<std::string> head, std::vector<std::string> tail = {}) {
        head.insert(head.end(), key.begin(), key.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return run(head);
    };
    const std::string gamma = lines(with({"invariant"}).out).at(0);
    const std::string w = lines(with({"invariant"}, {"--mode", "welschinger"}).out).at(0);
    EXPECT_EQ(gamma, "-472");
    EXPECT_EQ(lines(with({"convert"}, {"--gamma", gamma}).out).at(0), w);
    EXPECT_EQ(lines(with({"convert"}, {"--welschinger", w}).out).at(0), gamma);
}

TEST(Cli, NonIntegralConvertExitsThree)
{
    const Result r = run({"convert", "--d", "1", "--k", "0", "--gamma", "1/3"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("not an integer"), std::string::npos) << r.err;
}

TEST(Cli, CacheStatsAndClear)
{
    const fs::path cache = temp_file("stats");
    ASSERT_EQ(run({"--cache", cache.string(), "invariant", "--d", "4", "--alpha", "1,1", "--k", "3"}).code, 0);
    const Result s = run({"--cache", cache.string(), "cache", "stats"});
    EXPECT_EQ(s.code, 0);
    EXPECT_EQ(s.out.find("open=0"), std::string::npos) << s.out;
    EXPECT_EQ(run({"--cache", cache.string(), "cache", "clear"}).code, 0);
    EXPECT_EQ(slurp(cache), "wdvv-enum-cache v1\n");
    const Result after = run({"--cache", cache.string(), "cache", "stats"});
    EXPECT_NE(after.out.find("open=0\nclosed=0"), std::string::npos) << after.out;
    EXPECT_EQ(run({"cache", "stats"}).code, 2);
    fs::remove(cache);
}

TEST(Cli, CorruptCacheIsLenientUnlessStrict)
{
    const fs::path cache = temp_file("corrupt");
    {
        std::ofstream(cache) << "wdvv-enum-cache v1\ngarbage\n";
    }
    const Result lenient = run({"--cache", cache.string(), "invariant", "--d", "1", "--k", "0"});
    EXPECT_EQ(lenient.code, 0);
    EXPECT_EQ(lenient.out, "1\n");
    EXPECT_NE(lenient.err.find("warning"), std::string::npos);
    EXPECT_EQ(slurp(cache), "wdvv-enum-cache v1\ngarbage\n");
    EXPECT_EQ(run({"--strict-cache", "--cache", cache.string(), "invariant", "--d", "1", "--k", "0"}).code, 2);
    fs::remove(cache);
}
