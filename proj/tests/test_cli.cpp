#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = LITKG_FIXTURES_DIR;
const std::string kCli = LITKG_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("litkg_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, AllSucceeds) {
    auto out = scratch("all");
    EXPECT_EQ(run("all --config " + (kFixtures / "tiny.conf").string() + " --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "embeddings.txt"));
    EXPECT_TRUE(fs::exists(out / "manifest.jsonl"));
}

TEST(Cli, ExitCodes) {
    auto out = scratch("codes");
    EXPECT_EQ(run("all --input /no/such/file.nt --out " + out.string()), 2);
    EXPECT_EQ(run("all --config " + (kFixtures / "tiny.conf").string() + " --window 0 --out " + out.string()), 2);
    EXPECT_EQ(run("bogus"), 2);
    {
        std::ofstream bad(out / "bad.nt");
        bad << "<http://x/a> <http://x/p> oops\n";
    }
    EXPECT_EQ(run("all --input " + (out / "bad.nt").string() + " --out " + (out / "run").string()), 1);
    EXPECT_EQ(run("merge --in " + out.string()), 1);
}

TEST(Cli, StageSubcommandsMatchAll) {
    auto all = scratch("stages_all");
    auto staged = scratch("stages_each");
    const std::string conf = "--config " + (kFixtures / "tiny.conf").string();
    ASSERT_EQ(run("all " + conf + " --out " + all.string()), 0);
    ASSERT_EQ(run("parse " + conf + " --in " + (kFixtures / "tiny.nt").string() + " --out " + staged.string()), 0);
    for (const char* stage : {"graph-cooc", "text-cooc", "merge"}) {
        ASSERT_EQ(run(std::string(stage) + " " + conf + " --in " + staged.string()), 0) << stage;
    }
    ASSERT_EQ(run("train " + conf + " --in " + staged.string() + " --log-file " + (staged / "train_loss.tsv").string()),
              0);
    for (const char* f : {"graph.cooc", "text.cooc", "merged.cooc", "embeddings.txt", "train_loss.tsv"}) {
        EXPECT_EQ(slurp(all / f), slurp(staged / f)) << f;
    }
}

TEST(Cli, FlagsOverrideConfigFile) {
    auto a = scratch("override_a");
    auto b = scratch("override_b");
    const std::string conf = "--config " + (kFixtures / "tiny.conf").string();
    ASSERT_EQ(run("all " + conf + " --out " + a.string()), 0);
    ASSERT_EQ(run("all " + conf + " --dims 3 --no-dump-linked --out " + b.string()), 0);
    EXPECT_FALSE(fs::exists(b / "linked.txt"));
    std::ifstream emb(b / "embeddings.txt");
    std::string line;
    std::getline(emb, line);
    std::istringstream row(line);
    std::string term;
    row >> term;
    std::size_t n = 0;
    for (double v; row >> v;) ++n;
    EXPECT_EQ(n, 3u);
    EXPECT_NE(slurp(a / "manifest.jsonl"), slurp(b / "manifest.jsonl"));
}

TEST(Cli, ThreadsFromEnvironmentDoNotChangeOutput) {
    auto a = scratch("threads_a");
    auto b = scratch("threads_b");
    const std::string conf = "--config " + (kFixtures / "tiny.conf").string();
    ASSERT_EQ(run("all " + conf + " --out " + a.string()), 0);
    ASSERT_EQ(std::system(("LITKG_THREADS=4 \"" + kCli + "\" all " + conf + " --out " + b.string() + " >/dev/null 2>&1").c_str()),
              0);
    EXPECT_EQ(slurp(a / "manifest.jsonl"), slurp(b / "manifest.jsonl"));
}
