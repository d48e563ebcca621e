#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "litkg/error.hpp"
#include "litkg/pipeline.hpp"

using namespace litkg;

namespace {

const fs::path kFixtures = LITKG_FIXTURES_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Fresh scratch directory under the test's working directory.
fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("litkg_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig tiny_config() {
    PipelineConfig cfg;
    apply_config_file(cfg, kFixtures / "tiny.conf");
    return cfg;
}

}  // namespace

TEST(Config, FileValuesAndDefaults) {
    PipelineConfig cfg = tiny_config();
    EXPECT_EQ(fs::path(cfg.input), (kFixtures / "tiny.nt").lexically_normal());
    EXPECT_EQ(cfg.glove.dims, 8u);
    EXPECT_EQ(cfg.text.min_word_count, 1u);
    EXPECT_EQ(cfg.kth, 100u);
    EXPECT_TRUE(cfg.dump_linked);
    EXPECT_EQ(cfg.abstract_properties, std::vector<std::string>{kDbpediaAbstract});
    EXPECT_DOUBLE_EQ(cfg.glove.x_max, 100.0);
    cfg.validate();
}

TEST(Config, ErrorsNameTheField) {
    PipelineConfig cfg;
    try {
        cfg.set("window", "three");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "window");
    }
    EXPECT_THROW(cfg.set("no-such-key", "1"), ConfigError);
    cfg.input = "/definitely/not/here.nt";
    try {
        cfg.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "input");
    }
    cfg.input = (kFixtures / "tiny.nt").string();
    cfg.kth = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.kth = 100;
    cfg.ppr.restart_alpha = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, RenderReadsBack) {
    PipelineConfig cfg = tiny_config();
    cfg.abstract_properties.push_back("http://x/comment");
    std::istringstream text(render_config(cfg));
    PipelineConfig back;
    apply_config(back, text);
    EXPECT_EQ(back.entries(), cfg.entries());
}

TEST(Pipeline, DeterministicRunsProduceIdenticalManifests) {
    auto a = scratch("det_a");
    auto b = scratch("det_b");
    PipelineConfig cfg = tiny_config();
    run_pipeline(cfg, a);
    run_pipeline(cfg, b);
    EXPECT_EQ(slurp(a / stages::kManifest), slurp(b / stages::kManifest));
    EXPECT_EQ(slurp(a / stages::kEmbeddings), slurp(b / stages::kEmbeddings));
}

TEST(Pipeline, ManifestListsEveryOutputFile) {
    auto out = scratch("complete");
    auto run = run_pipeline(tiny_config(), out);
    std::set<std::string> listed;
    for (const auto& record : run.manifest) {
        if (record.at("kind") != "stage") continue;
        for (const auto& [file, hash] : record.at("outputs").items()) {
            listed.insert(file);
            EXPECT_EQ(hash.get<std::string>(), sha256_file(out / file));
        }
    }
    for (const auto& entry : fs::directory_iterator(out)) {
        const std::string name = entry.path().filename().string();
        if (name == stages::kManifest) continue;
        EXPECT_EQ(listed.count(name), 1u) << name;
    }
    EXPECT_EQ(read_manifest(out / stages::kManifest), run.manifest);
}

TEST(Pipeline, OutputsCoverVocabularyAndAreFinite) {
    auto out = scratch("outputs");
    run_pipeline(tiny_config(), out);
    std::ifstream vin(out / stages::kVocab);
    Vocabulary vocab = read_vocabulary(vin);
    EXPECT_EQ(vocab.count(TermKind::Entity), 6u);
    EXPECT_EQ(vocab.count(TermKind::Predicate), 3u);

    std::ifstream emb(out / stages::kEmbeddings);
    std::size_t lines = 0;
    for (std::string line; std::getline(emb, line); ++lines) {
        std::istringstream row(line);
        std::string term;
        row >> term;
        EXPECT_EQ(term, vocab.name(static_cast<TermId>(lines)));
        std::size_t dims = 0;
        for (double v; row >> v; ++dims) EXPECT_TRUE(std::isfinite(v));
        EXPECT_EQ(dims, 8u);
    }
    EXPECT_EQ(lines, vocab.size());

    const std::string linked = slurp(out / stages::kLinked);
    EXPECT_NE(linked.find("<http://dbpedia.org/resource/Berlin> is the capital of <http://dbpedia.org/resource/Germany>"),
              std::string::npos);
}

TEST(Pipeline, DeletingEmbeddingsRerunsOnlyTraining) {
    auto out = scratch("resume");
    PipelineConfig cfg = tiny_config();
    auto first = run_pipeline(cfg, out);
    EXPECT_EQ(first.executed.size(), 5u);
    const std::string manifest = slurp(out / stages::kManifest);

    auto second = run_pipeline(cfg, out);
    EXPECT_TRUE(second.executed.empty());

    fs::remove(out / stages::kEmbeddings);
    auto third = run_pipeline(cfg, out);
    EXPECT_EQ(third.executed, std::vector<std::string>{"train"});
    EXPECT_EQ(slurp(out / stages::kManifest), manifest);

    cfg.kth = 3;
    auto fourth = run_pipeline(cfg, out);
    EXPECT_EQ(fourth.executed, (std::vector<std::string>{"merge", "train"}));
}

TEST(Pipeline, ConfigEchoReproducesRun) {
    auto a = scratch("echo_a");
    auto b = scratch("echo_b");
    run_pipeline(tiny_config(), a);
    PipelineConfig echoed = config_from_manifest(read_manifest(a / stages::kManifest));
    {
        std::ofstream conf(b / "echo.conf");
        conf << render_config(echoed);
    }
    PipelineConfig reread;
    apply_config_file(reread, b / "echo.conf");
    auto out = b / "run";
    run_pipeline(reread, out);
    EXPECT_EQ(slurp(a / stages::kManifest), slurp(out / stages::kManifest));
}

TEST(Pipeline, StageFailureNamesTheStage) {
    auto dir = scratch("fail");
    {
        std::ofstream bad(dir / "bad.nt");
        bad << "<http://x/a> <http://x/p> garbage\n";
    }
    PipelineConfig cfg;
    cfg.input = (dir / "bad.nt").string();
    try {
        run_pipeline(cfg, dir / "out");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "parse");
    }
    cfg.lenient = true;  // now parses to an empty graph with no text: training has nothing to fit
    try {
        run_pipeline(cfg, dir / "out");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "train");
    }
    EXPECT_TRUE(fs::exists(dir / "out" / stages::kMerged));  // partial outputs retained
}

TEST(Pipeline, StagesComposeLikeAll) {
    auto all = scratch("compose_all");
    auto staged = scratch("compose_staged");
    PipelineConfig cfg = tiny_config();
    run_pipeline(cfg, all);
    stages::parse(cfg, cfg.input, staged);
    stages::graph_cooc(cfg, staged, staged);
    stages::text_cooc(cfg, staged, staged);
    stages::merge(cfg, staged, staged);
    std::ostringstream log;
    stages::train(cfg, staged, staged, log);
    for (const char* f : {stages::kGraphCooc, stages::kTextCooc, stages::kMerged, stages::kEmbeddings}) {
        EXPECT_EQ(slurp(all / f), slurp(staged / f)) << f;
    }
    EXPECT_EQ(log.str(), slurp(all / stages::kTrainLog));
}
