#include <sokocurr/orchestrator.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace sokocurr;
namespace fs = std::filesystem;

namespace {

constexpr const char* kOneBox = "#######\n#@$  .#\n#######\n";
constexpr const char* kTwoBox =
    "#######\n"
    "#     #\n"
    "# $#$ #\n"
    "#  @  #\n"
    "# . . #\n"
    "#######\n";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

RunConfig toy_config(const TempDir& dir, std::vector<fs::path> targets) {
    RunConfig c;
    c.targets = std::move(targets);
    c.pool_size = 20;
    c.iterations = 3;
    c.bandit.batch_size = 4;
    c.search.simulations = 16;
    c.search.length_limit = 20;
    c.evaluator.layers = 2;
    c.evaluator.hidden = 8;
    c.evaluator.value_hidden = 8;
    c.train = {10, 8, 1e-3};
    c.rnd.hidden = 16;
    c.rnd.embed_dim = 8;
    c.run_dir = dir.path / "run";
    return c;
}

} // namespace

TEST(RunConfig, JsonRoundTripAndErrors) {
    const TempDir dir("sokocurr_cfg_test");
    const auto target = dir.write("t.xsb", kOneBox);
    const nlohmann::json j = {{"targets", {"t.xsb"}},
                              {"sampler", "uniform"},
                              {"pool_size", 7},
                              {"search", {{"simulations", 9}, {"curiosity", true}}},
                              {"evaluator", {{"arch", "cnn"}, {"layers", 2}}}};
    const RunConfig c = RunConfig::from_json(j, dir.path);
    EXPECT_EQ(c.targets[0], target);
    EXPECT_EQ(c.sampler, Sampler::Uniform);
    EXPECT_EQ(c.pool_size, 7u);
    EXPECT_EQ(c.search.simulations, 9u);
    EXPECT_TRUE(c.search.curiosity);
    EXPECT_EQ(c.evaluator.arch, Arch::Cnn);
    const RunConfig back = RunConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_THROW((void)RunConfig::from_json({{"targets", nlohmann::json::array()}}), Error);
    EXPECT_THROW((void)RunConfig::from_json({{"targets", {"x"}}, {"sampler", "greedy"}}), Error);
    EXPECT_THROW((void)RunConfig::from_json({{"targets", {"x"}}, {"budget_seconds", 0}}), Error);
    EXPECT_THROW((void)RunConfig::from_json({{"pool_size", 3}}), Error);
}

TEST(BuildPool, SizesAndTags) {
    const TempDir dir("sokocurr_pool_test");
    RunConfig c;
    c.targets = {dir.write("a.xsb", kTwoBox)};
    c.pool_size = 10000;
    const TaskPool one = build_pool(c);
    EXPECT_EQ(one.tasks.size(), 10001u);
    ASSERT_EQ(one.target_ids.size(), 1u);
    EXPECT_EQ(one.target_ids[0], 10000u);

    c.pool_size = 50;
    c.targets = {dir.write("two.xsb", std::string(kTwoBox) + "\n" + kOneBox)};
    const TaskPool two = build_pool(c);
    EXPECT_EQ(two.tasks.size(), 102u);
    EXPECT_EQ(two.parents.size(), 2u);
    EXPECT_EQ(two.tasks[0].parent, 0u);
    EXPECT_EQ(two.tasks[101].parent, 1u);
    EXPECT_EQ(two.target_ids, (std::vector<std::size_t>{50, 101}));

    c.targets = {dir.path / "a.xsb"};
    c.extra_instances = {dir.write("e1.xsb", kOneBox), dir.write("e2.xsb", kOneBox)};
    EXPECT_EQ(build_pool(c).tasks.size(), 51u + 2u);
    c.subcase_extras = true;
    const TaskPool mix = build_pool(c);
    EXPECT_EQ(mix.tasks.size(), 51u + 2u * 51u);
    EXPECT_EQ(mix.target_ids.size(), 1u);

    c.targets = {dir.write("bad.xsb", "#####\n#@$$.#\n#####\n")};
    c.extra_instances.clear();
    try {
        (void)build_pool(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("bad.xsb"), std::string::npos);
    }
}

TEST(UniformBatch, DistinctAndCapped) {
    Rng rng(3);
    auto b = uniform_batch(10, 4, rng);
    std::sort(b.begin(), b.end());
    EXPECT_EQ(std::adjacent_find(b.begin(), b.end()), b.end());
    EXPECT_EQ(b.size(), 4u);
    EXPECT_EQ(uniform_batch(3, 8, rng).size(), 3u);
}

TEST(Curriculum, TrivialTargetSolvedInFirstIteration) {
    const TempDir dir("sokocurr_run_trivial");
    RunConfig c = toy_config(dir, {dir.write("t.xsb", kOneBox)});
    Curriculum run(c);
    const RunSummary s = run.run();
    EXPECT_EQ(s.reason, Termination::AllSolved);
    EXPECT_EQ(s.iterations, 1u);
    // Solution on disk replays to a goal.
    const auto lurd = read_text_file(c.run_dir / "solutions" / "task_20.lurd");
    EXPECT_TRUE(is_goal(replay_lurd(parse_xsb(kOneBox), lurd.substr(0, lurd.find('\n')))));
    EXPECT_TRUE(fs::exists(c.run_dir / "checkpoint.bin"));
    EXPECT_TRUE(fs::exists(c.run_dir / "bandit.tsv"));
    const auto ck = load_checkpoint(read_text_file(c.run_dir / "checkpoint.bin"));
    EXPECT_TRUE(ck.net == run.net());
}

TEST(Curriculum, LedgerInvariantsAndDeterminism) {
    const TempDir dir("sokocurr_run_det");
    const auto target = dir.write("t.xsb", kTwoBox);
    auto once = [&](Sampler sampler, bool curiosity) {
        RunConfig c = toy_config(dir, {target});
        c.sampler = sampler;
        c.search.curiosity = curiosity;
        c.search.length_limit = 8;
        c.probe_targets = false;
        Curriculum run(c);
        const auto s = run.run();
        EXPECT_NE(s.reason, Termination::BudgetExhausted);
        std::size_t prev_solved = 0;
        for (const auto& line : s.ledger) {
            if (line.contains("event")) continue;
            std::size_t sel = 0;
            for (const auto& [k, n] : line["selected_by_k"].items()) sel += n.get<std::size_t>();
            EXPECT_EQ(sel, c.bandit.batch_size);
            double mass = 0.0;
            for (const auto& [k, p] : line["prob_by_k"].items()) mass += p.get<double>();
            EXPECT_NEAR(mass, 1.0, 1e-9);
            EXPECT_GE(line["solved_targets"].size(), prev_solved);
            prev_solved = line["solved_targets"].size();
        }
        return read_text_file(c.run_dir / "ledger.jsonl");
    };
    for (bool curiosity : {false, true}) {
        const std::string a = once(Sampler::Bandit, curiosity);
        const std::string b = once(Sampler::Bandit, curiosity);
        EXPECT_EQ(a, b);
        EXPECT_FALSE(a.empty());
    }
    EXPECT_EQ(once(Sampler::Uniform, false), once(Sampler::Uniform, false));
}

TEST(Curriculum, WorkersDoNotChangeTheLedger) {
    const TempDir dir("sokocurr_run_workers");
    const auto target = dir.write("t.xsb", kTwoBox);
    auto once = [&](std::size_t workers) {
        RunConfig c = toy_config(dir, {target});
        c.workers = workers;
        c.iterations = 2;
        c.search.length_limit = 8;
        Curriculum(c).run();
        return read_text_file(c.run_dir / "ledger.jsonl");
    };
    EXPECT_EQ(once(1), once(3));
}

TEST(Curriculum, BudgetExhausted) {
    const TempDir dir("sokocurr_run_budget");
    RunConfig c = toy_config(dir, {dir.write("t.xsb", kTwoBox)});
    c.budget_seconds = 1e-9;
    const auto s = Curriculum(c).run();
    EXPECT_EQ(s.reason, Termination::BudgetExhausted);
    EXPECT_EQ(s.iterations, 0u);
}

TEST(SolveOnly, FreshNetAndCheckpoint) {
    const TempDir dir("sokocurr_solve_only");
    const Board b = parse_xsb(kOneBox);
    SearchConfig sc;
    sc.simulations = 16;
    sc.length_limit = 20;
    NetConfig nc;
    nc.layers = 2;
    nc.hidden = 8;
    const auto fresh = solve_only(b, dir.path / "missing.bin", nc, sc);
    ASSERT_TRUE(fresh.lurd.has_value());
    EXPECT_TRUE(is_goal(replay_lurd(b, *fresh.lurd)));
    const auto ckpt = dir.path / "c.bin";
    {
        std::ofstream out(ckpt, std::ios::binary);
        out << snapshot(init_net(nc));
    }
    const auto again = solve_only(b, ckpt, NetConfig{}, sc);
    EXPECT_TRUE(again.episode.solved);
}
