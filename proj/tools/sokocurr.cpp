// Command-line front end. Exit codes: 0 solved/completed, 2 budget
// exhausted (or not solved within the search budget), 1 error.

#include <sokocurr/bandit.hpp>
#include <sokocurr/engine.hpp>
#include <sokocurr/evaluator.hpp>
#include <sokocurr/mcts.hpp>
#include <sokocurr/orchestrator.hpp>
#include <sokocurr/rnd.hpp>
#include <sokocurr/subcase.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace sokocurr;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kBudget = 2;

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
}

Board load_one(const fs::path& file, std::size_t level) {
    const auto entries = load_corpus(file);
    if (level >= entries.size()) {
        throw Error(ErrorCode::Io, file.string() + " has " + std::to_string(entries.size()) + " level(s)");
    }
    return entries[level].board;
}

// gen-pool ------------------------------------------------------------------

struct GenPoolArgs {
    fs::path instance;
    fs::path out;
    std::size_t pool_size = 10000;
    std::uint64_t seed = 1;
    std::size_t per_k = 0;
    std::vector<std::size_t> k_range;
};

int gen_pool(const GenPoolArgs& a) {
    const auto entries = load_corpus(a.instance);
    std::vector<Subcase> tasks;
    std::vector<std::size_t> parents;
    for (std::size_t p = 0; p < entries.size(); ++p) {
        const Board& parent = entries[p].board;
        const std::uint64_t seed = derive_seed(a.seed, p);
        std::vector<Subcase> subs;
        if (a.per_k > 0) {
            const std::size_t lo = a.k_range.empty() ? 1 : a.k_range[0];
            const std::size_t hi = a.k_range.empty() ? parent.box_count() : a.k_range[1];
            subs = stratified_pool(parent, a.per_k, lo, hi, seed);
        } else {
            subs = sample_pool(parent, a.pool_size, seed);
        }
        for (auto& s : subs) {
            tasks.push_back(std::move(s));
            parents.push_back(p);
        }
    }
    const auto rows = write_pool_manifest(a.out, tasks, parents);
    std::cout << "wrote " << rows.size() << " tasks to " << a.out.string() << '\n';
    return kOk;
}

// train ---------------------------------------------------------------------

struct TrainArgs {
    fs::path config;
    std::optional<fs::path> run_dir;
    std::optional<std::size_t> iterations;
    std::optional<std::uint64_t> seed;
};

int train(const TrainArgs& a) {
    RunConfig cfg = RunConfig::load(a.config);
    if (a.run_dir) cfg.run_dir = *a.run_dir;
    if (a.iterations) cfg.iterations = *a.iterations;
    if (a.seed) cfg.seed = *a.seed;
    cfg.validate();
    Curriculum run(cfg);
    std::cout << "pool: " << run.pool().tasks.size() << " tasks, " << run.pool().target_ids.size() << " target(s)\n";
    const RunSummary sum = run.run();
    std::cout << "finished: " << to_string(sum.reason) << " after " << sum.iterations << " iteration(s), "
              << sum.solved_targets.size() << "/" << run.pool().target_ids.size() << " targets solved\n";
    return sum.reason == Termination::BudgetExhausted ? kBudget : kOk;
}

// solve ---------------------------------------------------------------------

struct SolveArgs {
    fs::path instance;
    std::size_t level = 0;
    fs::path checkpoint;
    std::optional<fs::path> config;
    std::optional<std::size_t> simulations;
    std::optional<int> length_limit;
    bool curiosity = false;
    std::optional<fs::path> out;
    std::optional<fs::path> trace;
};

int solve(const SolveArgs& a) {
    NetConfig net_cfg;
    SearchConfig search;
    if (a.config) {
        // only the evaluator and search sections are read, so a solve-only
        // config needs no targets
        const auto j = nlohmann::json::parse(read_text_file(*a.config));
        if (j.contains("evaluator")) net_cfg = NetConfig::from_json(j["evaluator"]);
        if (j.contains("search")) search = SearchConfig::from_json(j["search"]);
    }
    if (a.simulations) search.simulations = *a.simulations;
    if (a.length_limit) search.length_limit = *a.length_limit;
    if (a.curiosity) search.curiosity = true;
    const Board board = load_one(a.instance, a.level);

    std::optional<Checkpoint> ck;
    if (!a.checkpoint.empty()) ck = load_checkpoint(read_text_file(a.checkpoint));
    const NetParams net = ck ? ck->net : init_net(net_cfg);
    const RndState* rnd = (ck && ck->rnd && search.curiosity) ? &*ck->rnd : nullptr;

    std::ofstream trace_out;
    if (a.trace) {
        trace_out.open(*a.trace);
        if (!trace_out) throw Error(ErrorCode::Io, "cannot write " + a.trace->string());
    }
    const EpisodeResult ep = run_episode(board, NetEvaluator{&net}, rnd, search, a.trace ? &trace_out : nullptr);
    if (!ep.solved) {
        std::cout << "not solved after " << ep.steps.size() << " push(es)\n";
        return kBudget;
    }
    const std::string lurd = to_lurd(board, ep.plan());
    std::cout << lurd << '\n';
    if (a.out) write_file(*a.out, lurd + "\n");
    std::cerr << "solved in " << ep.steps.size() << " push(es)\n";
    return kOk;
}

// bandit-sim ----------------------------------------------------------------

int bandit_sim(const FrontierSim& sim, const std::optional<fs::path>& out) {
    const FrontierTrace trace = run_frontier_sim(sim);
    std::ostringstream csv;
    csv << "round,frontier,mass_center\n";
    for (std::size_t t = 0; t < trace.mass_center.size(); ++t) {
        csv << t << ',' << trace.frontier[t] << ',' << trace.mass_center[t] << '\n';
    }
    if (out) write_file(*out, csv.str());
    else std::cout << csv.str();
    std::cerr << "min p_i / (gamma/n) over all rounds: " << trace.min_prob_ratio << '\n';
    return kOk;
}

// oracle --------------------------------------------------------------------

int oracle(const fs::path& instance, std::size_t level, std::size_t max_states, const std::optional<fs::path>& out) {
    const Board board = load_one(instance, level);
    const SolveResult r = bfs_optimal_solve(board, max_states);
    switch (r.status) {
    case SolveStatus::Solved: {
        const std::string lurd = to_lurd(board, r.plan);
        std::cout << lurd << '\n';
        std::cerr << "optimal pushes: " << r.plan.size() << ", expanded: " << r.expanded << '\n';
        if (out) write_file(*out, lurd + "\n");
        return kOk;
    }
    case SolveStatus::ProvenUnsolvable:
        std::cout << "unsolvable\n";
        return kOk;
    case SolveStatus::BudgetExceeded:
        std::cout << "budget exceeded after " << r.expanded << " states\n";
        return kBudget;
    }
    return kError;
}

// replay --------------------------------------------------------------------

int replay(const fs::path& instance, std::size_t level, const std::string& plan_arg) {
    const Board board = load_one(instance, level);
    std::string plan = fs::exists(plan_arg) ? read_text_file(plan_arg) : plan_arg;
    std::erase_if(plan, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    const Board end = replay_lurd(board, plan);
    if (!is_goal(end)) {
        std::cout << "plan ends in a non-goal state\n" << render_xsb(end);
        return kError;
    }
    std::cout << "ok: " << plan.size() << " move(s) reach the goal\n";
    return kOk;
}

// metrics -------------------------------------------------------------------

std::string k_histogram(const nlohmann::json& obj) {
    std::string s;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!s.empty()) s += ';';
        std::ostringstream v;
        v << it.value().get<double>();
        s += it.key() + ":" + v.str();
    }
    return s;
}

int metrics(const fs::path& ledger, const std::optional<fs::path>& out) {
    std::ifstream in(ledger);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + ledger.string());
    std::ostringstream csv;
    csv << "iteration,selected,successes,probes,solved_targets,buffer_size,harvested,probe_loss,"
           "train_skipped,train_mean_loss,rnd_loss,selected_by_k,prob_by_k\n";
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Io, ledger.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("iteration")) continue;  // end marker
        csv << j["iteration"].get<std::size_t>() << ',' << j["selected"].size() << ','
            << j["successes"].get<std::size_t>() << ',' << j["probes"].size() << ',' << j["solved_targets"].size()
            << ',' << j["buffer_size"].get<std::size_t>() << ',' << j["harvested"].get<std::uint64_t>() << ','
            << j["probe_loss"].get<double>() << ',' << (j["train"]["skipped"].get<bool>() ? 1 : 0) << ','
            << j["train"]["mean_loss"].get<double>() << ',' << j["rnd"]["loss"].get<double>() << ','
            << k_histogram(j["selected_by_k"]) << ',' << k_histogram(j["prob_by_k"]) << '\n';
    }
    if (out) write_file(*out, csv.str());
    else std::cout << csv.str();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curriculum-driven Sokoban solver"};
    app.require_subcommand(1);
    int code = kOk;

    GenPoolArgs gp;
    auto* gen = app.add_subcommand("gen-pool", "Sample subcases of an instance into a task directory");
    gen->add_option("instance", gp.instance, "Level file or directory")->required()->check(CLI::ExistingPath);
    gen->add_option("-o,--out", gp.out, "Output directory")->required();
    gen->add_option("-n,--pool-size", gp.pool_size, "Subcases per level");
    gen->add_option("-s,--seed", gp.seed, "Sampling seed");
    gen->add_option("--per-k", gp.per_k, "Stratified: this many subcases per box count");
    gen->add_option("--k-range", gp.k_range, "Stratified box-count range LO HI")->expected(2);
    gen->callback([&] { code = gen_pool(gp); });

    TrainArgs ta;
    auto* tr = app.add_subcommand("train", "Run the curriculum loop from a run config");
    tr->add_option("config", ta.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    tr->add_option("--run-dir", ta.run_dir, "Override the run directory");
    tr->add_option("--iterations", ta.iterations, "Override the iteration cap");
    tr->add_option("--seed", ta.seed, "Override the seed");
    tr->callback([&] { code = train(ta); });

    SolveArgs sa;
    auto* so = app.add_subcommand("solve", "Solve one level with a stored network");
    so->add_option("instance", sa.instance, "Level file")->required()->check(CLI::ExistingPath);
    so->add_option("--level", sa.level, "Level index within the file");
    so->add_option("-c,--checkpoint", sa.checkpoint, "Checkpoint (fresh network if omitted)")
        ->check(CLI::ExistingFile);
    so->add_option("--config", sa.config, "Run config supplying network and search settings")
        ->check(CLI::ExistingFile);
    so->add_option("--simulations", sa.simulations, "Simulations per push");
    so->add_option("--length-limit", sa.length_limit, "Maximum pushes");
    so->add_flag("--curiosity", sa.curiosity, "Use the checkpoint's curiosity module");
    so->add_option("-o,--out", sa.out, "Write the lurd plan here");
    so->add_option("--trace", sa.trace, "Write a per-push JSONL search trace");
    so->callback([&] { code = solve(sa); });

    FrontierSim sim;
    std::optional<fs::path> sim_out;
    auto* bs = app.add_subcommand("bandit-sim", "Synthetic moving-frontier bandit experiment (CSV)");
    bs->add_option("--arms", sim.arms);
    bs->add_option("--rounds", sim.rounds);
    bs->add_option("--period", sim.period, "Rounds between frontier advances");
    bs->add_option("--start", sim.start, "Initial frontier");
    bs->add_option("--step", sim.step, "Frontier advance");
    bs->add_option("--p-easy", sim.p_easy);
    bs->add_option("--p-hard", sim.p_hard);
    bs->add_option("--alpha", sim.bandit.alpha);
    bs->add_option("--gamma", sim.bandit.gamma);
    bs->add_option("--batch-size", sim.bandit.batch_size);
    bs->add_option("--seed", sim.seed);
    bs->add_option("-o,--out", sim_out, "CSV output (stdout if omitted)");
    bs->callback([&] { code = bandit_sim(sim, sim_out); });

    fs::path or_instance;
    std::size_t or_level = 0, or_states = 2000000;
    std::optional<fs::path> or_out;
    auto* orc = app.add_subcommand("oracle", "Breadth-first optimal solver");
    orc->add_option("instance", or_instance, "Level file")->required()->check(CLI::ExistingPath);
    orc->add_option("--level", or_level, "Level index within the file");
    orc->add_option("--max-states", or_states, "Expansion budget");
    orc->add_option("-o,--out", or_out, "Write the lurd plan here");
    orc->callback([&] { code = oracle(or_instance, or_level, or_states, or_out); });

    fs::path rp_instance;
    std::size_t rp_level = 0;
    std::string rp_plan;
    auto* rp = app.add_subcommand("replay", "Check that a lurd plan solves a level");
    rp->add_option("instance", rp_instance, "Level file")->required()->check(CLI::ExistingPath);
    rp->add_option("plan", rp_plan, "Plan file or literal lurd string")->required();
    rp->add_option("--level", rp_level, "Level index within the file");
    rp->callback([&] { code = replay(rp_instance, rp_level, rp_plan); });

    fs::path me_ledger;
    std::optional<fs::path> me_out;
    auto* me = app.add_subcommand("metrics", "Convert a run ledger to CSV");
    me->add_option("ledger", me_ledger, "ledger.jsonl")->required()->check(CLI::ExistingFile);
    me->add_option("-o,--out", me_out, "CSV output (stdout if omitted)");
    me->callback([&] { code = metrics(me_ledger, me_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return code;
}
