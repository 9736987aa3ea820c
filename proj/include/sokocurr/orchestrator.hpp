#pragma once

// The curriculum loop: build a task pool from target instances (plus optional
// extra instances), then per iteration select a batch, solve it with search,
// feed outcomes back to the sampler, learn from the solved episodes, and log.
//
// Ledger lines carry no wall-clock data, so two runs with the same config and
// seeds write identical ledgers; per-iteration timings go to timing.jsonl.

#include <sokocurr/bandit.hpp>
#include <sokocurr/engine.hpp>
#include <sokocurr/error.hpp>
#include <sokocurr/evaluator.hpp>
#include <sokocurr/mcts.hpp>
#include <sokocurr/rnd.hpp>
#include <sokocurr/rng.hpp>
#include <sokocurr/subcase.hpp>
#include <sokocurr/trainer.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace sokocurr {

enum class Sampler { Uniform, Bandit };

struct RunConfig {
    std::vector<std::filesystem::path> targets;
    std::vector<std::filesystem::path> extra_instances;
    bool subcase_extras = false;
    std::size_t pool_size = 10000;
    std::size_t iterations = 100;
    double budget_seconds = 12 * 3600.0;
    Sampler sampler = Sampler::Bandit;
    bool probe_targets = true;   ///< one extra episode per unsolved target each iteration
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::size_t replay_capacity = 100000;
    std::size_t rnd_batch_size = 32;
    BanditConfig bandit;
    SearchConfig search;
    NetConfig evaluator;
    TrainSchedule train;
    RndConfig rnd;
    std::filesystem::path run_dir = "run";

    /// Relative paths are resolved against `base`.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
        RunConfig c;
        auto resolve = [&](const std::string& p) {
            const std::filesystem::path path(p);
            return path.is_absolute() || base.empty() ? path : base / path;
        };
        try {
            for (const auto& t : j.at("targets")) c.targets.push_back(resolve(t.get<std::string>()));
            if (j.contains("extra_instances"))
                for (const auto& t : j["extra_instances"]) c.extra_instances.push_back(resolve(t.get<std::string>()));
            c.subcase_extras = j.value("subcase_extras", c.subcase_extras);
            c.pool_size = j.value("pool_size", c.pool_size);
            c.iterations = j.value("iterations", c.iterations);
            c.budget_seconds = j.value("budget_seconds", c.budget_seconds);
            const std::string sampler = j.value("sampler", std::string("bandit"));
            if (sampler == "bandit") c.sampler = Sampler::Bandit;
            else if (sampler == "uniform") c.sampler = Sampler::Uniform;
            else throw Error(ErrorCode::BadConfig, "sampler must be 'uniform' or 'bandit'");
            c.probe_targets = j.value("probe_targets", c.probe_targets);
            c.seed = j.value("seed", c.seed);
            c.workers = j.value("workers", c.workers);
            c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
            c.rnd_batch_size = j.value("rnd_batch_size", c.rnd_batch_size);
            if (j.contains("bandit")) {
                const auto& b = j["bandit"];
                c.bandit.alpha = b.value("alpha", c.bandit.alpha);
                c.bandit.gamma = b.value("gamma", c.bandit.gamma);
                c.bandit.batch_size = b.value("batch_size", c.bandit.batch_size);
            }
            if (j.contains("search")) c.search = SearchConfig::from_json(j["search"]);
            if (j.contains("evaluator")) c.evaluator = NetConfig::from_json(j["evaluator"]);
            if (j.contains("train")) c.train = TrainSchedule::from_json(j["train"]);
            if (j.contains("rnd")) c.rnd = RndConfig::from_json(j["rnd"]);
            if (j.contains("run_dir")) c.run_dir = resolve(j["run_dir"].get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::BadConfig, e.what());
        }
        c.validate();
        return c;
    }

    static RunConfig load(const std::filesystem::path& file) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(file));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::BadConfig, file.string() + ": " + e.what());
        }
        return from_json(j, file.parent_path());
    }

    void validate() const {
        if (targets.empty()) throw Error(ErrorCode::BadConfig, "at least one target is required");
        if (!(budget_seconds > 0)) throw Error(ErrorCode::BadConfig, "budget_seconds must be positive");
        if (pool_size == 0) throw Error(ErrorCode::BadConfig, "pool_size must be positive");
        if (workers == 0) throw Error(ErrorCode::BadConfig, "workers must be positive");
        if (rnd_batch_size == 0) throw Error(ErrorCode::BadConfig, "rnd_batch_size must be positive");
        bandit.validate();
        search.validate();
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["targets"] = nlohmann::json::array();
        for (const auto& t : targets) j["targets"].push_back(t.string());
        j["extra_instances"] = nlohmann::json::array();
        for (const auto& t : extra_instances) j["extra_instances"].push_back(t.string());
        j["subcase_extras"] = subcase_extras;
        j["pool_size"] = pool_size;
        j["iterations"] = iterations;
        j["budget_seconds"] = budget_seconds;
        j["sampler"] = sampler == Sampler::Bandit ? "bandit" : "uniform";
        j["probe_targets"] = probe_targets;
        j["seed"] = seed;
        j["workers"] = workers;
        j["replay_capacity"] = replay_capacity;
        j["rnd_batch_size"] = rnd_batch_size;
        j["bandit"] = {{"alpha", bandit.alpha}, {"gamma", bandit.gamma}, {"batch_size", bandit.batch_size}};
        j["search"] = search.to_json();
        j["evaluator"] = evaluator.to_json();
        j["train"] = train.to_json();
        j["rnd"] = rnd.to_json();
        j["run_dir"] = run_dir.string();
        return j;
    }
};

// ---------------------------------------------------------------------------
// Pool

struct Task {
    std::size_t id = 0;
    std::size_t parent = 0;  ///< index into TaskPool::parents
    std::size_t k = 0;
    std::uint64_t seed = 0;
    bool is_target = false;
    Board board;
};

struct TaskPool {
    std::vector<Task> tasks;
    std::vector<std::string> parents;     ///< "<file>#<level>"
    std::vector<std::size_t> target_ids;  ///< task ids of the target instances

    [[nodiscard]] std::size_t max_boxes() const {
        std::size_t m = 0;
        for (const auto& t : tasks) m = std::max(m, t.k);
        return m;
    }
};

/// Every level of each target file is a target; it contributes `pool_size`
/// subcases plus itself. Extra instances contribute themselves, or their own
/// subcases plus themselves when `subcase_extras` is set.
inline TaskPool build_pool(const RunConfig& cfg) {
    TaskPool pool;
    auto add_parent = [&](const CorpusEntry& e, bool target, bool with_subcases) {
        const std::size_t parent = pool.parents.size();
        pool.parents.push_back(e.path.string() + "#" + std::to_string(e.index_in_file));
        std::vector<Subcase> subs;
        if (with_subcases) {
            subs = sample_pool(e.board, cfg.pool_size, derive_seed(cfg.seed, 0x706f6f6c + parent));
        } else {
            require_balanced(e.board);
            subs.push_back({{e.board.box_count(), e.board.boxes(), e.board.goals(), 0}, e.board, true});
        }
        for (auto& s : subs) {
            Task t{pool.tasks.size(), parent, s.spec.k, s.spec.seed, s.is_target && target, std::move(s.board)};
            if (t.is_target) pool.target_ids.push_back(t.id);
            pool.tasks.push_back(std::move(t));
        }
    };
    for (const auto& path : cfg.targets)
        for (const auto& e : load_corpus(path)) add_parent(e, true, true);
    for (const auto& path : cfg.extra_instances)
        for (const auto& e : load_corpus(path)) add_parent(e, false, cfg.subcase_extras);
    if (pool.target_ids.empty()) throw Error(ErrorCode::EmptyPool, "no target levels found");
    return pool;
}

// ---------------------------------------------------------------------------
// Samplers

/// Uniform batches of distinct tasks.
inline std::vector<std::size_t> uniform_batch(std::size_t n, std::size_t batch, Rng& rng) {
    batch = std::min(batch, n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < batch; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
    idx.resize(batch);
    return idx;
}

// ---------------------------------------------------------------------------
// Episodes

struct EpisodeJob {
    std::size_t task = 0;
    bool probe = false;
};

struct EpisodeOutcome {
    EpisodeResult result;
    bool error = false;
    std::string message;
};

template <Evaluator E>
std::vector<EpisodeOutcome> run_episodes(const TaskPool& pool, const std::vector<EpisodeJob>& jobs, const E& eval,
                                         const RndState* rnd, const SearchConfig& search, std::size_t workers) {
    std::vector<EpisodeOutcome> out(jobs.size());
    auto work = [&](std::size_t i) {
        try {
            out[i].result = run_episode(pool.tasks[jobs[i].task].board, eval, rnd, search);
        } catch (const std::exception& e) {
            out[i] = {};
            out[i].error = true;
            out[i].message = e.what();
        }
    };
    if (workers <= 1 || jobs.size() <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
        });
    }
    for (auto& t : threads) t.join();
    return out;
}

// ---------------------------------------------------------------------------
// Run

enum class Termination { AllSolved, IterationsExhausted, BudgetExhausted };

inline std::string to_string(Termination t) {
    switch (t) {
    case Termination::AllSolved: return "all_solved";
    case Termination::IterationsExhausted: return "iterations_exhausted";
    case Termination::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

struct RunSummary {
    Termination reason = Termination::IterationsExhausted;
    std::size_t iterations = 0;
    std::set<std::size_t> solved_targets;
    std::map<std::size_t, std::size_t> solved_at;  ///< target task id -> iteration (1-based)
    std::vector<nlohmann::json> ledger;
};

class Curriculum {
public:
    explicit Curriculum(RunConfig cfg) : cfg_(std::move(cfg)), pool_(build_pool(cfg_)), buffer_(cfg_.replay_capacity) {
        NetConfig nc = cfg_.evaluator;
        nc.seed = derive_seed(cfg_.seed, 10);
        net_ = init_net(nc);
        RndConfig rc = cfg_.rnd;
        rc.seed = derive_seed(cfg_.seed, 11);
        for (const auto& t : pool_.tasks) {
            rc.height = std::max(rc.height, t.board.height());
            rc.width = std::max(rc.width, t.board.width());
        }
        rnd_ = init_rnd(rc);
        bandit_.emplace(pool_.tasks.size(), cfg_.bandit);
        select_rng_.seed(derive_seed(cfg_.seed, 1));
        train_rng_.seed(derive_seed(cfg_.seed, 2));
        rnd_rng_.seed(derive_seed(cfg_.seed, 3));
    }

    [[nodiscard]] const TaskPool& pool() const noexcept { return pool_; }
    [[nodiscard]] const NetParams& net() const noexcept { return net_; }
    [[nodiscard]] const RndState& rnd() const noexcept { return rnd_; }
    [[nodiscard]] const Bandit& bandit() const { return *bandit_; }
    [[nodiscard]] const ReplayBuffer& buffer() const noexcept { return buffer_; }
    [[nodiscard]] const RunConfig& config() const noexcept { return cfg_; }

    /// Runs to termination, writing ledger.jsonl, timing.jsonl, checkpoints,
    /// the bandit table and target solutions under the run directory.
    RunSummary run() {
        namespace fs = std::filesystem;
        fs::create_directories(cfg_.run_dir / "solutions");
        {
            std::ofstream cfg_out(cfg_.run_dir / "config.json");
            cfg_out << cfg_.to_json().dump(2) << '\n';
        }
        std::ofstream ledger(cfg_.run_dir / "ledger.jsonl");
        std::ofstream timing(cfg_.run_dir / "timing.jsonl");
        if (!ledger || !timing) throw Error(ErrorCode::Io, "cannot write to " + cfg_.run_dir.string());
        const auto t0 = std::chrono::steady_clock::now();
        RunSummary sum;
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
        for (std::size_t it = 1; it <= cfg_.iterations; ++it) {
            if (sum.solved_targets.size() == pool_.target_ids.size()) break;
            if (elapsed() >= cfg_.budget_seconds) {
                sum.reason = Termination::BudgetExhausted;
                break;
            }
            const double start = elapsed();
            nlohmann::json line = iteration(it, sum);
            ledger << line.dump() << '\n';
            ledger.flush();
            sum.ledger.push_back(std::move(line));
            sum.iterations = it;
            timing << nlohmann::json{{"iteration", it}, {"seconds", elapsed() - start}, {"elapsed", elapsed()}}.dump()
                   << '\n';
            timing.flush();
        }
        if (sum.solved_targets.size() == pool_.target_ids.size()) sum.reason = Termination::AllSolved;
        nlohmann::json end{{"event", "end"},
                           {"reason", to_string(sum.reason)},
                           {"iterations", sum.iterations},
                           {"solved_targets", sum.solved_targets}};
        ledger << end.dump() << '\n';
        sum.ledger.push_back(std::move(end));
        return sum;
    }

    /// One select -> solve -> feedback -> learn round. Returns its ledger line.
    nlohmann::json iteration(std::size_t it, RunSummary& sum) {
        // select
        std::vector<std::size_t> selected;
        std::vector<double> probs;
        if (cfg_.sampler == Sampler::Bandit) {
            probs = bandit_->probabilities();
            selected = bandit_->select_batch(select_rng_);
        } else {
            probs.assign(pool_.tasks.size(), 1.0 / static_cast<double>(pool_.tasks.size()));
            selected = uniform_batch(pool_.tasks.size(), cfg_.bandit.batch_size, select_rng_);
        }
        std::vector<EpisodeJob> jobs;
        for (std::size_t t : selected) jobs.push_back({t, false});
        if (cfg_.probe_targets) {
            for (std::size_t t : pool_.target_ids)
                if (!sum.solved_targets.count(t)) jobs.push_back({t, true});
        }

        // solve (fixed snapshots for the whole batch)
        const RndState* rnd = cfg_.search.curiosity ? &rnd_ : nullptr;
        const auto outcomes = run_episodes(pool_, jobs, NetEvaluator{&net_}, rnd, cfg_.search, cfg_.workers);

        // feedback, in batch order
        std::vector<int> outcome_bits;
        std::size_t errors = 0, successes = 0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const bool ok = !outcomes[i].error && outcomes[i].result.solved;
            errors += outcomes[i].error ? 1 : 0;
            if (!jobs[i].probe) {
                outcome_bits.push_back(ok ? 1 : 0);
                successes += ok ? 1 : 0;
                if (cfg_.sampler == Sampler::Bandit) bandit_->update(jobs[i].task, ok);
            }
        }

        // harvest + solutions
        std::vector<TrainSample> fresh;
        std::vector<StateEncoding> visited;
        nlohmann::json probes = nlohmann::json::array();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const auto& o = outcomes[i];
            const Task& task = pool_.tasks[jobs[i].task];
            if (jobs[i].probe) probes.push_back({{"task", task.id}, {"solved", !o.error && o.result.solved}});
            if (o.error) continue;
            for (const auto& s : o.result.steps) visited.push_back(encode(s.state));
            if (!o.result.solved) continue;
            auto samples = harvest(o.result, task.id, it);
            fresh.insert(fresh.end(), samples.begin(), samples.end());
            if (task.is_target && !sum.solved_targets.count(task.id)) {
                const auto plan = o.result.plan();
                std::ofstream f(cfg_.run_dir / "solutions" / ("task_" + std::to_string(task.id) + ".lurd"));
                f << to_lurd(task.board, plan) << '\n';
                sum.solved_targets.insert(task.id);
                sum.solved_at[task.id] = it;
            }
        }
        const double probe = fresh.empty() ? 0.0 : probe_loss(net_, fresh);
        for (auto& s : fresh) buffer_.push(std::move(s));

        // curiosity: one shuffled pass over this iteration's visited states
        double rnd_loss = 0.0;
        std::size_t rnd_steps = 0;
        if (cfg_.search.curiosity && !visited.empty()) {
            shuffle(std::span<StateEncoding>(visited), rnd_rng_);
            for (std::size_t b = 0; b < visited.size(); b += cfg_.rnd_batch_size) {
                const std::size_t e = std::min(visited.size(), b + cfg_.rnd_batch_size);
                rnd_loss += train_predictor(rnd_, std::span<const StateEncoding>(visited.data() + b, e - b));
                ++rnd_steps;
            }
            rnd_loss /= static_cast<double>(rnd_steps);
        }

        // train
        const TrainReport rep = train_iteration(net_, buffer_, cfg_.train, train_rng_);

        // checkpoint
        save_checkpoint();

        // histograms by box count
        std::map<std::size_t, std::size_t> sel_k;
        std::map<std::size_t, double> prob_k;
        for (std::size_t t : selected) ++sel_k[pool_.tasks[t].k];
        for (std::size_t i = 0; i < probs.size(); ++i) prob_k[pool_.tasks[i].k] += probs[i];
        nlohmann::json sel_j = nlohmann::json::object(), prob_j = nlohmann::json::object();
        for (const auto& [k, n] : sel_k) sel_j[std::to_string(k)] = n;
        for (const auto& [k, p] : prob_k) prob_j[std::to_string(k)] = p;

        return {{"iteration", it},
                {"selected", selected},
                {"outcomes", outcome_bits},
                {"successes", successes},
                {"probes", probes},
                {"episode_errors", errors},
                {"solved_targets", sum.solved_targets},
                {"buffer_size", buffer_.size()},
                {"harvested", buffer_.total_pushed()},
                {"probe_loss", probe},
                {"train", {{"skipped", rep.skipped}, {"steps", rep.steps}, {"mean_loss", rep.mean_loss},
                           {"last_loss", rep.last_loss}}},
                {"rnd", {{"steps", rnd_steps}, {"loss", rnd_loss}}},
                {"selected_by_k", sel_j},
                {"prob_by_k", prob_j}};
    }

    void save_checkpoint() const {
        const auto tmp = cfg_.run_dir / "checkpoint.bin.tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            const std::string blob = snapshot(net_, rnd_);
            out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
            if (!out) throw Error(ErrorCode::Io, "cannot write checkpoint");
        }
        std::filesystem::rename(tmp, cfg_.run_dir / "checkpoint.bin");
        std::ofstream table(cfg_.run_dir / "bandit.tsv");
        bandit_->save(table);
    }

private:
    RunConfig cfg_;
    TaskPool pool_;
    NetParams net_;
    RndState rnd_;
    std::optional<Bandit> bandit_;
    ReplayBuffer buffer_;
    Rng select_rng_, train_rng_, rnd_rng_;
};

// ---------------------------------------------------------------------------
// Inference only

struct SolveOutcome {
    EpisodeResult episode;
    std::optional<std::string> lurd;
};

/// One episode with a stored network (or a freshly initialized one when
/// `checkpoint` is empty or missing).
inline SolveOutcome solve_only(const Board& board, const std::filesystem::path& checkpoint, const NetConfig& fallback,
                               const SearchConfig& search) {
    std::optional<Checkpoint> ck;
    if (!checkpoint.empty() && std::filesystem::exists(checkpoint)) ck = load_checkpoint(read_text_file(checkpoint));
    const NetParams net = ck ? ck->net : init_net(fallback);
    const RndState* rnd = (ck && ck->rnd && search.curiosity) ? &*ck->rnd : nullptr;
    SolveOutcome out;
    out.episode = run_episode(board, NetEvaluator{&net}, rnd, search);
    if (out.episode.solved) out.lurd = to_lurd(board, out.episode.plan());
    return out;
}

} // namespace sokocurr
