// A few curriculum iterations on a small target, driven from code rather
// than a config file.

#include <sokocurr/orchestrator.hpp>

#include <iostream>

using namespace sokocurr;

int main() {
    RunConfig cfg;
    cfg.targets = {SOKOCURR_DATA_DIR "/corpus/room.xsb"};
    cfg.pool_size = 50;
    cfg.iterations = 5;
    cfg.sampler = Sampler::Bandit;
    cfg.bandit.batch_size = 8;
    cfg.search.simulations = 50;
    cfg.search.length_limit = 20;
    cfg.search.curiosity = true;
    cfg.evaluator.layers = 2;
    cfg.evaluator.hidden = 16;
    cfg.evaluator.value_hidden = 16;
    cfg.train.minibatches = 20;
    cfg.train.batch_size = 16;
    cfg.rnd.hidden = 32;
    cfg.rnd.embed_dim = 16;
    cfg.run_dir = "curriculum_demo_run";
    cfg.validate();

    Curriculum run(cfg);
    const RunSummary sum = run.run();
    for (const auto& line : sum.ledger) {
        if (!line.contains("iteration")) continue;
        std::cout << "iteration " << line["iteration"] << ": " << line["successes"] << "/" << line["selected"].size()
                  << " solved, buffer " << line["buffer_size"] << ", by k " << line["selected_by_k"].dump() << '\n';
    }
    std::cout << to_string(sum.reason) << ", ledger in " << cfg.run_dir.string() << "/ledger.jsonl\n";
}
