// Parse a level, solve it with the breadth-first oracle and with a fresh
// network plus tree search, and check both plans.

#include <sokocurr/engine.hpp>
#include <sokocurr/evaluator.hpp>
#include <sokocurr/mcts.hpp>

#include <iostream>

using namespace sokocurr;

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : SOKOCURR_DATA_DIR "/corpus/room.xsb";
    const Board board = load_corpus(path).at(0).board;
    std::cout << render_xsb(board) << board.box_count() << " boxes\n\n";

    const SolveResult bfs = bfs_optimal_solve(board, 500000);
    if (bfs.solved()) std::cout << "oracle (" << bfs.plan.size() << " pushes): " << to_lurd(board, bfs.plan) << '\n';

    NetConfig nc;
    nc.layers = 2;
    nc.hidden = 16;
    nc.value_hidden = 16;
    const NetParams net = init_net(nc);
    SearchConfig sc;
    sc.simulations = 400;
    sc.length_limit = 30;
    const EpisodeResult ep = run_episode(board, NetEvaluator{&net}, nullptr, sc);
    if (!ep.solved) {
        std::cout << "search: not solved within " << sc.length_limit << " pushes\n";
        return 0;
    }
    const std::string lurd = to_lurd(board, ep.plan());
    std::cout << "search (" << ep.steps.size() << " pushes): " << lurd << '\n';
    std::cout << "replay reaches goal: " << (is_goal(replay_lurd(board, lurd)) ? "yes" : "no") << '\n';
}
