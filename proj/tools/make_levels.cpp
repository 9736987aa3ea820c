// Seeded random level generator. Every emitted level is solvable, verified
// with the breadth-first solver, and annotated with its optimal push count.

#include <sokocurr/engine.hpp>
#include <sokocurr/rng.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace sokocurr;

namespace {

std::string random_grid(Rng& rng, int h, int w, int boxes, double wall_rate) {
    std::vector<std::string> g(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), ' '));
    std::vector<int> floor;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const bool border = r == 0 || c == 0 || r == h - 1 || c == w - 1;
            if (border || uniform_unit(rng) < wall_rate) g[r][c] = '#';
            else floor.push_back(r * w + c);
        }
    if (floor.size() < static_cast<std::size_t>(2 * boxes + 1)) return {};
    shuffle(std::span<int>(floor), rng);
    std::size_t k = 0;
    for (int b = 0; b < boxes; ++b, ++k) g[floor[k] / w][floor[k] % w] = '$';
    for (int b = 0; b < boxes; ++b, ++k) g[floor[k] / w][floor[k] % w] = '.';
    g[floor[k] / w][floor[k] % w] = '@';
    std::string text;
    for (auto& row : g) text += row + "\n";
    return text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate solvable random levels"};
    std::size_t count = 50;
    std::vector<int> boxes{1, 3};
    std::vector<int> height{6, 7};
    std::vector<int> width{6, 8};
    double wall_rate = 0.15;
    std::size_t min_pushes = 3, max_pushes = 40, max_states = 200000;
    std::uint64_t seed = 1;
    std::string out;
    app.add_option("-n,--count", count);
    app.add_option("--boxes", boxes, "LO HI (cycled)")->expected(2);
    app.add_option("--height", height, "LO HI")->expected(2);
    app.add_option("--width", width, "LO HI")->expected(2);
    app.add_option("--wall-rate", wall_rate);
    app.add_option("--min-pushes", min_pushes);
    app.add_option("--max-pushes", max_pushes);
    app.add_option("--max-states", max_states);
    app.add_option("-s,--seed", seed);
    app.add_option("-o,--out", out)->required();
    CLI11_PARSE(app, argc, argv);

    Rng rng(seed);
    std::ofstream f(out);
    if (!f) {
        std::cerr << "cannot write " << out << '\n';
        return 1;
    }
    f << "; " << count << " generated levels, seed " << seed << "\n\n";
    std::size_t made = 0, tries = 0;
    while (made < count) {
        ++tries;
        const int k = boxes[0] + static_cast<int>(made % static_cast<std::size_t>(boxes[1] - boxes[0] + 1));
        const int h = height[0] + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(height[1] - height[0] + 1)));
        const int w = width[0] + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(width[1] - width[0] + 1)));
        const std::string text = random_grid(rng, h, w, k, wall_rate);
        if (text.empty()) continue;
        const Board b = parse_xsb(text);
        if (has_static_deadlock(b)) continue;
        const auto r = bfs_optimal_solve(b, max_states);
        if (!r.solved() || r.plan.size() < min_pushes || r.plan.size() > max_pushes) continue;
        f << "; level " << made << ": " << k << " box(es), optimal " << r.plan.size() << " pushes\n" << text << '\n';
        ++made;
    }
    std::cerr << made << " levels from " << tries << " tries\n";
    return 0;
}
