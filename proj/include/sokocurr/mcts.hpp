#pragma once

// PUCT search over push-level states.
//
// Values are remaining pushes (lower is better). Edges store Q as the negated
// mean of the remaining pushes after taking the action, so the selection rule
//   U = Q + cpuct * sqrt(1 + sum_b N_b) / (1 + N_a) * p_a
// is maximized. A simulation that stops at depth D with leaf value v backs up
// v to the edge into the leaf, v + 1 to the edge above it, and so on, capped
// at the length limit.

#include <sokocurr/engine.hpp>
#include <sokocurr/error.hpp>
#include <sokocurr/evaluator.hpp>
#include <sokocurr/rnd.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace sokocurr {

struct SearchConfig {
    std::size_t simulations = 1600;
    double cpuct = 1.5;
    int length_limit = 2000;
    bool curiosity = false;
    double c_int = 1.0;
    bool reuse_tree = true;

    void validate() const {
        if (simulations == 0) throw Error(ErrorCode::BadConfig, "simulations must be positive");
        if (!(cpuct > 0.0)) throw Error(ErrorCode::BadConfig, "cpuct must be positive");
        if (length_limit < 1) throw Error(ErrorCode::BadConfig, "length_limit must be positive");
        if (!(c_int >= 0.0)) throw Error(ErrorCode::BadConfig, "c_int must be nonnegative");
    }

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"simulations", simulations}, {"cpuct", cpuct},   {"length_limit", length_limit},
                {"curiosity", curiosity},     {"c_int", c_int},   {"reuse_tree", reuse_tree}};
    }
    static SearchConfig from_json(const nlohmann::json& j) {
        SearchConfig c;
        c.simulations = j.value("simulations", c.simulations);
        c.cpuct = j.value("cpuct", c.cpuct);
        c.length_limit = j.value("length_limit", c.length_limit);
        c.curiosity = j.value("curiosity", c.curiosity);
        c.c_int = j.value("c_int", c.c_int);
        c.reuse_tree = j.value("reuse_tree", c.reuse_tree);
        c.validate();
        return c;
    }
};

// ---------------------------------------------------------------------------
// Evaluators

template <class E>
concept Evaluator = requires(const E& e, const Board& b, std::span<const PushAction> legal) {
    { e.evaluate(b, legal) } -> std::same_as<PolicyValue>;
};

/// Network-backed evaluator over an immutable parameter snapshot.
struct NetEvaluator {
    const NetParams* net = nullptr;

    [[nodiscard]] PolicyValue evaluate(const Board& b, std::span<const PushAction> legal) const {
        return forward(*net, encode(b), legal);
    }
};

/// Uniform priors and a constant value.
struct UniformEvaluator {
    double value = 0.0;

    [[nodiscard]] PolicyValue evaluate(const Board&, std::span<const PushAction> legal) const {
        return {std::vector<double>(legal.size(), legal.empty() ? 0.0 : 1.0 / static_cast<double>(legal.size())), value};
    }
};

// ---------------------------------------------------------------------------
// Tree

enum class Terminal : std::uint8_t { None, Goal, Dead };

struct Edge {
    PushAction action;
    double prior = 0.0;
    std::uint32_t visits = 0;
    double value_sum = 0.0;  ///< sum of backed-up negated values
    double q = 0.0;          ///< value_sum / visits, or the initial value while unvisited
    int child = -1;
};

struct Node {
    Board board;
    Terminal terminal = Terminal::None;
    bool expanded = false;
    std::uint64_t visits = 0;  ///< sum of edge visits
    std::vector<Edge> edges;
};

inline Terminal classify(const Board& b) {
    if (is_goal(b)) return Terminal::Goal;
    if (has_static_deadlock(b) || legal_pushes(b).empty()) return Terminal::Dead;
    return Terminal::None;
}

struct Tree {
    std::vector<Node> nodes;  ///< nodes[0] is the root

    explicit Tree(const Board& root) { nodes.push_back({root, classify(root), false, 0, {}}); }
    [[nodiscard]] Node& root() { return nodes[0]; }
    [[nodiscard]] const Node& root() const { return nodes[0]; }
};

inline double puct_score(const Edge& e, std::uint64_t parent_visits, double cpuct) {
    return e.q + cpuct * std::sqrt(1.0 + static_cast<double>(parent_visits)) / (1.0 + e.visits) * e.prior;
}

namespace detail {

inline std::size_t select_edge(const Node& n, double cpuct) {
    std::size_t best = 0;
    double best_u = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n.edges.size(); ++i) {
        const double u = puct_score(n.edges[i], n.visits, cpuct);
        if (u > best_u) {
            best_u = u;
            best = i;
        }
    }
    return best;
}

/// Expands a non-terminal node; returns the evaluator's value clamped to [0, L].
template <Evaluator E>
double expand(Tree& tree, int node, const E& eval, const RndState* rnd, const SearchConfig& cfg) {
    Node& n = tree.nodes[static_cast<std::size_t>(node)];
    const auto legal = legal_pushes(n.board);
    const PolicyValue pv = eval.evaluate(n.board, legal);
    if (pv.p.size() != legal.size()) throw Error(ErrorCode::ShapeMismatch, "evaluator returned wrong prior count");
    n.edges.clear();
    n.edges.reserve(legal.size());
    for (std::size_t i = 0; i < legal.size(); ++i) {
        Edge e;
        e.action = legal[i];
        e.prior = pv.p[i];
        if (cfg.curiosity && rnd != nullptr) {
            e.q = cfg.c_int * intrinsic_reward(*rnd, encode(detail::push_unchecked(n.board, legal[i])));
        }
        n.edges.push_back(e);
    }
    n.expanded = true;
    return std::clamp(pv.v, 0.0, static_cast<double>(cfg.length_limit));
}

} // namespace detail

/// One simulation from the root. The root must be non-terminal; it is
/// expanded on first use.
template <Evaluator E>
void simulate(Tree& tree, const E& eval, const RndState* rnd, const SearchConfig& cfg) {
    if (tree.root().terminal != Terminal::None) throw Error(ErrorCode::RootTerminal, "search from a terminal state");
    if (!tree.root().expanded) (void)detail::expand(tree, 0, eval, rnd, cfg);
    std::vector<std::pair<int, std::size_t>> path;  // (node, edge)
    int node = 0;
    double leaf = 0.0;
    while (true) {
        Node& n = tree.nodes[static_cast<std::size_t>(node)];
        const std::size_t ei = detail::select_edge(n, cfg.cpuct);
        path.emplace_back(node, ei);
        int child = n.edges[ei].child;
        if (child < 0) {
            Board next = detail::push_unchecked(n.board, n.edges[ei].action);
            const Terminal t = classify(next);
            tree.nodes.push_back({std::move(next), t, false, 0, {}});
            child = static_cast<int>(tree.nodes.size() - 1);
            tree.nodes[static_cast<std::size_t>(node)].edges[ei].child = child;
        }
        const Node& c = tree.nodes[static_cast<std::size_t>(child)];
        if (c.terminal == Terminal::Goal) {
            leaf = 0.0;
            break;
        }
        if (c.terminal == Terminal::Dead) {
            leaf = cfg.length_limit;
            break;
        }
        if (!c.expanded) {
            leaf = detail::expand(tree, child, eval, rnd, cfg);
            break;
        }
        node = child;
    }
    const double cap = cfg.length_limit;
    for (std::size_t k = path.size(); k-- > 0;) {
        const double remaining = std::min(leaf + static_cast<double>(path.size() - 1 - k), cap);
        Node& n = tree.nodes[static_cast<std::size_t>(path[k].first)];
        Edge& e = n.edges[path[k].second];
        ++e.visits;
        ++n.visits;
        e.value_sum -= remaining;
        e.q = e.value_sum / e.visits;
    }
}

template <Evaluator E>
void search(Tree& tree, const E& eval, const RndState* rnd, const SearchConfig& cfg) {
    for (std::size_t i = 0; i < cfg.simulations; ++i) simulate(tree, eval, rnd, cfg);
}

/// Index of the most-visited root edge (ties: lowest index).
inline std::size_t best_edge(const Tree& tree) {
    const Node& r = tree.root();
    if (r.edges.empty()) throw Error(ErrorCode::NoChildren, "root has no children");
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.edges.size(); ++i) {
        if (r.edges[i].visits > r.edges[best].visits) best = i;
    }
    return best;
}

inline PushAction best_action(const Tree& tree) { return tree.root().edges[best_edge(tree)].action; }

/// Root visit counts normalized to a distribution over the root's edges.
inline std::vector<double> visit_policy(const Tree& tree) {
    const Node& r = tree.root();
    std::vector<double> p(r.edges.size(), 0.0);
    if (r.visits == 0) return p;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(r.edges[i].visits) / static_cast<double>(r.visits);
    return p;
}

/// New tree rooted at the child behind root edge `edge`, keeping its subtree.
inline Tree reroot(const Tree& tree, std::size_t edge) {
    const int start = tree.root().edges.at(edge).child;
    if (start < 0) {
        return Tree(detail::push_unchecked(tree.root().board, tree.root().edges[edge].action));
    }
    Tree out(tree.nodes[static_cast<std::size_t>(start)].board);
    out.nodes.clear();
    std::vector<int> remap(tree.nodes.size(), -1);
    std::vector<int> queue{start};
    remap[static_cast<std::size_t>(start)] = 0;
    out.nodes.push_back(tree.nodes[static_cast<std::size_t>(start)]);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int old = queue[qi];
        const int fresh = remap[static_cast<std::size_t>(old)];
        for (auto& e : out.nodes[static_cast<std::size_t>(fresh)].edges) {
            if (e.child < 0) continue;
            const int c = e.child;
            if (remap[static_cast<std::size_t>(c)] < 0) {
                remap[static_cast<std::size_t>(c)] = static_cast<int>(out.nodes.size());
                out.nodes.push_back(tree.nodes[static_cast<std::size_t>(c)]);
                queue.push_back(c);
            }
            e.child = remap[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Episodes

struct EpisodeStep {
    Board state;
    std::vector<PushAction> legal;  ///< root edge order
    std::vector<double> policy;     ///< normalized root visits, aligned with legal
    PushAction action;
};

struct EpisodeResult {
    bool solved = false;
    std::vector<EpisodeStep> steps;
    Board final_state;
    std::size_t simulations = 0;

    [[nodiscard]] std::vector<PushAction> plan() const {
        std::vector<PushAction> out;
        for (const auto& s : steps) out.push_back(s.action);
        return out;
    }
};

/// Plays search -> best action -> push until the goal or the length limit.
/// A state with a static deadlock or no pushes ends the episode as unsolved,
/// since no goal can follow it. When `trace` is set, one JSON line per step
/// is written to it.
template <Evaluator E>
EpisodeResult run_episode(const Board& start, const E& eval, const RndState* rnd, const SearchConfig& cfg,
                          std::ostream* trace = nullptr) {
    cfg.validate();
    EpisodeResult out;
    out.final_state = start;
    std::optional<Tree> tree;
    for (int step = 0; step < cfg.length_limit; ++step) {
        const Board& here = out.final_state;
        if (is_goal(here)) break;
        if (classify(here) == Terminal::Dead) break;
        if (!tree || !cfg.reuse_tree) tree.emplace(here);
        search(*tree, eval, rnd, cfg);
        out.simulations += cfg.simulations;
        const std::size_t bi = best_edge(*tree);
        EpisodeStep s;
        s.state = here;
        for (const auto& e : tree->root().edges) s.legal.push_back(e.action);
        s.policy = visit_policy(*tree);
        s.action = s.legal[bi];
        if (trace) {
            nlohmann::json line{{"step", step},
                                {"action", {{"row", s.action.box.row}, {"col", s.action.box.col},
                                            {"dir", std::string(1, dir_letter(s.action.dir))}}},
                                {"visits", nlohmann::json::array()},
                                {"q", nlohmann::json::array()}};
            for (const auto& e : tree->root().edges) {
                line["visits"].push_back(e.visits);
                line["q"].push_back(e.q);
            }
            *trace << line.dump() << '\n';
        }
        Board next = apply_push(here, s.action);
        out.steps.push_back(std::move(s));
        if (cfg.reuse_tree) tree = reroot(*tree, bi);
        out.final_state = std::move(next);
        if (tree && tree->root().terminal != Terminal::None) tree.reset();
    }
    out.solved = is_goal(out.final_state);
    return out;
}

} // namespace sokocurr
