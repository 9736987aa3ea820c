#pragma once

// Difficulty-quantum-momentum task selector. Each arm keeps a momentum-tracked
// success history h; the reward for trying it is (1{succeed} - h)^2, which
// is large only while the outcome still surprises. Rewards drive a standard
// Exp3 learner with log-space weights and a uniform exploration floor.

#include <sokocurr/error.hpp>
#include <sokocurr/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace sokocurr {

struct BanditConfig {
    double alpha = 0.9;   ///< momentum of the success history
    double gamma = 0.1;   ///< Exp3 exploration mix
    std::size_t batch_size = 32;

    void validate() const {
        if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorCode::BadConfig, "bandit alpha must be in [0,1)");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadConfig, "bandit gamma must be in (0,1]");
        if (batch_size == 0) throw Error(ErrorCode::BadConfig, "bandit batch_size must be positive");
    }
};

struct ArmState {
    double h = 0.0;
    double log_w = 0.0;
    std::size_t plays = 0;
    std::optional<bool> last_outcome;
};

/// (1{succeed} - h)^2
constexpr double reward(double h, bool succeeded) {
    const double d = (succeeded ? 1.0 : 0.0) - h;
    return d * d;
}

class Bandit {
public:
    Bandit(std::size_t n_arms, BanditConfig config) : config_(config), arms_(n_arms) {
        config_.validate();
        if (n_arms == 0) {
            throw Error(ErrorCode::EmptyPool, "bandit needs at least one arm");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return arms_.size(); }
    [[nodiscard]] const BanditConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<ArmState>& arms() const noexcept { return arms_; }
    [[nodiscard]] const ArmState& arm(std::size_t i) const { return arms_.at(i); }

    /// p_i = (1 - gamma) w_i / sum(w) + gamma / n
    [[nodiscard]] std::vector<double> probabilities() const {
        const double n = static_cast<double>(arms_.size());
        double max_lw = -std::numeric_limits<double>::infinity();
        for (const auto& a : arms_) max_lw = std::max(max_lw, a.log_w);
        std::vector<double> p(arms_.size());
        double total = 0.0;
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            p[i] = std::exp(arms_[i].log_w - max_lw);
            total += p[i];
        }
        for (double& x : p) x = (1.0 - config_.gamma) * x / total + config_.gamma / n;
        return p;
    }

    /// Draws `batch_size` distinct arms (capped at n) by repeated sampling from
    /// p with already-chosen arms removed and the rest renormalized.
    std::vector<std::size_t> select_batch(Rng& rng) {
        const std::size_t batch = std::min(config_.batch_size, arms_.size());
        const auto p = probabilities();
        std::vector<double> remaining = p;
        std::vector<std::size_t> chosen;
        chosen.reserve(batch);
        pending_.clear();
        for (std::size_t b = 0; b < batch; ++b) {
            double total = 0.0;
            for (double x : remaining) total += x;
            const double u = uniform_unit(rng) * total;
            double acc = 0.0;
            std::size_t pick = arms_.size();
            std::size_t last_live = arms_.size();
            for (std::size_t i = 0; i < remaining.size(); ++i) {
                if (remaining[i] <= 0.0) continue;
                last_live = i;
                acc += remaining[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == arms_.size()) pick = last_live;  // rounding at the top end
            remaining[pick] = 0.0;
            chosen.push_back(pick);
            pending_.emplace(pick, p[pick]);
        }
        return chosen;
    }

    /// Exp3 update with the pre-update history, then the momentum update.
    void update(std::size_t arm, bool succeeded) {
        auto it = pending_.find(arm);
        if (it == pending_.end()) {
            throw Error(ErrorCode::ArmNotSelected, "arm " + std::to_string(arm) + " was not in the last batch");
        }
        const double p = it->second;
        pending_.erase(it);
        ArmState& a = arms_[arm];
        const double r = reward(a.h, succeeded);
        a.log_w += config_.gamma * (r / p) / static_cast<double>(arms_.size());
        a.h = config_.alpha * a.h + (1.0 - config_.alpha) * (succeeded ? 1.0 : 0.0);
        ++a.plays;
        a.last_outcome = succeeded;
    }

    /// New arm with the current mean weight and h = 0. Returns its index.
    std::size_t add_arm() {
        double max_lw = -std::numeric_limits<double>::infinity();
        for (const auto& a : arms_) max_lw = std::max(max_lw, a.log_w);
        double sum = 0.0;
        for (const auto& a : arms_) sum += std::exp(a.log_w - max_lw);
        ArmState fresh;
        fresh.log_w = max_lw + std::log(sum / static_cast<double>(arms_.size()));
        arms_.push_back(fresh);
        return arms_.size() - 1;
    }

    // Line-oriented checkpoint: "arm h log_w plays last" with last in {-,0,1}.
    void save(std::ostream& out) const {
        out << "# alpha " << std::setprecision(17) << config_.alpha << " gamma " << config_.gamma << " batch "
            << config_.batch_size << '\n';
        out << "# arm\th\tlog_w\tplays\tlast\n";
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            const auto& a = arms_[i];
            out << i << '\t' << std::setprecision(17) << a.h << '\t' << a.log_w << '\t' << a.plays << '\t'
                << (a.last_outcome ? (*a.last_outcome ? "1" : "0") : "-") << '\n';
        }
    }

    static Bandit load(std::istream& in, BanditConfig config) {
        std::vector<ArmState> arms;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::size_t idx = 0;
            ArmState a;
            std::string last;
            ss >> idx >> a.h >> a.log_w >> a.plays >> last;
            if (!ss || idx != arms.size()) throw Error(ErrorCode::BadCheckpoint, "bad bandit line: " + line);
            if (last == "1") a.last_outcome = true;
            else if (last == "0") a.last_outcome = false;
            arms.push_back(a);
        }
        Bandit b(arms.size(), config);
        b.arms_ = std::move(arms);
        return b;
    }

private:
    BanditConfig config_;
    std::vector<ArmState> arms_;
    std::unordered_map<std::size_t, double> pending_;
};

// ---------------------------------------------------------------------------
// Synthetic moving-frontier experiment: arm i succeeds with probability
// `p_easy` while i < frontier and `p_hard` otherwise; the frontier advances
// by `step` every `period` rounds.

struct FrontierSim {
    std::size_t arms = 20;
    std::size_t rounds = 1600;
    std::size_t period = 400;
    std::size_t start = 10;
    std::size_t step = 3;
    double p_easy = 0.95;
    double p_hard = 0.05;
    std::uint64_t seed = 1;
    BanditConfig bandit{0.9, 0.1, 4};
};

struct FrontierTrace {
    std::vector<double> mass_center;  ///< sum_i p_i * i, before each round's selection
    std::vector<std::size_t> frontier;
    double min_prob_ratio = std::numeric_limits<double>::infinity();  ///< min over rounds of min_i p_i / (gamma/n)
};

inline FrontierTrace run_frontier_sim(const FrontierSim& sim) {
    Bandit bandit(sim.arms, sim.bandit);
    Rng select_rng(derive_seed(sim.seed, 0));
    Rng outcome_rng(derive_seed(sim.seed, 1));
    FrontierTrace trace;
    const double floor = sim.bandit.gamma / static_cast<double>(sim.arms);
    for (std::size_t t = 0; t < sim.rounds; ++t) {
        const std::size_t frontier = std::min(sim.arms, sim.start + (t / sim.period) * sim.step);
        const auto p = bandit.probabilities();
        double center = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            center += p[i] * static_cast<double>(i);
            trace.min_prob_ratio = std::min(trace.min_prob_ratio, p[i] / floor);
        }
        trace.mass_center.push_back(center);
        trace.frontier.push_back(frontier);
        for (std::size_t arm : bandit.select_batch(select_rng)) {
            const double ps = arm < frontier ? sim.p_easy : sim.p_hard;
            bandit.update(arm, uniform_unit(outcome_rng) < ps);
        }
    }
    return trace;
}

} // namespace sokocurr
