#pragma once

// Training data from solved episodes and the per-iteration update schedule.

#include <sokocurr/error.hpp>
#include <sokocurr/evaluator.hpp>
#include <sokocurr/mcts.hpp>
#include <sokocurr/rng.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sokocurr {

/// One sample per solution step: policy = root visit distribution,
/// value = pushes left (n - i).
inline std::vector<TrainSample> harvest(const EpisodeResult& episode, std::size_t task_id = 0,
                                        std::size_t iteration = 0) {
    if (!episode.solved) throw Error(ErrorCode::UnsolvedEpisode, "cannot harvest an unsolved episode");
    std::vector<TrainSample> out;
    const std::size_t n = episode.steps.size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = episode.steps[i];
        out.push_back({encode(s.state), s.legal, s.policy, static_cast<double>(n - i), task_id, iteration});
    }
    return out;
}

/// FIFO ring of the latest `capacity` samples.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 100000) : capacity_(capacity) {
        if (capacity == 0) throw Error(ErrorCode::BadConfig, "replay capacity must be positive");
    }

    void push(TrainSample s) {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(s));
        } else {
            items_[head_] = std::move(s);
            head_ = (head_ + 1) % capacity_;
        }
        ++pushed_;
    }

    void push_samples(std::vector<TrainSample> samples) {
        for (auto& s : samples) push(std::move(s));
    }

    [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
    [[nodiscard]] std::uint64_t total_pushed() const noexcept { return pushed_; }

    /// i-th oldest sample still held.
    [[nodiscard]] const TrainSample& at(std::size_t i) const { return items_.at((head_ + i) % items_.size()); }

    /// Uniform draws with replacement.
    [[nodiscard]] std::vector<const TrainSample*> sample_minibatch(std::size_t size, Rng& rng) const {
        if (items_.empty()) throw Error(ErrorCode::EmptyBuffer, "minibatch from an empty buffer");
        std::vector<const TrainSample*> out;
        out.reserve(size);
        for (std::size_t i = 0; i < size; ++i) out.push_back(&items_[uniform_index(rng, items_.size())]);
        return out;
    }

private:
    std::size_t capacity_;
    std::vector<TrainSample> items_;
    std::size_t head_ = 0;  ///< oldest item once full
    std::uint64_t pushed_ = 0;
};

struct TrainSchedule {
    std::size_t minibatches = 1000;
    std::size_t batch_size = 64;
    double lr = 1e-3;

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"minibatches", minibatches}, {"batch_size", batch_size}, {"lr", lr}};
    }
    static TrainSchedule from_json(const nlohmann::json& j) {
        TrainSchedule s;
        s.minibatches = j.value("minibatches", s.minibatches);
        s.batch_size = j.value("batch_size", s.batch_size);
        s.lr = j.value("lr", s.lr);
        if (s.batch_size == 0 || !(s.lr >= 0.0)) throw Error(ErrorCode::BadConfig, "bad training schedule");
        return s;
    }
};

struct TrainReport {
    bool skipped = false;
    std::string notice;
    std::size_t steps = 0;
    double mean_loss = 0.0;   ///< mean minibatch loss before each step
    double last_loss = 0.0;
};

/// Runs the schedule in place on `net`. An empty buffer leaves `net`
/// untouched and reports a skip.
inline TrainReport train_iteration(NetParams& net, const ReplayBuffer& buffer, const TrainSchedule& schedule,
                                   Rng& rng) {
    TrainReport rep;
    if (buffer.empty()) {
        rep.skipped = true;
        rep.notice = "replay buffer empty, training skipped";
        return rep;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < schedule.minibatches; ++i) {
        const auto batch = buffer.sample_minibatch(schedule.batch_size, rng);
        const auto r = loss(net, std::span<const TrainSample* const>(batch));
        sgd_step(net, r.grads, schedule.lr);
        total += r.loss;
        rep.last_loss = r.loss;
        ++rep.steps;
    }
    rep.mean_loss = rep.steps ? total / static_cast<double>(rep.steps) : 0.0;
    return rep;
}

/// Loss on a fixed sample set without updating anything.
inline double probe_loss(const NetParams& net, std::span<const TrainSample> probe) {
    return probe.empty() ? 0.0 : loss(net, probe).loss;
}

} // namespace sokocurr
