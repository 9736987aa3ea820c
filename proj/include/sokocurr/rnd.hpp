#pragma once

// Random network distillation. A frozen random MLP embeds a state; a second
// MLP learns to reproduce that embedding on visited states. The squared
// embedding error, scaled by the running std of observed errors, is the
// curiosity reward: high on states the predictor has not been trained on.
//
// Input is the one-hot encoding flattened over a fixed height x width frame
// (smaller boards are wall-padded), identical for both evaluator variants.

#include <sokocurr/error.hpp>
#include <sokocurr/evaluator.hpp>
#include <sokocurr/nn.hpp>
#include <sokocurr/rng.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sokocurr {

struct RndConfig {
    int height = 10;   ///< input frame; encodings must fit
    int width = 10;
    int hidden = 128;
    int embed_dim = 64;
    double lr = 1e-3;
    double r_max = 5.0;
    std::size_t warmup = 32;   ///< observed errors before the std is used
    std::uint64_t seed = 0;

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"height", height}, {"width", width}, {"hidden", hidden}, {"embed_dim", embed_dim},
                {"lr", lr},         {"r_max", r_max}, {"warmup", warmup}, {"seed", seed}};
    }
    static RndConfig from_json(const nlohmann::json& j) {
        RndConfig c;
        c.height = j.value("height", c.height);
        c.width = j.value("width", c.width);
        c.hidden = j.value("hidden", c.hidden);
        c.embed_dim = j.value("embed_dim", c.embed_dim);
        c.lr = j.value("lr", c.lr);
        c.r_max = j.value("r_max", c.r_max);
        c.warmup = j.value("warmup", c.warmup);
        c.seed = j.value("seed", c.seed);
        if (c.height < 1 || c.width < 1 || c.hidden < 1 || c.embed_dim < 1 || !(c.r_max > 0)) {
            throw Error(ErrorCode::BadConfig, "rnd sizes must be positive");
        }
        return c;
    }
};

/// Welford running mean / variance.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    [[nodiscard]] double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

    friend bool operator==(const RunningStats&, const RunningStats&) = default;
};

struct RndState {
    RndConfig config;
    ParamSet target;     ///< frozen after init
    ParamSet predictor;
    AdamState adam;
    RunningStats stats;

    friend bool operator==(const RndState& a, const RndState& b) {
        return a.config.to_json() == b.config.to_json() && a.target == b.target && a.predictor == b.predictor &&
               a.adam == b.adam && a.stats == b.stats;
    }
};

namespace detail {

inline ParamSet rnd_mlp(const RndConfig& c, Rng& rng) {
    const int in = c.height * c.width * kCategories;
    ParamSet p;
    p.add("w1", init_uniform(in, c.hidden, in / kCategories, 1.0, rng));  // one-hot: ~one active input per cell
    p.add("b1", Matrix::Zero(1, c.hidden));
    p.add("w2", init_uniform(c.hidden, c.hidden, c.hidden, 1.0, rng));
    p.add("b2", Matrix::Zero(1, c.hidden));
    p.add("w3", init_uniform(c.hidden, c.embed_dim, c.hidden, 1.0, rng));
    p.add("b3", Matrix::Zero(1, c.embed_dim));
    return p;
}

/// Active input indices of the flattened, padded one-hot.
inline std::vector<int> rnd_input(const RndConfig& c, const StateEncoding& enc) {
    if (enc.height > c.height || enc.width > c.width) {
        throw Error(ErrorCode::ShapeMismatch, "board larger than the curiosity input frame");
    }
    std::vector<int> active;
    active.reserve(static_cast<std::size_t>(c.height * c.width));
    for (int r = 0; r < c.height; ++r)
        for (int col = 0; col < c.width; ++col) {
            const auto cat = (r < enc.height && col < enc.width) ? enc.at({r, col}) : CellCategory::Wall;
            active.push_back((r * c.width + col) * kCategories + static_cast<int>(cat));
        }
    return active;
}

struct MlpCache {
    RowVector z1, z2, out;
};

inline MlpCache rnd_forward(const ParamSet& p, const std::vector<int>& active) {
    MlpCache m;
    m.z1 = p[1];
    for (int i : active) m.z1 += p[0].row(i);
    m.z2 = m.z1.cwiseMax(0.0) * p[2] + p[3];
    m.out = m.z2.cwiseMax(0.0) * p[4] + p[5];
    return m;
}

} // namespace detail

inline RndState init_rnd(const RndConfig& config) {
    RndState s;
    s.config = config;
    Rng target_rng(derive_seed(config.seed, 0x746172));
    Rng predictor_rng(derive_seed(config.seed, 0x707265));
    s.target = detail::rnd_mlp(config, target_rng);
    s.predictor = detail::rnd_mlp(config, predictor_rng);
    s.adam = AdamState::for_params(s.predictor);
    return s;
}

/// ||predictor(s) - target(s)||^2
inline double rnd_raw_error(const RndState& rnd, const StateEncoding& enc) {
    const auto active = detail::rnd_input(rnd.config, enc);
    return (detail::rnd_forward(rnd.predictor, active).out - detail::rnd_forward(rnd.target, active).out).squaredNorm();
}

/// Normalization divisor: running std of observed errors, 1 before warmup.
inline double rnd_scale(const RndState& rnd) {
    if (rnd.stats.count < std::max<std::size_t>(rnd.config.warmup, 2)) return 1.0;
    const double sd = std::sqrt(rnd.stats.variance());
    return sd > 0.0 ? sd : 1.0;
}

inline double intrinsic_reward(const RndState& rnd, const StateEncoding& enc) {
    return std::clamp(rnd_raw_error(rnd, enc) / rnd_scale(rnd), 0.0, rnd.config.r_max);
}

/// One Adam step on the mean squared embedding error over the batch; the
/// pre-step errors feed the running statistics. Returns the pre-step loss.
inline double train_predictor(RndState& rnd, std::span<const StateEncoding> batch) {
    if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "rnd training on an empty batch");
    auto grads = rnd.predictor.zeros_like();
    const double n = static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& enc : batch) {
        const auto active = detail::rnd_input(rnd.config, enc);
        const auto pc = detail::rnd_forward(rnd.predictor, active);
        const RowVector target = detail::rnd_forward(rnd.target, active).out;
        const RowVector diff = pc.out - target;
        const double err = diff.squaredNorm();
        rnd.stats.push(err);
        total += err;
        const RowVector dout = 2.0 * diff / n;
        const auto& p = rnd.predictor;
        const RowVector a2 = pc.z2.cwiseMax(0.0);
        grads[4] += a2.transpose() * dout;
        grads[5] += dout;
        RowVector d2 = dout * p[4].transpose();
        d2 = (pc.z2.array() > 0.0).select(d2, RowVector::Zero(d2.cols()));
        const RowVector a1 = pc.z1.cwiseMax(0.0);
        grads[2] += a1.transpose() * d2;
        grads[3] += d2;
        RowVector d1 = d2 * p[2].transpose();
        d1 = (pc.z1.array() > 0.0).select(d1, RowVector::Zero(d1.cols()));
        for (int i : active) grads[0].row(i) += d1;
        grads[1] += d1;
    }
    adam_step(rnd.predictor, rnd.adam, grads, rnd.config.lr);
    return total / n;
}

// ---------------------------------------------------------------------------
// Checkpoint: evaluator section followed by an rnd section.

namespace detail {

inline void write_rnd_section(ByteWriter& w, const RndState& rnd) {
    w.str("rnd");
    w.str(rnd.config.to_json().dump());
    AdamState none = AdamState::for_params(rnd.target);
    write_params(w, rnd.target, none);
    write_params(w, rnd.predictor, rnd.adam);
    w.u64(rnd.stats.count);
    w.f64(rnd.stats.mean);
    w.f64(rnd.stats.m2);
}

inline RndState read_rnd_section(ByteReader& r) {
    RndState s;
    s.config = RndConfig::from_json(nlohmann::json::parse(r.str()));
    AdamState none;
    read_params(r, s.target, none);
    read_params(r, s.predictor, s.adam);
    s.stats.count = r.u64();
    s.stats.mean = r.f64();
    s.stats.m2 = r.f64();
    const RndState shape = init_rnd(s.config);
    for (std::size_t i = 0; i < shape.target.size(); ++i) {
        if (s.target.size() != shape.target.size() || s.predictor.size() != shape.predictor.size() ||
            s.target[i].rows() != shape.target[i].rows() || s.target[i].cols() != shape.target[i].cols() ||
            s.predictor[i].rows() != shape.predictor[i].rows() || s.predictor[i].cols() != shape.predictor[i].cols()) {
            throw Error(ErrorCode::BadCheckpoint, "rnd tensor layout mismatch");
        }
    }
    return s;
}

} // namespace detail

struct Checkpoint {
    NetParams net;
    std::optional<RndState> rnd;
};

inline std::string snapshot(const NetParams& net, const RndState& rnd) {
    ByteWriter w;
    detail::write_header(w, 2);
    detail::write_net_section(w, net);
    detail::write_rnd_section(w, rnd);
    return w.bytes();
}

inline Checkpoint load_checkpoint(std::string_view blob, std::optional<Arch> expect = std::nullopt) {
    ByteReader r(blob);
    const auto sections = detail::read_header(r);
    Checkpoint ck;
    bool have_net = false;
    for (std::uint32_t i = 0; i < sections; ++i) {
        const std::string tag = r.str();
        if (tag == "evaluator") {
            ck.net = detail::read_net_section(r);
            have_net = true;
        } else if (tag == "rnd") {
            ck.rnd = detail::read_rnd_section(r);
        } else {
            throw Error(ErrorCode::BadCheckpoint, "unknown section '" + tag + "'");
        }
    }
    if (!have_net) throw Error(ErrorCode::BadCheckpoint, "checkpoint has no evaluator section");
    if (!r.done()) throw Error(ErrorCode::BadCheckpoint, "trailing bytes in checkpoint");
    if (expect && *expect != ck.net.config.arch) {
        throw Error(ErrorCode::ArchMismatch,
                    "checkpoint holds a " + to_string(ck.net.config.arch) + " network, expected " + to_string(*expect));
    }
    return ck;
}

} // namespace sokocurr
