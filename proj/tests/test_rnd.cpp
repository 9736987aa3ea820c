#include <sokocurr/rnd.hpp>

#include "support/random_boards.hpp"

#include <gtest/gtest.h>

using namespace sokocurr;

namespace {

RndConfig small_config() {
    RndConfig c;
    c.height = 8;
    c.width = 8;
    c.seed = 3;
    return c;
}

std::vector<StateEncoding> random_states(std::uint64_t seed, int n) {
    Rng rng(seed);
    std::vector<StateEncoding> out;
    for (int i = 0; i < n; ++i) out.push_back(encode(testsupport::random_board(rng, 7, 8, 2)));
    return out;
}

} // namespace

TEST(Welford, MatchesTwoPassFormula) {
    RunningStats s;
    const std::vector<double> xs{3.0, 1.5, 7.25, -2.0, 4.0, 4.0, 0.125};
    double prev_count = 0;
    for (double x : xs) {
        s.push(x);
        EXPECT_EQ(static_cast<double>(s.count), prev_count + 1);
        prev_count = static_cast<double>(s.count);
    }
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
    EXPECT_NEAR(s.mean, mean, 1e-12);
    EXPECT_NEAR(s.variance(), var, 1e-12);
}

TEST(Rnd, PureAndNonNegative) {
    const RndState rnd = init_rnd(small_config());
    for (const auto& e : random_states(1, 10)) {
        const double r = intrinsic_reward(rnd, e);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, rnd.config.r_max);
        EXPECT_EQ(r, intrinsic_reward(rnd, e));
    }
}

TEST(Rnd, OversizeBoardRejected) {
    const RndState rnd = init_rnd(small_config());
    Rng rng(2);
    const auto big = encode(testsupport::random_board(rng, 9, 9, 1));
    try {
        (void)intrinsic_reward(rnd, big);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
    }
}

TEST(Rnd, TrainingFallsAndTargetIsFrozen) {
    RndState rnd = init_rnd(small_config());
    const ParamSet target = rnd.target;
    const auto batch = random_states(4, 16);
    const double first = train_predictor(rnd, batch);
    double last = first;
    for (int i = 0; i < 99; ++i) last = train_predictor(rnd, batch);
    EXPECT_LT(last, first);
    EXPECT_TRUE(rnd.target == target);
    EXPECT_EQ(rnd.stats.count, 1600u);
    EXPECT_THROW((void)train_predictor(rnd, std::span<const StateEncoding>()), Error);
}

TEST(Rnd, RepeatedStateDecays) {
    RndState rnd = init_rnd(small_config());
    const auto states = random_states(7, 2);
    const StateEncoding& seen = states[0];
    const double before = intrinsic_reward(rnd, seen);
    std::vector<double> raw;
    for (int i = 0; i < 500; ++i) {
        train_predictor(rnd, std::span<const StateEncoding>(&seen, 1));
        raw.push_back(intrinsic_reward(rnd, seen));
    }
    EXPECT_LT(raw.back(), 0.1 * before);
    // Non-increasing up to optimizer noise: 3-step moving average, once the
    // normalizer has left its warmup (the switch from 1 to the running std
    // rescales every reward at once).
    for (std::size_t i = rnd.config.warmup + 3; i + 3 <= raw.size(); i += 3) {
        const double a = (raw[i - 3] + raw[i - 2] + raw[i - 1]) / 3;
        const double b = (raw[i] + raw[i + 1] + raw[i + 2]) / 3;
        EXPECT_LE(b, a * 1.05 + 1e-4) << "at " << i;
    }
    EXPECT_GT(intrinsic_reward(rnd, states[1]), raw.back());
}

TEST(Rnd, CheckpointRoundTrip) {
    RndState rnd = init_rnd(small_config());
    const auto batch = random_states(5, 4);
    for (int i = 0; i < 5; ++i) train_predictor(rnd, batch);
    NetConfig nc;
    nc.layers = 2;
    nc.hidden = 8;
    const NetParams net = init_net(nc);
    const std::string blob = snapshot(net, rnd);
    const Checkpoint ck = load_checkpoint(blob, Arch::Gnn);
    EXPECT_TRUE(ck.net == net);
    ASSERT_TRUE(ck.rnd.has_value());
    EXPECT_TRUE(*ck.rnd == rnd);
    EXPECT_TRUE(load_net(blob) == net);
    EXPECT_THROW((void)load_checkpoint(blob, Arch::Cnn), Error);
    EXPECT_THROW((void)load_checkpoint(blob + "x"), Error);
}
