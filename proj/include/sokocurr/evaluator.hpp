#pragma once

// Policy/value network (p, v) = f(s) over the seven-category cell encoding.
//
// Both architectures run on a per-cell node table with fixed neighbour
// offsets and per-offset weight matrices:
//   - Gnn: offsets {self, up, down, left, right}; each layer is
//          h <- h + relu(sum_k gather_k(h) W_k + b).
//   - Cnn: the nine 3x3 offsets (zero padding); layers come in residual
//          pairs h <- relu(h + conv(relu(conv(h)))).
// Heads: per-cell linear map to four push-direction logits, masked to the
// legal pushes; value = softplus(MLP(mean over cells)).

#include <sokocurr/engine.hpp>
#include <sokocurr/error.hpp>
#include <sokocurr/nn.hpp>
#include <sokocurr/rng.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sokocurr {

// ---------------------------------------------------------------------------
// Encoding

enum class CellCategory : std::uint8_t {
    Wall = 0,
    Empty,
    EmptyGoal,
    Box,
    BoxOnGoal,
    Reachable,
    ReachableGoal,
};

inline constexpr int kCategories = 7;

struct StateEncoding {
    int height = 0;
    int width = 0;
    std::vector<CellCategory> cells;  ///< row-major

    [[nodiscard]] CellCategory at(Cell c) const { return cells[static_cast<std::size_t>(c.row * width + c.col)]; }
    [[nodiscard]] int size() const noexcept { return height * width; }

    friend bool operator==(const StateEncoding&, const StateEncoding&) = default;
};

inline StateEncoding encode(const Board& board) {
    StateEncoding enc{board.height(), board.width(), {}};
    const Layout& lay = board.layout();
    const auto reach = reachable_mask(board);
    enc.cells.resize(static_cast<std::size_t>(lay.size()));
    for (int i = 0; i < lay.size(); ++i) {
        const bool goal = lay.goal(i);
        CellCategory c;
        if (lay.wall(i)) c = CellCategory::Wall;
        else if (board.has_box_at(i)) c = goal ? CellCategory::BoxOnGoal : CellCategory::Box;
        else if (reach[i]) c = goal ? CellCategory::ReachableGoal : CellCategory::Reachable;
        else c = goal ? CellCategory::EmptyGoal : CellCategory::Empty;
        enc.cells[static_cast<std::size_t>(i)] = c;
    }
    return enc;
}

/// Grows the encoding to height x width, filling new cells with walls.
inline StateEncoding pad_encoding(const StateEncoding& enc, int height, int width) {
    if (height < enc.height || width < enc.width) {
        throw Error(ErrorCode::ShapeMismatch, "cannot pad to smaller dimensions");
    }
    StateEncoding out{height, width, std::vector<CellCategory>(static_cast<std::size_t>(height * width), CellCategory::Wall)};
    for (int r = 0; r < enc.height; ++r)
        for (int c = 0; c < enc.width; ++c)
            out.cells[static_cast<std::size_t>(r * width + c)] = enc.at({r, c});
    return out;
}

// ---------------------------------------------------------------------------
// Configuration and parameters

enum class Arch { Cnn, Gnn };

inline std::string to_string(Arch a) { return a == Arch::Cnn ? "cnn" : "gnn"; }
inline Arch arch_from_string(std::string_view s) {
    if (s == "cnn") return Arch::Cnn;
    if (s == "gnn") return Arch::Gnn;
    throw Error(ErrorCode::BadConfig, "unknown architecture '" + std::string(s) + "'");
}

struct NetConfig {
    Arch arch = Arch::Gnn;
    int layers = 6;
    int hidden = 64;
    int value_hidden = 64;
    double value_scale = 100.0;   ///< sigma in the value loss
    double value_weight = 1.0;    ///< lambda in the value loss
    double policy_init_scale = 0.1;
    double value_init_scale = 0.1;   ///< output layer of the value head
    std::uint64_t seed = 0;

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"arch", to_string(arch)},        {"layers", layers},          {"hidden", hidden},
                {"value_hidden", value_hidden},   {"value_scale", value_scale}, {"value_weight", value_weight},
                {"policy_init_scale", policy_init_scale}, {"value_init_scale", value_init_scale},
                {"seed", seed}};
    }

    static NetConfig from_json(const nlohmann::json& j) {
        NetConfig c;
        c.arch = arch_from_string(j.value("arch", std::string("gnn")));
        c.layers = j.value("layers", c.layers);
        c.hidden = j.value("hidden", c.hidden);
        c.value_hidden = j.value("value_hidden", c.value_hidden);
        c.value_scale = j.value("value_scale", c.value_scale);
        c.value_weight = j.value("value_weight", c.value_weight);
        c.policy_init_scale = j.value("policy_init_scale", c.policy_init_scale);
        c.value_init_scale = j.value("value_init_scale", c.value_init_scale);
        c.seed = j.value("seed", c.seed);
        if (c.layers < 1 || c.hidden < 1 || c.value_hidden < 1 || !(c.value_scale > 0)) {
            throw Error(ErrorCode::BadConfig, "network sizes must be positive");
        }
        return c;
    }
};

[[nodiscard]] constexpr int offset_count(Arch a) { return a == Arch::Cnn ? 9 : 5; }

struct NetParams {
    NetConfig config;
    ParamSet params;
    AdamState adam;

    friend bool operator==(const NetParams& a, const NetParams& b) {
        return a.config.to_json() == b.config.to_json() && a.params == b.params && a.adam == b.adam;
    }
};

namespace detail {

/// Tensor positions inside NetParams::params, derived from the config.
struct NetIndex {
    std::size_t embed_w = 0, embed_b = 0;
    std::vector<std::size_t> layer_w;  ///< first of `offsets` consecutive tensors per layer
    std::vector<std::size_t> layer_b;
    std::size_t policy_w = 0, policy_b = 0;
    std::size_t value_w1 = 0, value_b1 = 0, value_w2 = 0, value_b2 = 0;
    int offsets = 0;

    explicit NetIndex(const NetConfig& c) : offsets(offset_count(c.arch)) {
        std::size_t i = 0;
        embed_w = i++;
        embed_b = i++;
        for (int l = 0; l < c.layers; ++l) {
            layer_w.push_back(i);
            i += static_cast<std::size_t>(offsets);
            layer_b.push_back(i++);
        }
        policy_w = i++;
        policy_b = i++;
        value_w1 = i++;
        value_b1 = i++;
        value_w2 = i++;
        value_b2 = i++;
    }
};

} // namespace detail

inline NetParams init_net(const NetConfig& config) {
    NetParams net{config, {}, {}};
    Rng rng(derive_seed(config.seed, 0x6e6574));
    const int h = config.hidden;
    const int k = offset_count(config.arch);
    auto& p = net.params;
    p.add("embed.w", init_uniform(kCategories, h, 1.0, 1.0, rng));
    p.add("embed.b", Matrix::Zero(1, h));
    for (int l = 0; l < config.layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        for (int o = 0; o < k; ++o) {
            p.add(prefix + ".w" + std::to_string(o), init_uniform(h, h, static_cast<double>(k * h), 1.0, rng));
        }
        p.add(prefix + ".b", Matrix::Zero(1, h));
    }
    p.add("policy.w", init_uniform(h, 4, h, config.policy_init_scale, rng));
    p.add("policy.b", Matrix::Zero(1, 4));
    p.add("value.w1", init_uniform(h, config.value_hidden, h, 1.0, rng));
    p.add("value.b1", Matrix::Zero(1, config.value_hidden));
    p.add("value.w2", init_uniform(config.value_hidden, 1, config.value_hidden, config.value_init_scale, rng));
    p.add("value.b2", Matrix::Zero(1, 1));
    net.adam = AdamState::for_params(p);
    return net;
}

// ---------------------------------------------------------------------------
// Graph view of an encoding

/// Node table with `offsets` neighbour slots per node (-1 = none). Slot 0 is
/// the node itself for Gnn; for Cnn slots follow the 3x3 stencil row-major,
/// so slot 4 is the centre.
struct Graph {
    int nodes = 0;
    int offsets = 0;
    std::vector<CellCategory> features;
    std::vector<int> neighbors;  ///< [slot * nodes + node]

    [[nodiscard]] int neighbor(int slot, int node) const { return neighbors[static_cast<std::size_t>(slot * nodes + node)]; }
};

struct GraphAction {
    int node = 0;
    Dir dir = Dir::Up;
};

inline Graph build_graph(const StateEncoding& enc, Arch arch) {
    Graph g;
    g.nodes = enc.size();
    g.offsets = offset_count(arch);
    g.features = enc.cells;
    g.neighbors.assign(static_cast<std::size_t>(g.offsets * g.nodes), -1);
    auto at = [&](int r, int c) { return (r < 0 || c < 0 || r >= enc.height || c >= enc.width) ? -1 : r * enc.width + c; };
    for (int r = 0; r < enc.height; ++r) {
        for (int c = 0; c < enc.width; ++c) {
            const int node = r * enc.width + c;
            if (arch == Arch::Gnn) {
                g.neighbors[static_cast<std::size_t>(node)] = node;
                for (Dir d : kDirs) {
                    const int slot = 1 + static_cast<int>(d);
                    g.neighbors[static_cast<std::size_t>(slot * g.nodes + node)] = at(r + row_delta(d), c + col_delta(d));
                }
            } else {
                int slot = 0;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc, ++slot)
                        g.neighbors[static_cast<std::size_t>(slot * g.nodes + node)] = at(r + dr, c + dc);
            }
        }
    }
    return g;
}

inline std::vector<GraphAction> to_graph_actions(const StateEncoding& enc, std::span<const PushAction> legal) {
    std::vector<GraphAction> out;
    out.reserve(legal.size());
    for (const auto& a : legal) {
        if (a.box.row < 0 || a.box.row >= enc.height || a.box.col < 0 || a.box.col >= enc.width) {
            throw Error(ErrorCode::ShapeMismatch, "action outside the encoded board");
        }
        out.push_back({a.box.row * enc.width + a.box.col, a.dir});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forward / backward

struct PolicyValue {
    std::vector<double> p;  ///< one entry per legal action, in input order
    double v = 0.0;
};

namespace detail {

inline Matrix gather(const Matrix& x, const Graph& g, int slot) {
    Matrix out = Matrix::Zero(g.nodes, x.cols());
    for (int i = 0; i < g.nodes; ++i) {
        const int j = g.neighbor(slot, i);
        if (j >= 0) out.row(i) = x.row(j);
    }
    return out;
}

inline void scatter_add(Matrix& dx, const Matrix& dg, const Graph& g, int slot) {
    for (int i = 0; i < g.nodes; ++i) {
        const int j = g.neighbor(slot, i);
        if (j >= 0) dx.row(j) += dg.row(i);
    }
}

/// z_i = b + sum_k x_{nbr(k,i)} W_k, computed as one product x [W_0 .. W_K-1]
/// followed by a row gather.
inline Matrix stencil(const Matrix& x, const Graph& g, const ParamSet& p, std::size_t w0, std::size_t b) {
    const Eigen::Index h_in = x.cols();
    const Eigen::Index h_out = p[b].cols();
    Matrix wcat(h_in, h_out * g.offsets);
    for (int k = 0; k < g.offsets; ++k) wcat.middleCols(k * h_out, h_out) = p[w0 + static_cast<std::size_t>(k)];
    const Matrix xw = x * wcat;
    Matrix z = p[b].replicate(g.nodes, 1);
    for (int k = 0; k < g.offsets; ++k) {
        for (int i = 0; i < g.nodes; ++i) {
            const int j = g.neighbor(k, i);
            if (j >= 0) z.row(i) += xw.block(j, k * h_out, 1, h_out);
        }
    }
    return z;
}

inline void stencil_backward(const Matrix& x, const Matrix& dz, const Graph& g, const ParamSet& p, std::size_t w0,
                             std::size_t b, Gradients& grads, Matrix& dx) {
    grads[b] += dz.colwise().sum();
    for (int k = 0; k < g.offsets; ++k) {
        const std::size_t w = w0 + static_cast<std::size_t>(k);
        grads[w].noalias() += gather(x, g, k).transpose() * dz;
        scatter_add(dx, dz * p[w].transpose(), g, k);
    }
}

inline Matrix relu(const Matrix& m) { return m.cwiseMax(0.0); }
inline Matrix relu_mask(const Matrix& pre, const Matrix& d) {
    return (pre.array() > 0.0).select(d, Matrix::Zero(d.rows(), d.cols()));
}

struct ForwardCache {
    Matrix x0;                  ///< one-hot input
    std::vector<Matrix> h;      ///< trunk states; h[0] after embedding
    std::vector<Matrix> pre;    ///< per layer pre-activation (Gnn: z; Cnn pair: inner conv, then residual sum)
    Matrix logits;              ///< nodes x 4
    RowVector pooled;
    RowVector hidden_pre;
    double value_pre = 0.0;
    double v = 0.0;
};

inline ForwardCache forward_cache(const NetParams& net, const Graph& g) {
    const detail::NetIndex ix(net.config);
    const auto& p = net.params;
    if (g.offsets != ix.offsets) {
        throw Error(ErrorCode::ShapeMismatch, "graph offsets do not match the architecture");
    }
    if (g.nodes == 0) throw Error(ErrorCode::ShapeMismatch, "empty graph");
    ForwardCache c;
    c.x0 = Matrix::Zero(g.nodes, kCategories);
    for (int i = 0; i < g.nodes; ++i) c.x0(i, static_cast<int>(g.features[static_cast<std::size_t>(i)])) = 1.0;
    c.h.push_back(c.x0 * p[ix.embed_w] + p[ix.embed_b].replicate(g.nodes, 1));
    const int layers = net.config.layers;
    if (net.config.arch == Arch::Gnn) {
        for (int l = 0; l < layers; ++l) {
            c.pre.push_back(stencil(c.h.back(), g, p, ix.layer_w[l], ix.layer_b[l]));
            c.h.push_back(c.h.back() + relu(c.pre.back()));
        }
    } else {
        for (int l = 0; l < layers;) {
            if (l + 1 < layers) {
                Matrix inner = stencil(c.h.back(), g, p, ix.layer_w[l], ix.layer_b[l]);
                Matrix outer = stencil(relu(inner), g, p, ix.layer_w[l + 1], ix.layer_b[l + 1]);
                c.pre.push_back(std::move(inner));
                c.pre.push_back(c.h.back() + outer);
                c.h.push_back(relu(c.pre.back()));
                l += 2;
            } else {
                c.pre.push_back(c.h.back() + stencil(c.h.back(), g, p, ix.layer_w[l], ix.layer_b[l]));
                c.h.push_back(relu(c.pre.back()));
                l += 1;
            }
        }
    }
    const Matrix& top = c.h.back();
    c.logits = top * p[ix.policy_w] + p[ix.policy_b].replicate(g.nodes, 1);
    c.pooled = top.colwise().mean();
    c.hidden_pre = c.pooled * p[ix.value_w1] + p[ix.value_b1];
    c.value_pre = (c.hidden_pre.cwiseMax(0.0) * p[ix.value_w2])(0, 0) + p[ix.value_b2](0, 0);
    c.v = softplus(c.value_pre);
    return c;
}

/// Accumulates parameter gradients given dL/dlogits and dL/dv.
inline void backward(const NetParams& net, const Graph& g, const ForwardCache& c, const Matrix& dlogits, double dv,
                     Gradients& grads) {
    const detail::NetIndex ix(net.config);
    const auto& p = net.params;
    const Matrix& top = c.h.back();

    // value head
    const double dz = dv * sigmoid(c.value_pre);
    const RowVector hidden = c.hidden_pre.cwiseMax(0.0);
    grads[ix.value_w2] += hidden.transpose() * dz;
    grads[ix.value_b2](0, 0) += dz;
    RowVector dhidden = (p[ix.value_w2].transpose() * dz);
    dhidden = (c.hidden_pre.array() > 0.0).select(dhidden, RowVector::Zero(dhidden.cols()));
    grads[ix.value_w1] += c.pooled.transpose() * dhidden;
    grads[ix.value_b1] += dhidden;
    const RowVector dpooled = dhidden * p[ix.value_w1].transpose();

    // policy head
    grads[ix.policy_w].noalias() += top.transpose() * dlogits;
    grads[ix.policy_b] += dlogits.colwise().sum();
    Matrix dh = dlogits * p[ix.policy_w].transpose();
    dh.rowwise() += dpooled / static_cast<double>(g.nodes);

    // trunk
    const int layers = net.config.layers;
    if (net.config.arch == Arch::Gnn) {
        for (int l = layers - 1; l >= 0; --l) {
            const Matrix& x = c.h[static_cast<std::size_t>(l)];
            const Matrix dzl = relu_mask(c.pre[static_cast<std::size_t>(l)], dh);
            Matrix dx = dh;
            stencil_backward(x, dzl, g, p, ix.layer_w[l], ix.layer_b[l], grads, dx);
            dh = std::move(dx);
        }
    } else {
        // Rebuild the block layout used in forward_cache.
        struct Block { int first; bool pair; std::size_t pre; std::size_t h; };
        std::vector<Block> blocks;
        std::size_t pre_i = 0, h_i = 0;
        for (int l = 0; l < layers;) {
            const bool pair = l + 1 < layers;
            blocks.push_back({l, pair, pre_i, h_i});
            pre_i += pair ? 2 : 1;
            ++h_i;
            l += pair ? 2 : 1;
        }
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
            const Matrix& x = c.h[it->h];
            if (it->pair) {
                const Matrix& inner = c.pre[it->pre];
                const Matrix& sum = c.pre[it->pre + 1];
                const Matrix dsum = relu_mask(sum, dh);
                Matrix dx = dsum;  // residual path
                Matrix dinner_act = Matrix::Zero(inner.rows(), inner.cols());
                stencil_backward(relu(inner), dsum, g, p, ix.layer_w[it->first + 1], ix.layer_b[it->first + 1], grads,
                                 dinner_act);
                const Matrix dinner = relu_mask(inner, dinner_act);
                stencil_backward(x, dinner, g, p, ix.layer_w[it->first], ix.layer_b[it->first], grads, dx);
                dh = std::move(dx);
            } else {
                const Matrix dsum = relu_mask(c.pre[it->pre], dh);
                Matrix dx = dsum;
                stencil_backward(x, dsum, g, p, ix.layer_w[it->first], ix.layer_b[it->first], grads, dx);
                dh = std::move(dx);
            }
        }
    }
    grads[ix.embed_w].noalias() += c.x0.transpose() * dh;
    grads[ix.embed_b] += dh.colwise().sum();
}

inline std::vector<double> masked_softmax(const Matrix& logits, std::span<const GraphAction> legal) {
    std::vector<double> p(legal.size());
    if (legal.empty()) return p;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < legal.size(); ++i) {
        p[i] = logits(legal[i].node, static_cast<int>(legal[i].dir));
        mx = std::max(mx, p[i]);
    }
    double total = 0.0;
    for (double& x : p) {
        x = std::exp(x - mx);
        total += x;
    }
    for (double& x : p) x /= total;
    return p;
}

} // namespace detail

/// Forward pass on an explicit node table; `legal` addresses (node, dir).
inline PolicyValue forward_graph(const NetParams& net, const Graph& g, std::span<const GraphAction> legal) {
    const auto c = detail::forward_cache(net, g);
    for (const auto& a : legal) {
        if (a.node < 0 || a.node >= g.nodes) throw Error(ErrorCode::ShapeMismatch, "action node out of range");
    }
    return {detail::masked_softmax(c.logits, legal), c.v};
}

inline PolicyValue forward(const NetParams& net, const StateEncoding& enc, std::span<const PushAction> legal) {
    const auto actions = to_graph_actions(enc, legal);
    return forward_graph(net, build_graph(enc, net.config.arch), actions);
}

// ---------------------------------------------------------------------------
// Training

struct TrainSample {
    StateEncoding encoding;
    std::vector<PushAction> legal;
    std::vector<double> policy;  ///< normalized visit counts, aligned with `legal`
    double value = 0.0;          ///< remaining pushes
    std::size_t task_id = 0;
    std::size_t iteration = 0;
};

struct LossResult {
    double loss = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    Gradients grads;
};

/// Mean cross-entropy against the visit distribution plus
/// lambda * mean(((v_label - v) / sigma)^2). Cnn batches are padded with
/// wall cells to the largest board in the batch.
inline LossResult loss(const NetParams& net, std::span<const TrainSample* const> batch) {
    if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "loss on an empty batch");
    LossResult out;
    out.grads = net.params.zeros_like();
    int max_h = 0, max_w = 0;
    for (const auto* s : batch) {
        max_h = std::max(max_h, s->encoding.height);
        max_w = std::max(max_w, s->encoding.width);
    }
    const double n = static_cast<double>(batch.size());
    const double sigma = net.config.value_scale;
    const double lambda = net.config.value_weight;
    for (const auto* s : batch) {
        if (s->policy.size() != s->legal.size()) throw Error(ErrorCode::ShapeMismatch, "policy label / legal size");
        const StateEncoding enc =
            net.config.arch == Arch::Cnn ? pad_encoding(s->encoding, max_h, max_w) : s->encoding;
        const Graph g = build_graph(enc, net.config.arch);
        const auto actions = to_graph_actions(enc, s->legal);
        const auto cache = detail::forward_cache(net, g);
        const auto p = detail::masked_softmax(cache.logits, actions);
        Matrix dlogits = Matrix::Zero(g.nodes, 4);
        double ce = 0.0;
        for (std::size_t i = 0; i < actions.size(); ++i) {
            if (s->policy[i] > 0.0) ce -= s->policy[i] * std::log(std::max(p[i], 1e-300));
            dlogits(actions[i].node, static_cast<int>(actions[i].dir)) += (p[i] - s->policy[i]) / n;
        }
        const double diff = (cache.v - s->value) / sigma;
        out.policy_loss += ce / n;
        out.value_loss += lambda * diff * diff / n;
        const double dv = 2.0 * lambda * diff / sigma / n;
        detail::backward(net, g, cache, dlogits, dv, out.grads);
    }
    out.loss = out.policy_loss + out.value_loss;
    for (const auto& gr : out.grads) {
        if (!gr.allFinite()) throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient in loss");
    }
    return out;
}

inline LossResult loss(const NetParams& net, std::span<const TrainSample> batch) {
    std::vector<const TrainSample*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& s : batch) ptrs.push_back(&s);
    return loss(net, std::span<const TrainSample* const>(ptrs));
}

/// Adam update carried in NetParams.
inline void sgd_step(NetParams& net, const Gradients& grads, double lr) { adam_step(net.params, net.adam, grads, lr); }

// ---------------------------------------------------------------------------
// Snapshot container: magic, version, then tagged sections.

inline constexpr std::string_view kCheckpointMagic = "SOKOCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void write_net_section(ByteWriter& w, const NetParams& net) {
    w.str("evaluator");
    w.str(to_string(net.config.arch));
    w.str(net.config.to_json().dump());
    write_params(w, net.params, net.adam);
}

inline NetParams read_net_section(ByteReader& r) {
    const std::string tag = r.str();
    NetParams net;
    net.config = NetConfig::from_json(nlohmann::json::parse(r.str()));
    read_params(r, net.params, net.adam);
    if (tag != to_string(net.config.arch)) throw Error(ErrorCode::BadCheckpoint, "architecture tag mismatch");
    const NetParams shape = init_net(net.config);
    if (shape.params.size() != net.params.size()) throw Error(ErrorCode::BadCheckpoint, "tensor count mismatch");
    for (std::size_t i = 0; i < shape.params.size(); ++i) {
        if (shape.params.name(i) != net.params.name(i) || shape.params[i].rows() != net.params[i].rows() ||
            shape.params[i].cols() != net.params[i].cols()) {
            throw Error(ErrorCode::BadCheckpoint, "tensor layout mismatch at " + net.params.name(i));
        }
    }
    return net;
}

inline void write_header(ByteWriter& w, std::uint32_t sections) {
    w.raw(kCheckpointMagic.data(), kCheckpointMagic.size());
    w.u32(kCheckpointVersion);
    w.u32(sections);
}

inline std::uint32_t read_header(ByteReader& r) {
    if (r.bytes(kCheckpointMagic.size()) != kCheckpointMagic) throw Error(ErrorCode::BadCheckpoint, "bad magic");
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw Error(ErrorCode::BadCheckpoint, "unsupported checkpoint version " + std::to_string(version));
    }
    return r.u32();
}

} // namespace detail

inline std::string snapshot(const NetParams& net) {
    ByteWriter w;
    detail::write_header(w, 1);
    detail::write_net_section(w, net);
    return w.bytes();
}

/// Reads a snapshot; when `expect` is set the stored architecture must match.
inline NetParams load_net(std::string_view blob, std::optional<Arch> expect = std::nullopt) {
    ByteReader r(blob);
    const auto sections = detail::read_header(r);
    if (sections < 1) throw Error(ErrorCode::BadCheckpoint, "no sections");
    if (r.str() != "evaluator") throw Error(ErrorCode::BadCheckpoint, "first section is not an evaluator");
    NetParams net = detail::read_net_section(r);
    if (expect && *expect != net.config.arch) {
        throw Error(ErrorCode::ArchMismatch,
                    "checkpoint holds a " + to_string(net.config.arch) + " network, expected " + to_string(*expect));
    }
    return net;
}

} // namespace sokocurr
