#pragma once

// Small dense-network toolkit: named parameter tensors, Adam moments,
// initialization and a binary tensor codec. Forward/backward passes live with
// the models that use them.

#include <sokocurr/error.hpp>
#include <sokocurr/rng.hpp>

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace sokocurr {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

static_assert(std::endian::native == std::endian::little, "checkpoint codec assumes a little-endian host");

struct NamedTensor {
    std::string name;
    Matrix value;
};

/// Ordered tensor table. Order is part of the model definition and fixes the
/// serialization layout.
class ParamSet {
public:
    std::size_t add(std::string name, Matrix value) {
        tensors_.push_back({std::move(name), std::move(value)});
        return tensors_.size() - 1;
    }

    [[nodiscard]] std::size_t size() const noexcept { return tensors_.size(); }
    [[nodiscard]] Matrix& operator[](std::size_t i) { return tensors_[i].value; }
    [[nodiscard]] const Matrix& operator[](std::size_t i) const { return tensors_[i].value; }
    [[nodiscard]] const std::string& name(std::size_t i) const { return tensors_[i].name; }
    [[nodiscard]] std::vector<NamedTensor>& tensors() noexcept { return tensors_; }
    [[nodiscard]] const std::vector<NamedTensor>& tensors() const noexcept { return tensors_; }

    [[nodiscard]] std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < tensors_.size(); ++i) {
            if (tensors_[i].name == name) return i;
        }
        throw Error(ErrorCode::ShapeMismatch, "no tensor named " + std::string(name));
    }

    /// Zero tensors with the same shapes, used as gradient accumulators.
    [[nodiscard]] std::vector<Matrix> zeros_like() const {
        std::vector<Matrix> out;
        out.reserve(tensors_.size());
        for (const auto& t : tensors_) out.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
        return out;
    }

    [[nodiscard]] std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
        return n;
    }

    [[nodiscard]] bool all_finite() const {
        for (const auto& t : tensors_) {
            if (!t.value.allFinite()) return false;
        }
        return true;
    }

    friend bool operator==(const ParamSet& a, const ParamSet& b) {
        if (a.tensors_.size() != b.tensors_.size()) return false;
        for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
            const auto& x = a.tensors_[i];
            const auto& y = b.tensors_[i];
            if (x.name != y.name || x.value.rows() != y.value.rows() || x.value.cols() != y.value.cols()) return false;
            if (std::memcmp(x.value.data(), y.value.data(), sizeof(double) * static_cast<std::size_t>(x.value.size())) != 0)
                return false;
        }
        return true;
    }

private:
    std::vector<NamedTensor> tensors_;
};

using Gradients = std::vector<Matrix>;

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t step = 0;

    static AdamState for_params(const ParamSet& params) {
        return {params.zeros_like(), params.zeros_like(), 0};
    }

    friend bool operator==(const AdamState& a, const AdamState& b) {
        if (a.step != b.step || a.m.size() != b.m.size()) return false;
        for (std::size_t i = 0; i < a.m.size(); ++i) {
            if (a.m[i] != b.m[i] || a.v[i] != b.v[i]) return false;
        }
        return true;
    }
};

/// One Adam step in place. Rejects non-finite gradients before touching state.
inline void adam_step(ParamSet& params, AdamState& state, const Gradients& grads, double lr,
                      const AdamConfig& cfg = {}) {
    if (grads.size() != params.size()) {
        throw Error(ErrorCode::ShapeMismatch, "gradient count does not match parameter count");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols()) {
            throw Error(ErrorCode::ShapeMismatch, "gradient shape mismatch for " + params.name(i));
        }
        if (!grads[i].allFinite()) {
            throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient for " + params.name(i));
        }
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < grads.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i].cwiseProduct(grads[i]);
        if (lr == 0.0) continue;
        params[i].array() -= lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + cfg.epsilon);
    }
}

/// Uniform(-scale/sqrt(fan_in), scale/sqrt(fan_in)).
inline Matrix init_uniform(Eigen::Index rows, Eigen::Index cols, double fan_in, double scale, Rng& rng) {
    Matrix m(rows, cols);
    const double bound = scale / std::sqrt(fan_in);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = (2.0 * uniform_unit(rng) - 1.0) * bound;
    }
    return m;
}

inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------------------
// Binary codec (little-endian, length-prefixed).

class ByteWriter {
public:
    void u32(std::uint32_t x) { raw(&x, sizeof x); }
    void u64(std::uint64_t x) { raw(&x, sizeof x); }
    void f64(double x) { raw(&x, sizeof x); }
    void str(std::string_view s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void matrix(const Matrix& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    }
    void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
    [[nodiscard]] const std::string& bytes() const noexcept { return out_; }

private:
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view in) : in_(in) {}

    std::uint32_t u32() { return pod<std::uint32_t>(); }
    std::uint64_t u64() { return pod<std::uint64_t>(); }
    double f64() { return pod<double>(); }
    std::string str() {
        const auto n = u64();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    Matrix matrix() {
        const auto rows = u64();
        const auto cols = u64();
        if (rows > (1u << 24) || cols > (1u << 24)) throw Error(ErrorCode::BadCheckpoint, "tensor too large");
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        const std::size_t n = sizeof(double) * static_cast<std::size_t>(m.size());
        need(n);
        std::memcpy(m.data(), in_.data() + pos_, n);
        pos_ += n;
        return m;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    [[nodiscard]] bool done() const noexcept { return pos_ == in_.size(); }

private:
    template <class T>
    T pod() {
        need(sizeof(T));
        T x;
        std::memcpy(&x, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return x;
    }
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw Error(ErrorCode::BadCheckpoint, "truncated checkpoint");
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

inline void write_params(ByteWriter& w, const ParamSet& params, const AdamState& adam) {
    w.u64(params.size());
    for (const auto& t : params.tensors()) {
        w.str(t.name);
        w.matrix(t.value);
    }
    w.u64(adam.step);
    for (std::size_t i = 0; i < params.size(); ++i) {
        w.matrix(adam.m[i]);
        w.matrix(adam.v[i]);
    }
}

inline void read_params(ByteReader& r, ParamSet& params, AdamState& adam) {
    const auto n = r.u64();
    params = ParamSet{};
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string name = r.str();
        params.add(std::move(name), r.matrix());
    }
    adam.step = r.u64();
    adam.m.clear();
    adam.v.clear();
    for (std::uint64_t i = 0; i < n; ++i) {
        adam.m.push_back(r.matrix());
        adam.v.push_back(r.matrix());
    }
}

} // namespace sokocurr
