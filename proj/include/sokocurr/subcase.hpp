#pragma once

// Sub-instance generation: keep the parent's walls and player, pick k of its
// boxes (on their starting cells) and k of its goals.

#include <sokocurr/engine.hpp>
#include <sokocurr/error.hpp>
#include <sokocurr/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace sokocurr {

struct SubcaseSpec {
    std::size_t k = 0;
    std::vector<Cell> box_subset;
    std::vector<Cell> goal_subset;
    std::uint64_t seed = 0;
};

struct Subcase {
    SubcaseSpec spec;
    Board board;
    bool is_target = false;
};

inline Board make_subcase(const Board& parent, const SubcaseSpec& spec) {
    const std::size_t n = parent.box_count();
    if (spec.k < 1 || spec.k > n || spec.box_subset.size() != spec.k || spec.goal_subset.size() != spec.k) {
        throw Error(ErrorCode::SizeMismatch, "subcase needs k in [1," + std::to_string(n) + "] and k-sized subsets");
    }
    auto contained = [](const std::vector<Cell>& subset, const std::vector<Cell>& super) {
        std::vector<Cell> s = subset;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
        return std::includes(super.begin(), super.end(), s.begin(), s.end());
    };
    if (!contained(spec.box_subset, parent.boxes()) || !contained(spec.goal_subset, parent.goals())) {
        throw Error(ErrorCode::SubsetNotContained, "subset not drawn from the parent instance");
    }
    return Board::create(parent.width(), parent.height(), parent.walls(), spec.goal_subset, spec.box_subset,
                         parent.player());
}

namespace detail {

inline std::vector<Cell> pick(const std::vector<Cell>& from, std::size_t k, Rng& rng) {
    std::vector<Cell> pool = from;
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace detail

/// Random spec from one seed: k uniform on [1, N] unless fixed, then uniform
/// subsets.
inline SubcaseSpec sample_spec(const Board& parent, std::uint64_t seed, std::size_t fixed_k = 0) {
    Rng rng(seed);
    const std::size_t n = parent.box_count();
    if (n == 0) {
        throw Error(ErrorCode::SizeMismatch, "parent has no boxes");
    }
    SubcaseSpec spec;
    spec.seed = seed;
    spec.k = fixed_k != 0 ? fixed_k : 1 + uniform_index(rng, n);
    if (spec.k > n) {
        throw Error(ErrorCode::SizeMismatch, "k exceeds the parent's box count");
    }
    spec.box_subset = detail::pick(parent.boxes(), spec.k, rng);
    spec.goal_subset = detail::pick(parent.goals(), spec.k, rng);
    return spec;
}

/// `pool_size` random subcases followed by the parent itself as the target.
/// Subcase i is generated from `derive_seed(seed, i)`.
inline std::vector<Subcase> sample_pool(const Board& parent, std::size_t pool_size, std::uint64_t seed) {
    if (pool_size == 0) {
        throw Error(ErrorCode::SizeMismatch, "pool_size must be at least 1");
    }
    require_balanced(parent);
    std::vector<Subcase> out;
    out.reserve(pool_size + 1);
    for (std::size_t i = 0; i < pool_size; ++i) {
        auto spec = sample_spec(parent, derive_seed(seed, i));
        Board b = make_subcase(parent, spec);
        out.push_back({std::move(spec), std::move(b), false});
    }
    out.push_back({{parent.box_count(), parent.boxes(), parent.goals(), seed}, parent, true});
    return out;
}

/// `per_k` subcases for every k in [k_lo, k_hi], grouped by k.
inline std::vector<Subcase> stratified_pool(const Board& parent, std::size_t per_k, std::size_t k_lo,
                                            std::size_t k_hi, std::uint64_t seed) {
    require_balanced(parent);
    if (k_lo < 1 || k_hi < k_lo || k_hi > parent.box_count()) {
        throw Error(ErrorCode::SizeMismatch, "k range must lie within [1, N]");
    }
    std::vector<Subcase> out;
    std::uint64_t i = 0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        for (std::size_t j = 0; j < per_k; ++j, ++i) {
            auto spec = sample_spec(parent, derive_seed(seed, i), k);
            Board b = make_subcase(parent, spec);
            out.push_back({std::move(spec), std::move(b), false});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pool manifest: one XSB file per task plus a tab-separated index.

struct ManifestRow {
    std::size_t task_id = 0;
    std::size_t parent_id = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    bool is_target = false;
    std::string file;
};

inline std::string task_file_name(std::size_t task_id) {
    std::ostringstream ss;
    ss << "task_" << std::setw(6) << std::setfill('0') << task_id << ".xsb";
    return ss.str();
}

/// Writes tasks under `dir` and returns the index rows. `parent_ids[i]` tags
/// task i with the instance it was derived from.
inline std::vector<ManifestRow> write_pool_manifest(const std::filesystem::path& dir,
                                                    const std::vector<Subcase>& tasks,
                                                    const std::vector<std::size_t>& parent_ids) {
    if (parent_ids.size() != tasks.size()) {
        throw Error(ErrorCode::SizeMismatch, "one parent id per task required");
    }
    std::filesystem::create_directories(dir);
    std::vector<ManifestRow> rows;
    std::ofstream index(dir / "index.tsv");
    if (!index) throw Error(ErrorCode::Io, "cannot write " + (dir / "index.tsv").string());
    index << "task_id\tparent_id\tk\tseed\ttarget\tfile\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        ManifestRow row{i, parent_ids[i], tasks[i].spec.k, tasks[i].spec.seed, tasks[i].is_target, task_file_name(i)};
        std::ofstream f(dir / row.file);
        if (!f) throw Error(ErrorCode::Io, "cannot write " + (dir / row.file).string());
        f << render_xsb(tasks[i].board);
        index << row.task_id << '\t' << row.parent_id << '\t' << row.k << '\t' << row.seed << '\t'
              << (row.is_target ? 1 : 0) << '\t' << row.file << '\n';
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<ManifestRow> read_pool_index(const std::filesystem::path& dir) {
    std::ifstream in(dir / "index.tsv");
    if (!in) throw Error(ErrorCode::Io, "cannot read " + (dir / "index.tsv").string());
    std::string line;
    std::getline(in, line);
    std::vector<ManifestRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        ManifestRow row;
        int target = 0;
        ss >> row.task_id >> row.parent_id >> row.k >> row.seed >> target >> row.file;
        if (!ss) throw Error(ErrorCode::Io, "malformed index line: " + line);
        row.is_target = target != 0;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sokocurr
