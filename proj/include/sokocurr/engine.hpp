#pragma once

// Sokoban rules at push granularity: board model, XSB text format, player
// reachability, push legality, static deadlock marking and a breadth-first
// minimum-push solver used as a reference oracle.

#include <sokocurr/error.hpp>

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sokocurr {

struct Cell {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Dir : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::array<Dir, 4> kDirs{Dir::Up, Dir::Down, Dir::Left, Dir::Right};

constexpr int row_delta(Dir d) { return d == Dir::Up ? -1 : d == Dir::Down ? 1 : 0; }
constexpr int col_delta(Dir d) { return d == Dir::Left ? -1 : d == Dir::Right ? 1 : 0; }

constexpr char dir_letter(Dir d) {
    constexpr std::array<char, 4> letters{'u', 'd', 'l', 'r'};
    return letters[static_cast<std::size_t>(d)];
}

constexpr Cell step(Cell c, Dir d) { return {c.row + row_delta(d), c.col + col_delta(d)}; }

struct PushAction {
    Cell box;
    Dir dir = Dir::Up;

    friend constexpr bool operator==(const PushAction&, const PushAction&) = default;
};

/// Static part of an instance: walls, goals and the cells on which a box can
/// never again reach a goal (corners and goal-free wall lines).
class Layout {
public:
    Layout(int width, int height, std::vector<std::uint8_t> walls, std::vector<std::uint8_t> goals)
        : width_(width), height_(height), walls_(std::move(walls)), goals_(std::move(goals)) {
        for (int i = 0; i < width_ * height_; ++i) {
            if (goals_[i]) {
                goal_cells_.push_back(i);
            }
        }
        mark_dead_cells();
    }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int size() const noexcept { return width_ * height_; }
    [[nodiscard]] bool wall(int idx) const noexcept { return walls_[idx] != 0; }
    [[nodiscard]] bool goal(int idx) const noexcept { return goals_[idx] != 0; }
    [[nodiscard]] bool dead(int idx) const noexcept { return dead_[idx] != 0; }
    [[nodiscard]] const std::vector<int>& goal_cells() const noexcept { return goal_cells_; }
    [[nodiscard]] const std::vector<std::uint8_t>& walls() const noexcept { return walls_; }
    [[nodiscard]] const std::vector<std::uint8_t>& goals() const noexcept { return goals_; }

    /// Neighbour index, or -1 when it leaves the grid.
    [[nodiscard]] int neighbor(int idx, Dir d) const noexcept {
        const int r = idx / width_ + row_delta(d);
        const int c = idx % width_ + col_delta(d);
        if (r < 0 || r >= height_ || c < 0 || c >= width_) {
            return -1;
        }
        return r * width_ + c;
    }

    /// Off-grid counts as wall.
    [[nodiscard]] bool blocked(int idx) const noexcept { return idx < 0 || walls_[idx] != 0; }

    friend bool operator==(const Layout& a, const Layout& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.walls_ == b.walls_ && a.goals_ == b.goals_;
    }

private:
    void mark_dead_cells() {
        dead_.assign(static_cast<std::size_t>(size()), 0);
        auto floor = [&](int idx) { return idx >= 0 && !walls_[idx]; };
        for (int i = 0; i < size(); ++i) {
            if (!floor(i) || goals_[i]) {
                continue;
            }
            const bool vertical = blocked(neighbor(i, Dir::Up)) || blocked(neighbor(i, Dir::Down));
            const bool horizontal = blocked(neighbor(i, Dir::Left)) || blocked(neighbor(i, Dir::Right));
            if (vertical && horizontal) {
                dead_[i] = 1;
            }
        }
        // A box against a wall can only slide along it. A goal-free stretch of
        // wall-side cells running between two corners is dead.
        const std::vector<std::uint8_t> corner = dead_;
        for (int i = 0; i < size(); ++i) {
            if (!corner[i]) continue;
            for (Dir along : kDirs) {
                const bool vertical = along == Dir::Up || along == Dir::Down;
                for (Dir side : vertical ? std::array{Dir::Left, Dir::Right} : std::array{Dir::Up, Dir::Down}) {
                    if (!blocked(neighbor(i, side))) continue;
                    std::vector<int> segment;
                    for (int cur = neighbor(i, along); floor(cur) && !goals_[cur] && blocked(neighbor(cur, side));
                         cur = neighbor(cur, along)) {
                        if (corner[cur]) {
                            for (int s : segment) dead_[s] = 1;
                            break;
                        }
                        segment.push_back(cur);
                    }
                }
            }
        }
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> walls_;
    std::vector<std::uint8_t> goals_;
    std::vector<std::uint8_t> dead_;
    std::vector<int> goal_cells_;
};

/// Planning state. Layout is shared and immutable; boxes are kept as sorted
/// cell indices.
class Board {
public:
    Board() = default;

    /// Builds a board and checks the structural invariants. Box/goal count
    /// equality is enforced separately by `require_balanced`.
    static Board create(int width, int height, const std::vector<Cell>& walls, const std::vector<Cell>& goals,
                        const std::vector<Cell>& boxes, Cell player) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorCode::SizeMismatch, "board dimensions must be positive");
        }
        auto index = [&](Cell c) {
            if (c.row < 0 || c.row >= height || c.col < 0 || c.col >= width) {
                throw Error(ErrorCode::SizeMismatch, "cell outside the board");
            }
            return c.row * width + c.col;
        };
        std::vector<std::uint8_t> wall_map(static_cast<std::size_t>(width * height), 0);
        std::vector<std::uint8_t> goal_map(wall_map.size(), 0);
        for (Cell c : walls) wall_map[index(c)] = 1;
        for (Cell c : goals) goal_map[index(c)] = 1;
        std::vector<int> box_idx;
        for (Cell c : boxes) box_idx.push_back(index(c));
        std::sort(box_idx.begin(), box_idx.end());
        if (std::adjacent_find(box_idx.begin(), box_idx.end()) != box_idx.end()) {
            throw Error(ErrorCode::SizeMismatch, "duplicate box cell");
        }
        const int p = index(player);
        for (int b : box_idx) {
            if (wall_map[b]) throw Error(ErrorCode::SizeMismatch, "box on wall");
            if (b == p) throw Error(ErrorCode::SizeMismatch, "player on box");
        }
        if (wall_map[p]) {
            throw Error(ErrorCode::SizeMismatch, "player on wall");
        }
        return Board(std::make_shared<const Layout>(width, height, std::move(wall_map), std::move(goal_map)),
                     std::move(box_idx), p);
    }

    Board(std::shared_ptr<const Layout> layout, std::vector<int> sorted_boxes, int player)
        : layout_(std::move(layout)), boxes_(std::move(sorted_boxes)), player_(player) {}

    [[nodiscard]] int width() const noexcept { return layout_->width(); }
    [[nodiscard]] int height() const noexcept { return layout_->height(); }
    [[nodiscard]] const Layout& layout() const noexcept { return *layout_; }
    [[nodiscard]] const std::shared_ptr<const Layout>& layout_ptr() const noexcept { return layout_; }

    [[nodiscard]] int index(Cell c) const noexcept { return c.row * width() + c.col; }
    [[nodiscard]] Cell cell(int idx) const noexcept { return {idx / width(), idx % width()}; }
    [[nodiscard]] bool in_bounds(Cell c) const noexcept {
        return c.row >= 0 && c.row < height() && c.col >= 0 && c.col < width();
    }

    [[nodiscard]] bool is_wall(Cell c) const noexcept { return !in_bounds(c) || layout_->wall(index(c)); }
    [[nodiscard]] bool is_goal_cell(Cell c) const noexcept { return in_bounds(c) && layout_->goal(index(c)); }
    [[nodiscard]] bool has_box(Cell c) const noexcept { return in_bounds(c) && has_box_at(index(c)); }
    [[nodiscard]] bool has_box_at(int idx) const noexcept {
        return std::binary_search(boxes_.begin(), boxes_.end(), idx);
    }

    [[nodiscard]] Cell player() const noexcept { return cell(player_); }
    [[nodiscard]] int player_index() const noexcept { return player_; }
    [[nodiscard]] const std::vector<int>& box_indices() const noexcept { return boxes_; }
    [[nodiscard]] std::size_t box_count() const noexcept { return boxes_.size(); }
    [[nodiscard]] std::size_t goal_count() const noexcept { return layout_->goal_cells().size(); }

    [[nodiscard]] std::vector<Cell> boxes() const { return to_cells(boxes_); }
    [[nodiscard]] std::vector<Cell> goals() const { return to_cells(layout_->goal_cells()); }
    [[nodiscard]] std::vector<Cell> walls() const {
        std::vector<Cell> out;
        for (int i = 0; i < layout_->size(); ++i) {
            if (layout_->wall(i)) out.push_back(cell(i));
        }
        return out;
    }

    /// Same layout contents, boxes and player.
    friend bool operator==(const Board& a, const Board& b) {
        return a.player_ == b.player_ && a.boxes_ == b.boxes_ &&
               (a.layout_ == b.layout_ || *a.layout_ == *b.layout_);
    }

private:
    [[nodiscard]] std::vector<Cell> to_cells(const std::vector<int>& idx) const {
        std::vector<Cell> out;
        out.reserve(idx.size());
        for (int i : idx) out.push_back(cell(i));
        return out;
    }

    std::shared_ptr<const Layout> layout_;
    std::vector<int> boxes_;
    int player_ = 0;
};

inline void require_balanced(const Board& board) {
    if (board.box_count() != board.goal_count()) {
        throw Error(ErrorCode::BoxGoalCountMismatch, std::to_string(board.box_count()) + " boxes vs " +
                                                         std::to_string(board.goal_count()) + " goals");
    }
}

// ---------------------------------------------------------------------------
// XSB text format

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) {
        lines.push_back(std::move(cur));
    }
    return lines;
}

inline std::string rtrim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '-')) {
        s.pop_back();
    }
    return s;
}

inline bool is_level_char(char ch) {
    return ch == '#' || ch == '@' || ch == '+' || ch == '$' || ch == '*' || ch == '.' || ch == ' ' || ch == '-';
}

} // namespace detail

/// Parses one level. Trailing whitespace and leading/trailing blank lines are
/// ignored; '-' is floor; short rows are padded with floor.
inline Board parse_xsb(std::string_view text) {
    std::vector<std::string> lines;
    for (auto& line : detail::split_lines(text)) {
        lines.push_back(detail::rtrim(std::move(line)));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::size_t first = 0;
    while (first < lines.size() && lines[first].empty()) ++first;
    lines.erase(lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(first));
    if (lines.empty()) {
        throw Error(ErrorCode::NoPlayer, "empty level text");
    }

    std::size_t width = 0;
    for (const auto& l : lines) width = std::max(width, l.size());
    const int w = static_cast<int>(width);
    const int h = static_cast<int>(lines.size());

    std::vector<Cell> walls, goals, boxes;
    std::optional<Cell> player;
    int players = 0;
    for (int r = 0; r < h; ++r) {
        const auto& line = lines[static_cast<std::size_t>(r)];
        for (int c = 0; c < static_cast<int>(line.size()); ++c) {
            const char ch = line[static_cast<std::size_t>(c)];
            const Cell cell{r, c};
            switch (ch) {
            case '#': walls.push_back(cell); break;
            case '@': player = cell; ++players; break;
            case '+': player = cell; ++players; goals.push_back(cell); break;
            case '$': boxes.push_back(cell); break;
            case '*': boxes.push_back(cell); goals.push_back(cell); break;
            case '.': goals.push_back(cell); break;
            case ' ':
            case '-': break;
            default:
                throw Error(ErrorCode::UnknownChar, "'" + std::string(1, ch) + "' at row " + std::to_string(r) +
                                                        ", col " + std::to_string(c));
            }
        }
    }
    if (players == 0) throw Error(ErrorCode::NoPlayer, "level has no player");
    if (players > 1) throw Error(ErrorCode::MultiplePlayers, std::to_string(players) + " players");
    if (boxes.size() != goals.size()) {
        throw Error(ErrorCode::BoxGoalCountMismatch,
                    std::to_string(boxes.size()) + " boxes vs " + std::to_string(goals.size()) + " goals");
    }
    return Board::create(w, h, walls, goals, boxes, *player);
}

/// One line per row, trailing floor trimmed, each row terminated by '\n'.
inline std::string render_xsb(const Board& board) {
    std::string out;
    for (int r = 0; r < board.height(); ++r) {
        std::string row;
        for (int c = 0; c < board.width(); ++c) {
            const Cell cell{r, c};
            const bool goal = board.is_goal_cell(cell);
            char ch = ' ';
            if (board.is_wall(cell)) {
                ch = '#';
            } else if (board.has_box(cell)) {
                ch = goal ? '*' : '$';
            } else if (board.player() == cell) {
                ch = goal ? '+' : '@';
            } else if (goal) {
                ch = '.';
            }
            row.push_back(ch);
        }
        out += detail::rtrim(std::move(row));
        out.push_back('\n');
    }
    return out;
}

/// Splits a level collection into per-level texts. Level rows are lines made
/// only of level characters containing at least one wall; anything else
/// (blank lines, ';' comments, titles) separates levels.
inline std::vector<std::string> split_collection(std::string_view text) {
    std::vector<std::string> levels;
    std::string cur;
    for (const auto& raw : detail::split_lines(text)) {
        const std::string line = detail::rtrim(raw);
        const bool level_row = !line.empty() && line.find('#') != std::string::npos &&
                               std::all_of(line.begin(), line.end(), detail::is_level_char);
        if (level_row) {
            cur += line;
            cur.push_back('\n');
        } else if (!cur.empty()) {
            levels.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) levels.push_back(std::move(cur));
    return levels;
}

inline std::vector<Board> parse_collection(std::string_view text) {
    std::vector<Board> out;
    for (const auto& level : split_collection(text)) {
        out.push_back(parse_xsb(level));
    }
    return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CorpusEntry {
    std::filesystem::path path;
    std::size_t index_in_file = 0;
    std::string text;
    Board board;
};

/// Loads every level of a file, or of every regular file under a directory
/// (sorted by path). Parse errors are rethrown with the offending path.
inline std::vector<CorpusEntry> load_corpus(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(root)) {
        for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(root);
    }
    std::vector<CorpusEntry> out;
    for (const auto& f : files) {
        const auto levels = split_collection(read_text_file(f));
        for (std::size_t i = 0; i < levels.size(); ++i) {
            try {
                out.push_back({f, i, levels[i], parse_xsb(levels[i])});
            } catch (const Error& e) {
                throw Error(e.code(), f.string() + " level " + std::to_string(i) + ": " + e.what());
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rules

/// Cells the player can walk to without pushing, as a per-cell mask.
inline std::vector<std::uint8_t> reachable_mask(const Board& board) {
    const Layout& lay = board.layout();
    std::vector<std::uint8_t> blocked(static_cast<std::size_t>(lay.size()), 0);
    for (int b : board.box_indices()) blocked[b] = 1;
    std::vector<std::uint8_t> seen(blocked.size(), 0);
    std::vector<int> stack{board.player_index()};
    seen[board.player_index()] = 1;
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        for (Dir d : kDirs) {
            const int n = lay.neighbor(cur, d);
            if (n < 0 || seen[n] || lay.wall(n) || blocked[n]) continue;
            seen[n] = 1;
            stack.push_back(n);
        }
    }
    return seen;
}

/// Flood fill from the player; row-major order, includes the player cell.
inline std::vector<Cell> player_reachable(const Board& board) {
    const auto mask = reachable_mask(board);
    std::vector<Cell> out;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
        if (mask[i]) out.push_back(board.cell(i));
    }
    return out;
}

namespace detail {

inline void append_pushes(const Board& board, const std::vector<std::uint8_t>& reach, std::vector<PushAction>& out) {
    const Layout& lay = board.layout();
    for (int b : board.box_indices()) {
        for (Dir d : kDirs) {
            const int target = lay.neighbor(b, d);
            const int behind = lay.neighbor(b, static_cast<Dir>(static_cast<int>(d) ^ 1));
            if (target < 0 || behind < 0) continue;
            if (lay.wall(target) || board.has_box_at(target)) continue;
            if (!reach[behind]) continue;
            out.push_back({board.cell(b), d});
        }
    }
}

/// Moves the box without checking legality.
inline Board push_unchecked(const Board& board, const PushAction& a) {
    const int from = board.index(a.box);
    const int to = board.index(step(a.box, a.dir));
    std::vector<int> boxes = board.box_indices();
    auto it = std::lower_bound(boxes.begin(), boxes.end(), from);
    boxes.erase(it);
    boxes.insert(std::lower_bound(boxes.begin(), boxes.end(), to), to);
    return Board(board.layout_ptr(), std::move(boxes), from);
}

} // namespace detail

constexpr Dir opposite(Dir d) { return static_cast<Dir>(static_cast<int>(d) ^ 1); }

/// Row-major by box, then U, D, L, R.
inline std::vector<PushAction> legal_pushes(const Board& board) {
    std::vector<PushAction> out;
    detail::append_pushes(board, reachable_mask(board), out);
    return out;
}

inline bool is_legal_push(const Board& board, const PushAction& a) {
    if (!board.in_bounds(a.box) || !board.has_box(a.box)) return false;
    const Cell target = step(a.box, a.dir);
    const Cell behind = step(a.box, opposite(a.dir));
    if (!board.in_bounds(target) || !board.in_bounds(behind)) return false;
    if (board.is_wall(target) || board.has_box(target)) return false;
    return reachable_mask(board)[board.index(behind)] != 0;
}

inline Board apply_push(const Board& board, const PushAction& a) {
    if (!is_legal_push(board, a)) {
        throw Error(ErrorCode::IllegalPush, "box (" + std::to_string(a.box.row) + "," + std::to_string(a.box.col) +
                                                ") dir " + std::string(1, dir_letter(a.dir)));
    }
    return detail::push_unchecked(board, a);
}

inline bool is_goal(const Board& board) {
    const auto& goals = board.layout().goal_cells();
    return goals.size() == board.box_count() &&
           std::equal(goals.begin(), goals.end(), board.box_indices().begin());
}

/// A box rests on a dead cell: no goal can ever be reached.
inline bool has_static_deadlock(const Board& board) {
    const Layout& lay = board.layout();
    return std::any_of(board.box_indices().begin(), board.box_indices().end(),
                       [&](int b) { return lay.dead(b); });
}

/// Player-normalized state identity. Stable across processes.
struct StateKey {
    std::vector<int> boxes;
    int player_region = 0;

    friend bool operator==(const StateKey&, const StateKey&) = default;

    [[nodiscard]] std::uint64_t hash() const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&](std::uint64_t v) {
            for (int i = 0; i < 4; ++i) {
                h ^= (v >> (16 * i)) & 0xffffU;
                h *= 0x100000001b3ULL;
            }
        };
        mix(static_cast<std::uint64_t>(player_region));
        for (int b : boxes) mix(static_cast<std::uint64_t>(b));
        return h;
    }
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const noexcept { return static_cast<std::size_t>(k.hash()); }
};

inline StateKey state_key(const Board& board) {
    const auto mask = reachable_mask(board);
    const auto first = std::find(mask.begin(), mask.end(), std::uint8_t{1});
    return {board.box_indices(), static_cast<int>(first - mask.begin())};
}

// ---------------------------------------------------------------------------
// Plans

/// Shortest player walk between two cells around walls and boxes, as lurd
/// letters (lowercase). Empty optional when unreachable.
inline std::optional<std::string> walk_path(const Board& board, int from, int to) {
    if (from == to) return std::string{};
    const Layout& lay = board.layout();
    std::vector<int> prev(static_cast<std::size_t>(lay.size()), -1);
    std::vector<std::int8_t> via(prev.size(), -1);
    std::deque<int> queue{from};
    prev[from] = from;
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (Dir d : kDirs) {
            const int n = lay.neighbor(cur, d);
            if (n < 0 || prev[n] >= 0 || lay.wall(n) || board.has_box_at(n)) continue;
            prev[n] = cur;
            via[n] = static_cast<std::int8_t>(d);
            if (n == to) {
                std::string path;
                for (int c = to; c != from; c = prev[c]) path.push_back(dir_letter(static_cast<Dir>(via[c])));
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(n);
        }
    }
    return std::nullopt;
}

/// Full move string for a push plan: walks in lowercase, pushes in uppercase.
inline std::string to_lurd(const Board& start, std::span<const PushAction> plan) {
    std::string out;
    Board cur = start;
    for (const auto& a : plan) {
        const Cell behind = step(a.box, opposite(a.dir));
        if (!cur.in_bounds(behind)) throw Error(ErrorCode::IllegalPush, "push from outside the board");
        auto walk = walk_path(cur, cur.player_index(), cur.index(behind));
        if (!walk) throw Error(ErrorCode::IllegalPush, "push position unreachable");
        out += *walk;
        out.push_back(static_cast<char>(dir_letter(a.dir) - 'a' + 'A'));
        cur = apply_push(cur, a);
    }
    return out;
}

/// Executes a lurd move string. Letter case is not trusted: a move into a box
/// is a push, a move into free floor is a walk.
inline Board replay_lurd(const Board& start, std::string_view moves) {
    Board cur = start;
    for (char ch : moves) {
        Dir d;
        switch (ch | 0x20) {
        case 'u': d = Dir::Up; break;
        case 'd': d = Dir::Down; break;
        case 'l': d = Dir::Left; break;
        case 'r': d = Dir::Right; break;
        default:
            if (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t') continue;
            throw Error(ErrorCode::IllegalPush, "bad move letter '" + std::string(1, ch) + "'");
        }
        const Cell next = step(cur.player(), d);
        if (cur.is_wall(next)) throw Error(ErrorCode::IllegalPush, "walk into wall");
        if (cur.has_box(next)) {
            cur = apply_push(cur, {next, d});
        } else {
            cur = Board(cur.layout_ptr(), cur.box_indices(), cur.index(next));
        }
    }
    return cur;
}

inline Board replay_pushes(const Board& start, std::span<const PushAction> plan) {
    Board cur = start;
    for (const auto& a : plan) cur = apply_push(cur, a);
    return cur;
}

// ---------------------------------------------------------------------------
// Reference solver

enum class SolveStatus { Solved, ProvenUnsolvable, BudgetExceeded };

struct SolveResult {
    SolveStatus status = SolveStatus::ProvenUnsolvable;
    std::vector<PushAction> plan;
    std::size_t expanded = 0;

    [[nodiscard]] bool solved() const noexcept { return status == SolveStatus::Solved; }
};

/// Breadth-first search over push states; returns a minimum-push plan.
/// Boxes on static dead cells are pruned. `max_states` bounds expansions.
inline SolveResult bfs_optimal_solve(const Board& board, std::size_t max_states) {
    SolveResult result;
    if (is_goal(board)) {
        result.status = SolveStatus::Solved;
        return result;
    }
    struct Entry {
        Board board;
        std::int64_t parent;
        PushAction action;
    };
    std::vector<Entry> nodes;
    std::unordered_map<StateKey, std::int64_t, StateKeyHash> seen;
    nodes.push_back({board, -1, {}});
    seen.emplace(state_key(board), 0);
    std::size_t head = 0;
    std::vector<PushAction> pushes;
    while (head < nodes.size()) {
        if (result.expanded >= max_states) {
            result.status = SolveStatus::BudgetExceeded;
            return result;
        }
        const std::size_t cur = head++;
        ++result.expanded;
        pushes.clear();
        const Board here = nodes[cur].board;
        detail::append_pushes(here, reachable_mask(here), pushes);
        for (const auto& a : pushes) {
            Board next = detail::push_unchecked(here, a);
            if (has_static_deadlock(next)) continue;
            auto [it, inserted] = seen.emplace(state_key(next), static_cast<std::int64_t>(nodes.size()));
            if (!inserted) continue;
            const bool done = is_goal(next);
            nodes.push_back({std::move(next), static_cast<std::int64_t>(cur), a});
            if (done) {
                for (std::int64_t i = static_cast<std::int64_t>(nodes.size()) - 1; nodes[i].parent >= 0;
                     i = nodes[i].parent) {
                    result.plan.push_back(nodes[i].action);
                }
                std::reverse(result.plan.begin(), result.plan.end());
                result.status = SolveStatus::Solved;
                return result;
            }
        }
    }
    result.status = SolveStatus::ProvenUnsolvable;
    return result;
}

} // namespace sokocurr
