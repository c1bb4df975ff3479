#pragma once

// Facelet-level model of the 3x3x3 cube.
//
// The 54 facelets are stored as six 9-cell blocks in the order
// Up, Left, Front, Right, Back, Down. Each block is row-major as seen on the
// unfolded net below (Up with Back at its top edge, the four side faces with
// Up at their top edge, Down with Front at its top edge):
//
//                  +----------+
//                  |  0  1  2 |
//                  |  3  4  5 |   Up
//                  |  6  7  8 |
//      +-----------+----------+-----------+-----------+
//      |  9 10 11  | 18 19 20 | 27 28 29  | 36 37 38  |
//      | 12 13 14  | 21 22 23 | 30 31 32  | 39 40 41  |
//      | 15 16 17  | 24 25 26 | 33 34 35  | 42 43 44  |
//      +-----------+----------+-----------+-----------+
//         Left        Front      Right       Back
//                  +----------+
//                  | 45 46 47 |
//                  | 48 49 50 |   Down
//                  | 51 52 53 |
//                  +----------+
//
// Colour scheme of the solved cube: Up=white, Down=yellow, Front=green,
// Back=blue, Left=orange, Right=red.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cubetutor/error.hpp"

namespace cubetutor {

inline constexpr int kFacelets = 54;

/// Declaration order is the solver's move order (U, D, F, B, L, R).
enum class Face : std::uint8_t { Up, Down, Front, Back, Left, Right };

inline constexpr std::array<Face, 6> kAllFaces = {Face::Up,   Face::Down, Face::Front,
                                                  Face::Back, Face::Left, Face::Right};

enum class Color : std::uint8_t { White, Yellow, Green, Blue, Orange, Red, Grey };

/// Half turns are first class; the metric decides which moves are generators.
enum class Metric : std::uint8_t { QTM, HTM };

constexpr int block_of(Face f) {
    switch (f) {
        case Face::Up: return 0;
        case Face::Left: return 1;
        case Face::Front: return 2;
        case Face::Right: return 3;
        case Face::Back: return 4;
        case Face::Down: return 5;
    }
    return 0;
}

constexpr Face face_of_block(int block) {
    constexpr std::array<Face, 6> order = {Face::Up,    Face::Left, Face::Front,
                                           Face::Right, Face::Back, Face::Down};
    return order[static_cast<std::size_t>(block)];
}

/// Global facelet index of cell `i` (0..8) on face `f`.
constexpr int facelet_index(Face f, int i) { return 9 * block_of(f) + i; }

constexpr int center_index(Face f) { return facelet_index(f, 4); }

constexpr Face face_of_facelet(int index) { return face_of_block(index / 9); }

constexpr Color scheme_color(Face f) {
    switch (f) {
        case Face::Up: return Color::White;
        case Face::Down: return Color::Yellow;
        case Face::Front: return Color::Green;
        case Face::Back: return Color::Blue;
        case Face::Left: return Color::Orange;
        case Face::Right: return Color::Red;
    }
    return Color::Grey;
}

constexpr char face_letter(Face f) {
    constexpr std::array<char, 6> letters = {'U', 'D', 'F', 'B', 'L', 'R'};
    return letters[static_cast<std::size_t>(f)];
}

inline std::string face_name(Face f) {
    constexpr std::array<const char*, 6> names = {"Up", "Down", "Front", "Back", "Left", "Right"};
    return names[static_cast<std::size_t>(f)];
}

constexpr char color_letter(Color c) {
    constexpr std::array<char, 7> letters = {'W', 'Y', 'G', 'B', 'O', 'R', 'X'};
    return letters[static_cast<std::size_t>(c)];
}

inline std::string color_name(Color c) {
    constexpr std::array<const char*, 7> names = {"white", "yellow", "green", "blue",
                                                  "orange", "red", "grey"};
    return names[static_cast<std::size_t>(c)];
}

inline Color color_from_letter(char ch) {
    switch (ch) {
        case 'W': return Color::White;
        case 'Y': return Color::Yellow;
        case 'G': return Color::Green;
        case 'B': return Color::Blue;
        case 'O': return Color::Orange;
        case 'R': return Color::Red;
        case 'X': return Color::Grey;
        default: throw invalid_argument(std::string("unknown colour letter '") + ch + "'");
    }
}

struct Move {
    Face face = Face::Up;
    std::uint8_t turns = 1;  // 1 clockwise, 2 half turn, 3 counterclockwise

    constexpr Move inverse() const { return Move{face, static_cast<std::uint8_t>((4 - turns) % 4)}; }

    /// Position in the fixed order U1 U2 U3 D1 ... R3.
    constexpr int index() const { return 3 * static_cast<int>(face) + turns - 1; }

    static constexpr Move from_index(int index) {
        return Move{static_cast<Face>(index / 3), static_cast<std::uint8_t>(index % 3 + 1)};
    }

    friend constexpr bool operator==(Move a, Move b) = default;
    friend constexpr auto operator<=>(Move a, Move b) { return a.index() <=> b.index(); }
};

inline std::string to_string(Move m) {
    std::string out(1, face_letter(m.face));
    if (m.turns == 2) out += '2';
    if (m.turns == 3) out += '\'';
    return out;
}

inline Move parse_move(std::string_view token) {
    if (token.empty() || token.size() > 2) throw invalid_argument("bad move token '" + std::string(token) + "'");
    Move m;
    switch (token[0]) {
        case 'U': m.face = Face::Up; break;
        case 'D': m.face = Face::Down; break;
        case 'F': m.face = Face::Front; break;
        case 'B': m.face = Face::Back; break;
        case 'L': m.face = Face::Left; break;
        case 'R': m.face = Face::Right; break;
        default: throw invalid_argument("bad move token '" + std::string(token) + "'");
    }
    m.turns = 1;
    if (token.size() == 2) {
        if (token[1] == '\'') m.turns = 3;
        else if (token[1] == '2') m.turns = 2;
        else throw invalid_argument("bad move token '" + std::string(token) + "'");
    }
    return m;
}

/// All 18 moves in solver order.
inline std::span<const Move> all_moves() {
    static const auto moves = [] {
        std::array<Move, 18> out{};
        for (int i = 0; i < 18; ++i) out[static_cast<std::size_t>(i)] = Move::from_index(i);
        return out;
    }();
    return moves;
}

/// Generator set of a metric, in solver order: 12 quarter turns (QTM) or all 18 (HTM).
inline std::span<const Move> generators(Metric metric) {
    static const auto qtm = [] {
        std::array<Move, 12> out{};
        std::size_t n = 0;
        for (Move m : all_moves())
            if (m.turns != 2) out[n++] = m;
        return out;
    }();
    if (metric == Metric::QTM) return qtm;
    return all_moves();
}

inline std::string to_string(Metric metric) { return metric == Metric::QTM ? "qtm" : "htm"; }

inline Metric parse_metric(std::string_view text) {
    if (text == "qtm" || text == "QTM") return Metric::QTM;
    if (text == "htm" || text == "HTM") return Metric::HTM;
    throw invalid_argument("unknown metric '" + std::string(text) + "'");
}

struct MoveSequence {
    std::vector<Move> moves;
    Metric metric = Metric::QTM;

    std::size_t size() const { return moves.size(); }
    bool empty() const { return moves.empty(); }

    friend bool operator==(const MoveSequence&, const MoveSequence&) = default;
};

inline std::string to_string(const MoveSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.moves.size(); ++i) {
        if (i) out += ' ';
        out += to_string(seq.moves[i]);
    }
    return out;
}

/// Whitespace-separated tokens such as "R U R' U2". The metric is QTM unless a
/// half turn is present.
inline MoveSequence parse_sequence(std::string_view text) {
    MoveSequence seq;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) seq.moves.push_back(parse_move(token));
    seq.metric = std::any_of(seq.moves.begin(), seq.moves.end(), [](Move m) { return m.turns == 2; })
                     ? Metric::HTM
                     : Metric::QTM;
    return seq;
}

inline MoveSequence invert(const MoveSequence& seq) {
    MoveSequence out{{}, seq.metric};
    out.moves.reserve(seq.moves.size());
    for (auto it = seq.moves.rbegin(); it != seq.moves.rend(); ++it) out.moves.push_back(it->inverse());
    return out;
}

using Facelets = std::array<Color, kFacelets>;

namespace detail {

struct Vec3 {
    int x = 0, y = 0, z = 0;
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr int dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// Outward normal of a face: x to the right, y up, z toward the viewer.
constexpr Vec3 normal_of(Face f) {
    switch (f) {
        case Face::Up: return {0, 1, 0};
        case Face::Down: return {0, -1, 0};
        case Face::Front: return {0, 0, 1};
        case Face::Back: return {0, 0, -1};
        case Face::Left: return {-1, 0, 0};
        case Face::Right: return {1, 0, 0};
    }
    return {};
}

struct Sticker {
    Vec3 pos;     // cubie position in {-1,0,1}^3
    Vec3 normal;  // outward normal of the face carrying the sticker
};

constexpr Sticker sticker_of(int index) {
    const Face f = face_of_facelet(index);
    const int r = (index % 9) / 3;
    const int c = index % 3;
    switch (f) {
        case Face::Up: return {{c - 1, 1, r - 1}, normal_of(f)};
        case Face::Down: return {{c - 1, -1, 1 - r}, normal_of(f)};
        case Face::Front: return {{c - 1, 1 - r, 1}, normal_of(f)};
        case Face::Back: return {{1 - c, 1 - r, -1}, normal_of(f)};
        case Face::Left: return {{-1, 1 - r, c - 1}, normal_of(f)};
        case Face::Right: return {{1, 1 - r, 1 - c}, normal_of(f)};
    }
    return {};
}

inline int index_of(const Sticker& s) {
    static const auto lookup = [] {
        std::array<std::array<int, 6>, 27> table{};
        for (int i = 0; i < kFacelets; ++i) {
            const Sticker st = sticker_of(i);
            const int p = (st.pos.x + 1) * 9 + (st.pos.y + 1) * 3 + (st.pos.z + 1);
            table[static_cast<std::size_t>(p)][static_cast<std::size_t>(face_of_facelet(i))] = i;
        }
        return table;
    }();
    Face f = Face::Up;
    for (Face g : kAllFaces)
        if (normal_of(g) == s.normal) f = g;
    const int p = (s.pos.x + 1) * 9 + (s.pos.y + 1) * 3 + (s.pos.z + 1);
    return lookup[static_cast<std::size_t>(p)][static_cast<std::size_t>(f)];
}

/// Quarter turn clockwise as seen from outside along `axis`: v -> a(a.v) - a x v.
constexpr Vec3 rotate_cw(Vec3 v, Vec3 axis) {
    const Vec3 c = cross(axis, v);
    const int d = dot(axis, v);
    return {axis.x * d - c.x, axis.y * d - c.y, axis.z * d - c.z};
}

/// Facelet permutation with the convention out[i] = in[perm[i]].
using Permutation = std::array<std::uint8_t, kFacelets>;

template <class Transform>
Permutation permutation_from(Transform&& transform) {
    Permutation perm{};
    for (int src = 0; src < kFacelets; ++src) {
        const int dst = index_of(transform(sticker_of(src)));
        perm[static_cast<std::size_t>(dst)] = static_cast<std::uint8_t>(src);
    }
    return perm;
}

inline const std::array<Permutation, 18>& move_permutations() {
    static const auto table = [] {
        std::array<Permutation, 18> out{};
        for (int mi = 0; mi < 18; ++mi) {
            const Move m = Move::from_index(mi);
            const Vec3 axis = normal_of(m.face);
            out[static_cast<std::size_t>(mi)] = permutation_from([&](Sticker s) {
                if (dot(s.pos, axis) != 1) return s;
                for (int t = 0; t < m.turns; ++t) {
                    s.pos = rotate_cw(s.pos, axis);
                    s.normal = rotate_cw(s.normal, axis);
                }
                return s;
            });
        }
        return out;
    }();
    return table;
}

}  // namespace detail

/// A full cube configuration. Always valid: nine of each colour, centres in the
/// fixed scheme, and reachable from the solved state.
class CubeState {
public:
    CubeState() : cells_(solved_cells()) {}

    static CubeState solved() { return CubeState(); }

    /// Validates colour counts, centres and reachability.
    static CubeState from_facelets(const Facelets& cells);

    /// 54 letters over W,Y,G,B,O,R in facelet order.
    static CubeState from_string(std::string_view text) {
        if (text.size() != kFacelets) throw invalid_argument("state string must have 54 characters");
        Facelets cells{};
        for (int i = 0; i < kFacelets; ++i) cells[static_cast<std::size_t>(i)] = color_from_letter(text[static_cast<std::size_t>(i)]);
        return from_facelets(cells);
    }

    const Facelets& facelets() const { return cells_; }
    Color operator[](int index) const { return cells_[static_cast<std::size_t>(index)]; }

    std::string to_string() const {
        std::string out(kFacelets, ' ');
        for (int i = 0; i < kFacelets; ++i) out[static_cast<std::size_t>(i)] = color_letter(cells_[static_cast<std::size_t>(i)]);
        return out;
    }

    friend bool operator==(const CubeState&, const CubeState&) = default;
    friend auto operator<=>(const CubeState& a, const CubeState& b) { return a.cells_ <=> b.cells_; }

    /// Builds a state from a trusted permutation of a valid state's cells.
    static CubeState unchecked(const Facelets& cells) {
        CubeState s;
        s.cells_ = cells;
        return s;
    }

private:
    static Facelets solved_cells() {
        Facelets cells{};
        for (int i = 0; i < kFacelets; ++i) cells[static_cast<std::size_t>(i)] = scheme_color(face_of_facelet(i));
        return cells;
    }

    Facelets cells_;
};

inline CubeState apply_move(const CubeState& state, Move m) {
    const auto& perm = detail::move_permutations()[static_cast<std::size_t>(m.index())];
    Facelets out{};
    const Facelets& in = state.facelets();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[perm[i]];
    return CubeState::unchecked(out);
}

inline CubeState apply_sequence(CubeState state, const MoveSequence& seq) {
    for (Move m : seq.moves) state = apply_move(state, m);
    return state;
}

inline CubeState apply_sequence(const CubeState& state, std::string_view notation) {
    return apply_sequence(state, parse_sequence(notation));
}

/// Seeded random scramble; consecutive moves never share a face.
inline std::pair<CubeState, MoveSequence> scramble(std::uint64_t seed, int length, Metric metric) {
    if (length <= 0) throw invalid_argument("empty scramble");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> face_dist(0, 5);
    std::uniform_int_distribution<int> turn_dist(0, metric == Metric::QTM ? 1 : 2);
    MoveSequence seq{{}, metric};
    int previous = -1;
    for (int i = 0; i < length; ++i) {
        int f = face_dist(rng);
        while (f == previous) f = face_dist(rng);
        previous = f;
        const int t = turn_dist(rng);
        const std::uint8_t turns = metric == Metric::QTM ? (t == 0 ? 1 : 3) : static_cast<std::uint8_t>(t + 1);
        seq.moves.push_back(Move{static_cast<Face>(f), turns});
    }
    return {apply_sequence(CubeState::solved(), seq), seq};
}

/// Subgoal template: Grey cells accept any colour.
class MaskedPattern {
public:
    /// Requires at least one non-grey cell.
    explicit MaskedPattern(const Facelets& cells) : cells_(cells) {
        if (std::all_of(cells_.begin(), cells_.end(), [](Color c) { return c == Color::Grey; }))
            throw invalid_argument("pattern must constrain at least one cell; use MaskedPattern::universal()");
    }

    /// The all-grey pattern, matching every configuration.
    static MaskedPattern universal() {
        MaskedPattern p;
        p.cells_.fill(Color::Grey);
        return p;
    }

    static MaskedPattern from_string(std::string_view text) {
        if (text.size() != kFacelets) throw invalid_argument("pattern string must have 54 characters");
        Facelets cells{};
        for (int i = 0; i < kFacelets; ++i) cells[static_cast<std::size_t>(i)] = color_from_letter(text[static_cast<std::size_t>(i)]);
        if (std::all_of(cells.begin(), cells.end(), [](Color c) { return c == Color::Grey; })) return universal();
        return MaskedPattern(cells);
    }

    static MaskedPattern exact(const CubeState& state) { return MaskedPattern(state.facelets()); }

    const Facelets& cells() const { return cells_; }
    Color operator[](int index) const { return cells_[static_cast<std::size_t>(index)]; }

    bool is_universal() const {
        return std::all_of(cells_.begin(), cells_.end(), [](Color c) { return c == Color::Grey; });
    }

    int grey_count() const {
        return static_cast<int>(std::count(cells_.begin(), cells_.end(), Color::Grey));
    }

    std::string to_string() const {
        std::string out(kFacelets, ' ');
        for (int i = 0; i < kFacelets; ++i) out[static_cast<std::size_t>(i)] = color_letter(cells_[static_cast<std::size_t>(i)]);
        return out;
    }

    friend bool operator==(const MaskedPattern&, const MaskedPattern&) = default;
    friend auto operator<=>(const MaskedPattern& a, const MaskedPattern& b) { return a.cells_ <=> b.cells_; }

private:
    MaskedPattern() = default;
    Facelets cells_{};
};

inline bool matches(const CubeState& state, const MaskedPattern& pattern) {
    for (int i = 0; i < kFacelets; ++i) {
        const Color want = pattern[i];
        if (want != Color::Grey && want != state[i]) return false;
    }
    return true;
}

/// Up centre and edges white; each side face's centre and Up-adjacent edge
/// facelet in that face's colour; every other cell grey.
inline MaskedPattern white_cross_pattern() {
    Facelets cells{};
    cells.fill(Color::Grey);
    cells[center_index(Face::Up)] = Color::White;
    for (int i : {1, 3, 5, 7}) cells[static_cast<std::size_t>(facelet_index(Face::Up, i))] = Color::White;
    for (Face f : {Face::Front, Face::Right, Face::Back, Face::Left}) {
        cells[static_cast<std::size_t>(center_index(f))] = scheme_color(f);
        cells[static_cast<std::size_t>(facelet_index(f, 1))] = scheme_color(f);
    }
    return MaskedPattern(cells);
}

// ---------------------------------------------------------------------------
// Cubie view, used for reachability checks and by the cross abstraction.

namespace cubies {

/// Edge slots in the order UR UF UL UB DR DF DL DB FR FL BL BR.
inline constexpr std::array<detail::Vec3, 12> kEdgeSlots = {{{1, 1, 0},  {0, 1, 1},  {-1, 1, 0},  {0, 1, -1},
                                                              {1, -1, 0}, {0, -1, 1}, {-1, -1, 0}, {0, -1, -1},
                                                              {1, 0, 1},  {-1, 0, 1}, {-1, 0, -1}, {1, 0, -1}}};

/// Corner slots in the order URF UFL ULB UBR DFR DLF DBL DRB.
inline constexpr std::array<detail::Vec3, 8> kCornerSlots = {{{1, 1, 1},   {-1, 1, 1},  {-1, 1, -1}, {1, 1, -1},
                                                               {1, -1, 1}, {-1, -1, 1}, {-1, -1, -1}, {1, -1, -1}}};

/// Facelets of each edge slot; the first is the primary facelet (the Up/Down
/// one, or Front/Back for middle-layer slots). An edge is flipped when its
/// primary colour (white/yellow, else green/blue) is off the primary facelet,
/// so only Front and Back quarter turns change edge orientation.
inline const std::array<std::array<int, 2>, 12>& edge_facelets() {
    static const auto table = [] {
        std::array<std::array<int, 2>, 12> out{};
        for (std::size_t s = 0; s < 12; ++s) {
            const detail::Vec3 p = kEdgeSlots[s];
            std::vector<int> found;
            for (Face f : kAllFaces) {
                const detail::Vec3 n = detail::normal_of(f);
                if (detail::dot(n, p) == 1) found.push_back(detail::index_of({p, n}));
            }
            auto rank = [](int idx) {
                const Face f = face_of_facelet(idx);
                if (f == Face::Up || f == Face::Down) return 0;
                if (f == Face::Front || f == Face::Back) return 1;
                return 2;
            };
            std::sort(found.begin(), found.end(), [&](int a, int b) { return rank(a) < rank(b); });
            out[s] = {found[0], found[1]};
        }
        return out;
    }();
    return table;
}

/// Facelets of each corner slot: the Up/Down facelet first, then clockwise.
inline const std::array<std::array<int, 3>, 8>& corner_facelets() {
    static const auto table = [] {
        std::array<std::array<int, 3>, 8> out{};
        for (std::size_t s = 0; s < 8; ++s) {
            const detail::Vec3 p = kCornerSlots[s];
            const detail::Vec3 ud{0, p.y, 0};
            const detail::Vec3 a{p.x, 0, 0};
            const detail::Vec3 b{0, 0, p.z};
            const detail::Vec3 second = detail::dot(detail::cross(ud, a), p) < 0 ? a : b;
            const detail::Vec3 third = second == a ? b : a;
            out[s] = {detail::index_of({p, ud}), detail::index_of({p, second}), detail::index_of({p, third})};
        }
        return out;
    }();
    return table;
}

inline bool is_primary_color(Color c) { return c == Color::White || c == Color::Yellow; }

struct CubieState {
    std::array<int, 8> corner_perm{};  // cubie in slot
    std::array<int, 8> corner_twist{};
    std::array<int, 12> edge_perm{};
    std::array<int, 12> edge_flip{};
};

inline int permutation_parity(std::span<const int> perm) {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inversions;
    return inversions % 2;
}

/// Identifies every cubie; throws if a sticker combination is not a real cubie.
inline CubieState decompose(const Facelets& cells) {
    const Facelets solved = CubeState::solved().facelets();
    CubieState out;
    const auto& cf = corner_facelets();
    for (std::size_t slot = 0; slot < 8; ++slot) {
        std::array<Color, 3> here{};
        for (std::size_t k = 0; k < 3; ++k) here[k] = cells[static_cast<std::size_t>(cf[slot][k])];
        int twist = -1;
        for (int k = 0; k < 3; ++k)
            if (is_primary_color(here[static_cast<std::size_t>(k)])) twist = k;
        if (twist < 0) throw invalid_argument("corner without a white or yellow sticker");
        int cubie = -1;
        for (std::size_t home = 0; home < 8; ++home) {
            bool same = true;
            for (std::size_t k = 0; k < 3; ++k)
                same = same && here[(k + static_cast<std::size_t>(twist)) % 3] == solved[static_cast<std::size_t>(cf[home][k])];
            if (same) cubie = static_cast<int>(home);
        }
        if (cubie < 0) throw invalid_argument("impossible corner colouring");
        out.corner_perm[slot] = cubie;
        out.corner_twist[slot] = twist;
    }
    const auto& ef = edge_facelets();
    for (std::size_t slot = 0; slot < 12; ++slot) {
        const Color a = cells[static_cast<std::size_t>(ef[slot][0])];
        const Color b = cells[static_cast<std::size_t>(ef[slot][1])];
        int cubie = -1, flip = 0;
        for (std::size_t home = 0; home < 12; ++home) {
            const Color ha = solved[static_cast<std::size_t>(ef[home][0])];
            const Color hb = solved[static_cast<std::size_t>(ef[home][1])];
            if (a == ha && b == hb) cubie = static_cast<int>(home), flip = 0;
            if (a == hb && b == ha) cubie = static_cast<int>(home), flip = 1;
        }
        if (cubie < 0) throw invalid_argument("impossible edge colouring");
        out.edge_perm[slot] = cubie;
        out.edge_flip[slot] = flip;
    }
    return out;
}

/// Inverse of decompose.
inline Facelets compose(const CubieState& cs) {
    const Facelets solved = CubeState::solved().facelets();
    Facelets out = solved;
    const auto& cf = corner_facelets();
    for (std::size_t slot = 0; slot < 8; ++slot) {
        const auto home = static_cast<std::size_t>(cs.corner_perm[slot]);
        for (std::size_t k = 0; k < 3; ++k)
            out[static_cast<std::size_t>(cf[slot][(k + static_cast<std::size_t>(cs.corner_twist[slot])) % 3])] =
                solved[static_cast<std::size_t>(cf[home][k])];
    }
    const auto& ef = edge_facelets();
    for (std::size_t slot = 0; slot < 12; ++slot) {
        const auto home = static_cast<std::size_t>(cs.edge_perm[slot]);
        const std::size_t flip = static_cast<std::size_t>(cs.edge_flip[slot]);
        for (std::size_t k = 0; k < 2; ++k)
            out[static_cast<std::size_t>(ef[slot][(k + flip) % 2])] = solved[static_cast<std::size_t>(ef[home][k])];
    }
    return out;
}

inline bool is_reachable(const CubieState& cs) {
    std::array<bool, 8> seen_c{};
    for (int c : cs.corner_perm) {
        if (seen_c[static_cast<std::size_t>(c)]) return false;
        seen_c[static_cast<std::size_t>(c)] = true;
    }
    std::array<bool, 12> seen_e{};
    for (int e : cs.edge_perm) {
        if (seen_e[static_cast<std::size_t>(e)]) return false;
        seen_e[static_cast<std::size_t>(e)] = true;
    }
    int twist = 0, flip = 0;
    for (int t : cs.corner_twist) twist += t;
    for (int f : cs.edge_flip) flip += f;
    if (twist % 3 != 0 || flip % 2 != 0) return false;
    return permutation_parity(cs.corner_perm) == permutation_parity(cs.edge_perm);
}

}  // namespace cubies

inline CubeState CubeState::from_facelets(const Facelets& cells) {
    std::array<int, 7> counts{};
    for (Color c : cells) ++counts[static_cast<std::size_t>(c)];
    if (counts[static_cast<std::size_t>(Color::Grey)] != 0) throw invalid_argument("state contains grey cells");
    for (int k = 0; k < 6; ++k)
        if (counts[static_cast<std::size_t>(k)] != 9) throw invalid_argument("each colour must appear exactly 9 times");
    for (Face f : kAllFaces)
        if (cells[static_cast<std::size_t>(center_index(f))] != scheme_color(f))
            throw invalid_argument("centres must follow the fixed colour scheme");
    if (!cubies::is_reachable(cubies::decompose(cells))) throw invalid_argument("state is not reachable from solved");
    return unchecked(cells);
}

}  // namespace cubetutor
