#pragma once

// Cross abstraction: the position and orientation of the four white edges.
//
// Packing: value = rank(slots) * 16 + flips, where slots[i] is the slot (0..11,
// order UR UF UL UB DR DF DL DB FR FL BL BR) of white edge i (white-red,
// white-green, white-orange, white-blue), rank is the Lehmer rank of the
// 4-permutation of 12 (0..11879), and bit i of flips is edge i's flip.
//
// Orientation follows the usual F/B convention: the white sticker on the
// Up/Down facelet (or Front/Back for a middle-layer slot) means unflipped.
// Worked example: from solved, F moves white-green from UF to FR with the
// white sticker on the Right face, so that edge becomes flipped; R moves
// white-red from UR to BR with white on Back, which stays unflipped.

#include <array>
#include <cstdint>
#include <vector>

#include "cubetutor/cube.hpp"

namespace cubetutor {

inline constexpr std::uint32_t kCrossSize = 12 * 11 * 10 * 9 * 16;  // 190,080

struct CrossCoordinate {
    std::uint32_t value = 0;
    friend constexpr bool operator==(CrossCoordinate, CrossCoordinate) = default;
    friend constexpr auto operator<=>(CrossCoordinate, CrossCoordinate) = default;
};

/// Slot and flip of each white edge.
struct CrossPlacement {
    std::array<int, 4> slots{};
    std::array<int, 4> flips{};
};

namespace cross_detail {

/// Mate colours of the white edges, in coordinate order.
inline constexpr std::array<Color, 4> kMateColors = {Color::Red, Color::Green, Color::Orange, Color::Blue};

inline int white_edge_of(Color mate) {
    for (int i = 0; i < 4; ++i)
        if (kMateColors[static_cast<std::size_t>(i)] == mate) return i;
    return -1;
}

/// Slot and sticker position (0 primary, 1 secondary) of every edge facelet; -1 elsewhere.
struct EdgeFaceletInfo {
    std::array<int, kFacelets> slot{};
    std::array<int, kFacelets> position{};
};

inline const EdgeFaceletInfo& edge_facelet_info() {
    static const auto info = [] {
        EdgeFaceletInfo out;
        out.slot.fill(-1);
        out.position.fill(-1);
        const auto& ef = cubies::edge_facelets();
        for (int s = 0; s < 12; ++s)
            for (int k = 0; k < 2; ++k) {
                out.slot[static_cast<std::size_t>(ef[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)])] = s;
                out.position[static_cast<std::size_t>(ef[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)])] = k;
            }
        return out;
    }();
    return info;
}

/// edge_moves[slot*2+flip][move] -> slot*2+flip after the move.
inline const std::array<std::array<std::uint8_t, 18>, 24>& edge_moves() {
    static const auto table = [] {
        std::array<std::array<std::uint8_t, 18>, 24> out{};
        const auto& ef = cubies::edge_facelets();
        const auto& info = edge_facelet_info();
        for (int mi = 0; mi < 18; ++mi) {
            const auto& perm = detail::move_permutations()[static_cast<std::size_t>(mi)];
            std::array<int, kFacelets> dest{};
            for (int i = 0; i < kFacelets; ++i) dest[perm[static_cast<std::size_t>(i)]] = i;
            for (int s = 0; s < 12; ++s)
                for (int f = 0; f < 2; ++f) {
                    // Follow the primary-coloured (white) sticker.
                    const int from = ef[static_cast<std::size_t>(s)][static_cast<std::size_t>(f)];
                    const int to = dest[static_cast<std::size_t>(from)];
                    out[static_cast<std::size_t>(s * 2 + f)][static_cast<std::size_t>(mi)] =
                        static_cast<std::uint8_t>(info.slot[static_cast<std::size_t>(to)] * 2 +
                                                  info.position[static_cast<std::size_t>(to)]);
                }
        }
        return out;
    }();
    return table;
}

}  // namespace cross_detail

inline CrossCoordinate encode(const CrossPlacement& p) {
    std::uint32_t rank = 0;
    std::array<bool, 12> used{};
    for (int i = 0; i < 4; ++i) {
        const int s = p.slots[static_cast<std::size_t>(i)];
        int idx = 0;
        for (int k = 0; k < s; ++k)
            if (!used[static_cast<std::size_t>(k)]) ++idx;
        used[static_cast<std::size_t>(s)] = true;
        rank = rank * static_cast<std::uint32_t>(12 - i) + static_cast<std::uint32_t>(idx);
    }
    std::uint32_t flips = 0;
    for (int i = 0; i < 4; ++i) flips |= static_cast<std::uint32_t>(p.flips[static_cast<std::size_t>(i)] & 1) << i;
    return {rank * 16 + flips};
}

inline CrossPlacement decode(CrossCoordinate c) {
    CrossPlacement p;
    const std::uint32_t flips = c.value % 16;
    std::uint32_t rank = c.value / 16;
    std::array<int, 4> digits{};
    for (int i = 3; i >= 0; --i) {
        const std::uint32_t base = static_cast<std::uint32_t>(12 - i);
        digits[static_cast<std::size_t>(i)] = static_cast<int>(rank % base);
        rank /= base;
    }
    std::array<bool, 12> used{};
    for (int i = 0; i < 4; ++i) {
        int idx = digits[static_cast<std::size_t>(i)];
        int s = 0;
        for (;; ++s) {
            if (used[static_cast<std::size_t>(s)]) continue;
            if (idx == 0) break;
            --idx;
        }
        used[static_cast<std::size_t>(s)] = true;
        p.slots[static_cast<std::size_t>(i)] = s;
        p.flips[static_cast<std::size_t>(i)] = static_cast<int>((flips >> i) & 1u);
    }
    return p;
}

inline CrossCoordinate cross_coordinate(const CubeState& state) {
    CrossPlacement p;
    const auto& ef = cubies::edge_facelets();
    for (int s = 0; s < 12; ++s) {
        const Color a = state[ef[static_cast<std::size_t>(s)][0]];
        const Color b = state[ef[static_cast<std::size_t>(s)][1]];
        if (a == Color::White) {
            const int e = cross_detail::white_edge_of(b);
            p.slots[static_cast<std::size_t>(e)] = s;
            p.flips[static_cast<std::size_t>(e)] = 0;
        } else if (b == Color::White) {
            const int e = cross_detail::white_edge_of(a);
            p.slots[static_cast<std::size_t>(e)] = s;
            p.flips[static_cast<std::size_t>(e)] = 1;
        }
    }
    return encode(p);
}

inline CrossCoordinate apply_move(CrossCoordinate c, Move m) {
    CrossPlacement p = decode(c);
    const auto& table = cross_detail::edge_moves();
    for (int i = 0; i < 4; ++i) {
        const int code = table[static_cast<std::size_t>(p.slots[static_cast<std::size_t>(i)] * 2 +
                                                        p.flips[static_cast<std::size_t>(i)])]
                              [static_cast<std::size_t>(m.index())];
        p.slots[static_cast<std::size_t>(i)] = code / 2;
        p.flips[static_cast<std::size_t>(i)] = code % 2;
    }
    return encode(p);
}

/// Dense successor table, next[c * 18 + move index].
inline const std::vector<std::uint32_t>& cross_move_table() {
    static const auto table = [] {
        std::vector<std::uint32_t> out(static_cast<std::size_t>(kCrossSize) * 18);
        for (std::uint32_t c = 0; c < kCrossSize; ++c)
            for (int mi = 0; mi < 18; ++mi)
                out[static_cast<std::size_t>(c) * 18 + static_cast<std::size_t>(mi)] =
                    apply_move(CrossCoordinate{c}, Move::from_index(mi)).value;
        return out;
    }();
    return table;
}

/// Centres plus the stickers of the white edges; every other cell grey.
inline Facelets cross_projection(CrossCoordinate c) {
    Facelets cells{};
    cells.fill(Color::Grey);
    for (Face f : kAllFaces) cells[static_cast<std::size_t>(center_index(f))] = scheme_color(f);
    const CrossPlacement p = decode(c);
    const auto& ef = cubies::edge_facelets();
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& slot = ef[static_cast<std::size_t>(p.slots[i])];
        cells[static_cast<std::size_t>(slot[static_cast<std::size_t>(p.flips[i])])] = Color::White;
        cells[static_cast<std::size_t>(slot[static_cast<std::size_t>(1 - p.flips[i])])] = cross_detail::kMateColors[i];
    }
    return cells;
}

inline Facelets cross_projection(const CubeState& state) { return cross_projection(cross_coordinate(state)); }

/// A reachable state with the given white-edge placement: the remaining edges
/// fill the free slots in home order, corners are solved, and flip and
/// permutation parities are repaired on pieces outside the cross.
inline CubeState representative_state(CrossCoordinate c) {
    const CrossPlacement p = decode(c);
    cubies::CubieState cs;
    for (int i = 0; i < 8; ++i) cs.corner_perm[static_cast<std::size_t>(i)] = i;
    std::array<bool, 12> taken{};
    int flip_sum = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        // White edge i lives at home slot i (UR UF UL UB).
        cs.edge_perm[static_cast<std::size_t>(p.slots[i])] = static_cast<int>(i);
        cs.edge_flip[static_cast<std::size_t>(p.slots[i])] = p.flips[i];
        taken[static_cast<std::size_t>(p.slots[i])] = true;
        flip_sum += p.flips[i];
    }
    int next_home = 4;
    int last_free = -1;
    for (int s = 0; s < 12; ++s) {
        if (taken[static_cast<std::size_t>(s)]) continue;
        cs.edge_perm[static_cast<std::size_t>(s)] = next_home++;
        cs.edge_flip[static_cast<std::size_t>(s)] = 0;
        last_free = s;
    }
    if (flip_sum % 2) cs.edge_flip[static_cast<std::size_t>(last_free)] = 1;
    if (cubies::permutation_parity(cs.edge_perm)) std::swap(cs.corner_perm[6], cs.corner_perm[7]);
    return CubeState::unchecked(cubies::compose(cs));
}

/// A masked pattern compiled against the cross abstraction. Construction fails
/// unless the pattern's match set is a union of cross-coordinate classes:
/// non-grey cells may only be centres (in scheme colour), white edge facelets,
/// or the mate facelet of a white-constrained edge facelet.
class CrossGoal {
public:
    explicit CrossGoal(const MaskedPattern& pattern) : pattern_(pattern) {
        const auto& info = cross_detail::edge_facelet_info();
        const auto& ef = cubies::edge_facelets();
        for (int i = 0; i < kFacelets; ++i) {
            const Color want = pattern[i];
            if (want == Color::Grey) continue;
            if (i % 9 == 4) {
                if (want != scheme_color(face_of_facelet(i))) throw outside();
                continue;
            }
            const int slot = info.slot[static_cast<std::size_t>(i)];
            if (slot < 0) throw outside();
            if (want != Color::White) {
                const int mate = ef[static_cast<std::size_t>(slot)][static_cast<std::size_t>(1 - info.position[static_cast<std::size_t>(i)])];
                if (pattern[mate] != Color::White || cross_detail::white_edge_of(want) < 0) throw outside();
            }
            // A white cell needs some white edge with its white sticker there; a
            // mate cell needs that particular edge with white on the other sticker.
            const int pos = info.position[static_cast<std::size_t>(i)];
            if (want == Color::White)
                constraints_.push_back({slot * 2 + pos, -1});
            else
                constraints_.push_back({slot * 2 + 1 - pos, cross_detail::white_edge_of(want)});
        }
    }

    bool matches(const CrossPlacement& p) const {
        for (const Constraint& k : constraints_) {
            bool hit = false;
            for (std::size_t i = 0; i < 4 && !hit; ++i)
                hit = p.slots[i] * 2 + p.flips[i] == k.code && (k.edge < 0 || k.edge == static_cast<int>(i));
            if (!hit) return false;
        }
        return true;
    }

    bool matches(CrossCoordinate c) const { return constraints_.empty() || matches(decode(c)); }

    const MaskedPattern& pattern() const { return pattern_; }

    static bool admits(const MaskedPattern& pattern) {
        try {
            CrossGoal g(pattern);
            return true;
        } catch (const Error&) {
            return false;
        }
    }

private:
    static Error outside() { return invalid_argument("goal outside cross abstraction"); }

    struct Constraint {
        int code;  // slot * 2 + flip
        int edge;  // -1: any white edge
    };
    MaskedPattern pattern_;
    std::vector<Constraint> constraints_;
};

}  // namespace cubetutor
