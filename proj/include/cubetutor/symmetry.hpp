#pragma once

// Whole-cube symmetries with simultaneous recolouring. An element maps a state
// to the state seen after rotating (or reflecting) the cube and then renaming
// colours so that the centres are back in the fixed scheme. The solved state
// and the white cross are invariant under every supported element.

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "cubetutor/cube.hpp"

namespace cubetutor {

enum class SymmetryGroup {
    Trivial,        // identity only
    UpAxis,         // the 4 rotations about the Up-Down axis
    UpAxisMirror,   // UpAxis plus a Left-Right reflection (order 8)
};

class Symmetry {
public:
    Symmetry() {
        for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = static_cast<std::uint8_t>(i);
        for (std::size_t c = 0; c < recolor_.size(); ++c) recolor_[c] = static_cast<Color>(c);
        for (Move m : all_moves()) move_map_[static_cast<std::size_t>(m.index())] = m;
    }

    /// `quarter_turns` rotations of the whole cube clockwise about Up,
    /// optionally preceded by the x -> -x reflection.
    static Symmetry make(int quarter_turns, bool mirrored) {
        Symmetry s;
        const detail::Vec3 up = detail::normal_of(Face::Up);
        auto transform = [&](detail::Vec3 v) {
            if (mirrored) v.x = -v.x;
            for (int t = 0; t < quarter_turns; ++t) v = detail::rotate_cw(v, up);
            return v;
        };
        s.perm_ = detail::permutation_from([&](detail::Sticker st) {
            return detail::Sticker{transform(st.pos), transform(st.normal)};
        });
        for (Face f : kAllFaces) {
            const detail::Vec3 n = transform(detail::normal_of(f));
            for (Face g : kAllFaces)
                if (detail::normal_of(g) == n) s.recolor_[static_cast<std::size_t>(scheme_color(f))] = scheme_color(g);
        }
        s.quarter_turns_ = quarter_turns;
        s.mirrored_ = mirrored;
        // A move m maps to the move m' with image(apply(solved, m)) == apply(solved, m').
        for (Move m : all_moves()) {
            const Facelets image = s.apply(apply_move(CubeState::solved(), m).facelets());
            for (Move candidate : all_moves())
                if (apply_move(CubeState::solved(), candidate).facelets() == image)
                    s.move_map_[static_cast<std::size_t>(m.index())] = candidate;
        }
        return s;
    }

    Facelets apply(const Facelets& in) const {
        Facelets out{};
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = recolor_[static_cast<std::size_t>(in[perm_[i]])];
        return out;
    }

    CubeState apply(const CubeState& state) const { return CubeState::unchecked(apply(state.facelets())); }

    MaskedPattern apply(const MaskedPattern& pattern) const {
        if (pattern.is_universal()) return pattern;
        return MaskedPattern(apply(pattern.cells()));
    }

    Move apply(Move m) const { return move_map_[static_cast<std::size_t>(m.index())]; }

    MoveSequence apply(const MoveSequence& seq) const {
        MoveSequence out{{}, seq.metric};
        for (Move m : seq.moves) out.moves.push_back(apply(m));
        return out;
    }

    int quarter_turns() const { return quarter_turns_; }
    bool mirrored() const { return mirrored_; }

private:
    detail::Permutation perm_{};
    std::array<Color, 7> recolor_{};
    std::array<Move, 18> move_map_{};
    int quarter_turns_ = 0;
    bool mirrored_ = false;
};

/// Group elements; element 0 is always the identity.
inline std::span<const Symmetry> elements(SymmetryGroup group) {
    static const auto table = [] {
        std::vector<Symmetry> all;
        for (bool mirrored : {false, true})
            for (int q = 0; q < 4; ++q) all.push_back(Symmetry::make(q, mirrored));
        return all;
    }();
    switch (group) {
        case SymmetryGroup::Trivial: return std::span<const Symmetry>(table.data(), 1);
        case SymmetryGroup::UpAxis: return std::span<const Symmetry>(table.data(), 4);
        case SymmetryGroup::UpAxisMirror: return std::span<const Symmetry>(table.data(), 8);
    }
    return {};
}

/// Lexicographically least facelet array over the group images of `state`.
inline CubeState canonicalize(const CubeState& state, SymmetryGroup group) {
    Facelets best = state.facelets();
    for (const Symmetry& g : elements(group)) best = std::min(best, g.apply(state.facelets()));
    return CubeState::unchecked(best);
}

inline MaskedPattern canonicalize(const MaskedPattern& pattern, SymmetryGroup group) {
    MaskedPattern best = pattern;
    for (const Symmetry& g : elements(group)) best = std::min(best, g.apply(pattern));
    return best;
}

inline std::string to_string(SymmetryGroup group) {
    switch (group) {
        case SymmetryGroup::Trivial: return "trivial";
        case SymmetryGroup::UpAxis: return "up-axis";
        case SymmetryGroup::UpAxisMirror: return "up-axis-mirror";
    }
    return "?";
}

inline SymmetryGroup parse_symmetry_group(std::string_view text) {
    if (text == "trivial") return SymmetryGroup::Trivial;
    if (text == "up-axis") return SymmetryGroup::UpAxis;
    if (text == "up-axis-mirror") return SymmetryGroup::UpAxisMirror;
    throw invalid_argument("unknown symmetry group '" + std::string(text) + "'");
}

}  // namespace cubetutor
