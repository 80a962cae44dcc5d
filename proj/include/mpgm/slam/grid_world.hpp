#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpgm::slam {

enum class Heading : int { North = 0, East = 1, South = 2, West = 3 };

struct Pose {
    int x = 0;
    int y = 0;
    Heading heading = Heading::North;

    bool operator==(const Pose&) const = default;
};

enum class MoveAction : int { Forward = 0, TurnLeft = 1, TurnRight = 2 };

/// Range reading in the four pose-relative directions (front, right, back,
/// left): number of free cells before the first occupied one.
struct RangeObservation {
    std::array<int, 4> ranges{};

    bool operator==(const RangeObservation&) const = default;
};

/// Walled rectangular grid. (0,0) is the top-left cell; x grows east and
/// y grows south. All border cells must be occupied and the start cell free.
struct GridWorld {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> occupied;  // row-major
    Pose start;

    GridWorld(int w, int h, const std::vector<std::pair<int, int>>& occupied_cells, Pose start_pose)
        : width(w), height(h), occupied(static_cast<std::size_t>(w * h), 0), start(start_pose) {
        if (w < 3 || h < 3) throw std::invalid_argument("GridWorld: need at least 3 x 3 cells");
        for (int x = 0; x < w; ++x) {
            set_occupied(x, 0);
            set_occupied(x, h - 1);
        }
        for (int y = 0; y < h; ++y) {
            set_occupied(0, y);
            set_occupied(w - 1, y);
        }
        for (const auto& [x, y] : occupied_cells) {
            if (x < 0 || x >= w || y < 0 || y >= h)
                throw std::invalid_argument("GridWorld: occupied cell out of bounds");
            set_occupied(x, y);
        }
        if (occupied_at(start.x, start.y))
            throw std::invalid_argument("GridWorld: start cell must be free");
    }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool occupied_at(int x, int y) const {
        return occupied[static_cast<std::size_t>(y * width + x)] != 0;
    }
    void set_occupied(int x, int y) { occupied[static_cast<std::size_t>(y * width + x)] = 1; }

    int n_cells() const { return width * height; }
    int n_poses() const { return n_cells() * 4; }
    int pose_index(const Pose& p) const {
        return (p.y * width + p.x) * 4 + static_cast<int>(p.heading);
    }
    Pose pose_from_index(int idx) const {
        Pose p;
        p.heading = static_cast<Heading>(idx % 4);
        const int cell = idx / 4;
        p.x = cell % width;
        p.y = cell / width;
        return p;
    }
};

}  // namespace mpgm::slam
