#pragma once

#include <string>
#include <vector>

#include "coloc/core.hpp"

namespace coloc {

// Simulation arena, meters.
inline constexpr double kArenaMin = 0.0;
inline constexpr double kArenaMax = 200.0;

enum class PathKind { circle, rectangle, donut };

std::string to_string(PathKind kind);
PathKind path_kind_from_string(const std::string& s);

/// Closed 2D course parameterized by arc length. `phase` is an arc-length
/// offset in meters; `speed` is the traversal rate in m/s.
///   circle:    fixed radius around center
///   rectangle: perimeter walk with instantaneous corner turns
///              (width/height are full extents)
///   donut:     outer lap, radial transfer in, inner lap, transfer out
struct PathSpec {
  PathKind kind = PathKind::circle;
  PosVec center = PosVec(100.0, 100.0);
  double radius = 50.0;     // circle
  double width = 120.0;     // rectangle
  double height = 80.0;     // rectangle
  double r_inner = 25.0;    // donut
  double r_outer = 50.0;    // donut
  double speed = 0.0;       // m/s; negative reverses; 0 = one loop per run
  double phase = 0.0;       // arc-length offset, meters

  double perimeter() const;
  PosVec position_at(double arc) const;

  void validate() const;  // throws std::invalid_argument naming the field
};

/// Speed completing exactly one loop in `epochs` steps of `dt` seconds.
double loop_speed(const PathSpec& spec, int epochs, double dt);

/// epochs+1 true states sampled at dt. Velocities are the forward finite
/// difference of positions, so a constant-velocity step between samples
/// reproduces the next position exactly. Throws "path out of bounds" if
/// any position leaves the arena.
std::vector<StateVec> gen_path(const PathSpec& spec, int epochs, double dt);

}  // namespace coloc
