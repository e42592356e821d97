#include "coloc/paths.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double s, double length) {
  double r = std::fmod(s, length);
  if (r < 0.0) r += length;
  return r;
}

}  // namespace

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::circle: return "circle";
    case PathKind::rectangle: return "rectangle";
    case PathKind::donut: return "donut";
  }
  return "circle";
}

PathKind path_kind_from_string(const std::string& s) {
  if (s == "circle") return PathKind::circle;
  if (s == "rectangle") return PathKind::rectangle;
  if (s == "donut") return PathKind::donut;
  throw std::invalid_argument("unknown path kind: " + s);
}

void PathSpec::validate() const {
  if (!center.allFinite()) throw std::invalid_argument("path center not finite");
  switch (kind) {
    case PathKind::circle:
      if (!(radius > 0.0)) throw std::invalid_argument("path radius must be > 0");
      break;
    case PathKind::rectangle:
      if (!(width > 0.0)) throw std::invalid_argument("path width must be > 0");
      if (!(height > 0.0)) throw std::invalid_argument("path height must be > 0");
      break;
    case PathKind::donut:
      if (!(r_inner > 0.0)) throw std::invalid_argument("path r_inner must be > 0");
      if (!(r_outer > r_inner)) {
        throw std::invalid_argument("path r_outer must exceed r_inner");
      }
      break;
  }
  if (!std::isfinite(speed)) throw std::invalid_argument("path speed not finite");
  if (!std::isfinite(phase)) throw std::invalid_argument("path phase not finite");
}

double PathSpec::perimeter() const {
  switch (kind) {
    case PathKind::circle:
      return kTwoPi * radius;
    case PathKind::rectangle:
      return 2.0 * (width + height);
    case PathKind::donut:
      return kTwoPi * r_outer + kTwoPi * r_inner + 2.0 * (r_outer - r_inner);
  }
  return 0.0;
}

PosVec PathSpec::position_at(double arc) const {
  const double s = wrap(arc, perimeter());
  switch (kind) {
    case PathKind::circle: {
      const double theta = s / radius;
      return center + radius * PosVec(std::cos(theta), std::sin(theta));
    }
    case PathKind::rectangle: {
      // Counter-clockwise from the bottom-left corner.
      const double hw = 0.5 * width;
      const double hh = 0.5 * height;
      double t = s;
      if (t < width) return center + PosVec(-hw + t, -hh);
      t -= width;
      if (t < height) return center + PosVec(hw, -hh + t);
      t -= height;
      if (t < width) return center + PosVec(hw - t, hh);
      t -= width;
      return center + PosVec(-hw, hh - t);
    }
    case PathKind::donut: {
      const double outer = kTwoPi * r_outer;
      const double inner = kTwoPi * r_inner;
      const double gap = r_outer - r_inner;
      double t = s;
      if (t < outer) {
        const double theta = t / r_outer;
        return center + r_outer * PosVec(std::cos(theta), std::sin(theta));
      }
      t -= outer;
      if (t < gap) return center + PosVec(r_outer - t, 0.0);
      t -= gap;
      if (t < inner) {
        const double theta = t / r_inner;
        return center + r_inner * PosVec(std::cos(theta), std::sin(theta));
      }
      t -= inner;
      return center + PosVec(r_inner + t, 0.0);
    }
  }
  return center;
}

double loop_speed(const PathSpec& spec, int epochs, double dt) {
  return spec.perimeter() / (epochs * dt);
}

std::vector<StateVec> gen_path(const PathSpec& spec, int epochs, double dt) {
  spec.validate();
  if (epochs <= 0) throw std::invalid_argument("epochs must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const double speed =
      spec.speed != 0.0 ? spec.speed : loop_speed(spec, epochs, dt);

  std::vector<PosVec> pos(static_cast<std::size_t>(epochs) + 2);
  for (int k = 0; k <= epochs + 1; ++k) {
    pos[k] = spec.position_at(spec.phase + speed * k * dt);
  }
  std::vector<StateVec> out(static_cast<std::size_t>(epochs) + 1);
  for (int k = 0; k <= epochs; ++k) {
    const PosVec v = (pos[k + 1] - pos[k]) / dt;
    out[k] << pos[k](0), pos[k](1), v(0), v(1);
    if (pos[k](0) < kArenaMin || pos[k](0) > kArenaMax ||
        pos[k](1) < kArenaMin || pos[k](1) > kArenaMax) {
      throw std::runtime_error("path out of bounds");
    }
  }
  return out;
}

}  // namespace coloc
