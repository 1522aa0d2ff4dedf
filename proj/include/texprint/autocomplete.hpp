#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "texprint/geom2d.hpp"

namespace texprint {

// One element placed by the user (or inferred), in chart coordinates.
struct PlacementEvent {
  Vec2 anchor = Vec2::Zero();
  double rotation = 0.0;  // radians
  double scale = 1.0;
  int seq = 0;

  bool operator==(const PlacementEvent&) const = default;
};

// Polyline with an arclength table and a smooth tangent: vertex tangents
// bisect the adjacent segments, end tangents extrapolate the turning of the
// next vertex, and tangents blend linearly in between.
class CurvePath {
 public:
  CurvePath() = default;
  explicit CurvePath(std::vector<Vec2> points);  // throws InvalidInput

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return arclength_.empty() ? 0.0 : arclength_.back(); }
  Vec2 at(double s) const;
  // Unwrapped tangent angle; continuous along the whole path.
  double tangent_angle(double s) const;
  // Arclength of the point of the path nearest p.
  double project(const Vec2& p) const;

 private:
  std::pair<std::size_t, double> locate(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> arclength_;
  std::vector<double> vertex_angle_;
};

enum class Generator { Row, Grid, Curve };

struct PatternSuggestion {
  Generator generator = Generator::Row;
  Vec2 d1 = Vec2::Zero();
  Vec2 d2 = Vec2::Zero();  // grid only
  CurvePath path;          // curve only
  double spacing = 0.0;    // curve only

  // Demonstrated events first (in seq order), then inferred ones.
  std::vector<PlacementEvent> placements;
  std::size_t demonstrated = 0;

  double density = 0.0;   // |d1|, or the curve spacing
  double scale = 1.0;     // applied to every placement
  double rotation = 0.0;  // rotation of the first placement

  geom2d::MultiPolygon2 region;
  std::optional<geom2d::Polygon2> element;  // none for a point element

  std::vector<PlacementEvent> inferred() const {
    return {placements.begin() + static_cast<std::ptrdiff_t>(demonstrated), placements.end()};
  }
};

inline constexpr double kSpacingTolerance = 0.15;  // relative to |d1|
inline constexpr double kRotationTolerance = 0.1;  // radians
inline constexpr double kMinOverlap = 0.6;         // of the footprint area
inline constexpr double kGridThreshold = 0.25;     // perpendicular offset / |d1|

// Whether an element placed at p keeps at least 60% of its area inside the
// region. A point element must lie strictly inside.
bool placement_fits(const PlacementEvent& p, const geom2d::MultiPolygon2& region,
                    const std::optional<geom2d::Polygon2>& element);

// Row or grid completion of two or more demonstrated placements. Returns
// nothing when the demonstration is irregular: spacing off a lattice point
// by more than 15% of |d1|, rotations more than 0.1 rad apart, or scales more
// than 15% apart.
std::optional<PatternSuggestion> infer_pattern(const std::vector<PlacementEvent>& events,
                                               const geom2d::MultiPolygon2& region,
                                               const std::optional<geom2d::Polygon2>& element = std::nullopt);

// Placements every |a2 - a1| of arclength along path, from the point nearest
// a1 to the end. Throws InvalidInput when the path is shorter than the spacing.
PatternSuggestion complete_along_curve(const std::vector<PlacementEvent>& events, const CurvePath& path,
                                       const geom2d::MultiPolygon2& region,
                                       const std::optional<geom2d::Polygon2>& element = std::nullopt);

struct SetDensity {
  double density;
};
struct SetScale {
  double scale;
};
struct SetRotation {
  double rotation;
};
struct MoveAnchor {
  int seq;
  Vec2 to;
};
using PatternEdit = std::variant<SetDensity, SetScale, SetRotation, MoveAnchor>;

// Regenerates the inferred placements after one edit. Throws InvalidInput
// for non-positive density or scale, an unknown seq, or a move that leaves
// the demonstration irregular.
PatternSuggestion adjust(const PatternSuggestion& suggestion, const PatternEdit& edit);

}  // namespace texprint
