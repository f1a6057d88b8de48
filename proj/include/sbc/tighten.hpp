#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sbc/model.hpp"
#include "sbc/relax.hpp"

namespace sbc {

/// a q^2 + q y + c <= 0 for some y in [ly, uy].
struct QuadConstraint1D {
  double a = 0.0;
  double c = 0.0;
  double ly = 0.0;
  double uy = 0.0;
};

struct Interval {
  double lo = -kInf;
  double hi = kInf;
};

/// Hull of all q admitting some y in [ly, uy] with a q^2 + q y + c <= 0; nullopt when no q exists.
/// a = 0 is handled by linear interval reasoning; a < 0 leaves q unbounded.
std::optional<Interval> tighten_quadratic(const QuadConstraint1D& qc);

/// Isolates component k of z'Dz + b'z + c <= 0 over the box [zl, zu]: the remaining quadratic
/// terms are replaced by an interval lower bound and the cross terms form y.
QuadConstraint1D aggregate_to_1d(const RealQuadratic& rq, const Vec& zl, const Vec& zu, int k);

/// Angle-sum tightening of every edge of a cycle (consecutive indices, closing back to the first).
/// Each edge ratio bound becomes the tangent of minus the angle sum of the other edges, skipped when
/// that sum reaches pi/2 in magnitude. Never loosens.
EntryBounds tighten_cycle(const std::vector<int>& cycle, const EntryBounds& eb);

/// Triangles (i < j < k) whose three edges are tracked pairs.
std::vector<std::array<int, 3>> tracked_triangles(const LiftedModel& m);

struct TightenStats {
  int passes = 0;
  int changes = 0;
  bool infeasible = false;
};

/// Fixpoint of quadratic, magnitude/rectangle and cycle tightening (at most max_passes passes).
/// `cutoff` adds the objective row f0 <= cutoff when finite.
TightenStats tighten_bounds(const LiftedModel& m, BoundsState& b, double cutoff = kInf, int max_passes = 5);

}  // namespace sbc
