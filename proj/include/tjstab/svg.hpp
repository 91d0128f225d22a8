#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tjstab/errors.hpp"
#include "tjstab/geometry.hpp"

namespace tjstab {

// One wall contact: where a leaf meets the container boundary.
struct WallContact {
  int leaf_id = 0;
  Vec2 point;
  Vec2 leaf_tangent;  // unit, pointing out of the domain interior
};

struct FigureGeometry {
  std::array<ArcSegment, 5> leaves;
  std::array<WallContact, 4> contacts;    // leaves 3, 5, 4, 2 in boundary order
  std::vector<ArcSegment> boundary;       // closed convex chain of blends
};

namespace detail {

// Circular blend from (p0, t0) to (p1, t1) with matching endpoint tangents.
// Falls back to a straight segment when the tangents line up with the chord.
inline ArcSegment circular_blend(Vec2 p0, Vec2 t0, Vec2 p1, Vec2 t1) {
  const Vec2 d = p1 - p0;
  const double cross_t = t0.cross(t1);
  if (std::abs(cross_t) < 1e-12 && std::abs(t0.cross(d)) < 1e-12 * d.norm()) {
    return {p0, std::atan2(t0.y, t0.x), 0.0, d.norm()};
  }
  Vec2 center;
  if (std::abs(cross_t) < 1e-12) {
    // Parallel tangents, offset chord: the blend is a half circle.
    center = {0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y)};
  } else {
    // Intersect the normal lines p0 + a*rot90(t0) and p1 + b*rot90(t1).
    const Vec2 n0 = t0.rot90();
    const Vec2 n1 = t1.rot90();
    const double det = -n0.cross(n1);
    const double a = (d.x * (-n1.y) - (-n1.x) * d.y) / det;
    center = p0 + n0 * a;
  }
  const double r = (p0 - center).norm();
  if (!(r > 0.0)) throw NumericalError("circular_blend: degenerate radius");
  const Vec2 u0 = (p0 - center) * (1.0 / r);
  const bool ccw = u0.rot90().dot(t0) > 0.0;
  const double ang0 = std::atan2(p0.y - center.y, p0.x - center.x);
  const double ang1 = std::atan2(p1.y - center.y, p1.x - center.x);
  double sweep = ccw ? ang1 - ang0 : ang0 - ang1;
  while (sweep < 0.0) sweep += 2.0 * kPi;
  while (sweep >= 2.0 * kPi) sweep -= 2.0 * kPi;
  ArcSegment arc;
  arc.start = p0;
  arc.theta0 = std::atan2(t0.y, t0.x);
  arc.kappa_ccw = (ccw ? 1.0 : -1.0) / r;
  arc.length = r * sweep;
  // The construction guarantees the start tangent; check the far end.
  const Vec2 te = arc.tangent_at(arc.length);
  if (std::abs(te.cross(t1)) > 1e-9 || te.dot(t1) < 0.0)
    throw NumericalError("circular_blend: end tangent mismatch");
  return arc;
}

}  // namespace detail

// Build the full figure: the five leaves plus a convex boundary chain that
// meets every wall contact orthogonally.
inline FigureGeometry figure_geometry(const PartitionConfig& cfg) {
  FigureGeometry fig;
  fig.leaves = leaf_segments(cfg);

  // Boundary order, counterclockwise: top-right (5), top-left (3),
  // bottom-left (2), bottom-right (4).
  const std::array<int, 4> order = {5, 3, 2, 4};
  for (int i = 0; i < 4; ++i) {
    const ArcSegment& seg = fig.leaves[order[i] - 1];
    fig.contacts[i] = {order[i], seg.end(), seg.tangent_at(seg.length)};
  }
  for (int i = 0; i < 4; ++i) {
    const WallContact& a = fig.contacts[i];
    const WallContact& b = fig.contacts[(i + 1) % 4];
    // Boundary tangent at a contact is the leaf tangent turned 90 degrees,
    // oriented along the counterclockwise traversal.
    const Vec2 ta = a.leaf_tangent.rot90();
    const Vec2 tb = b.leaf_tangent.rot90();
    fig.boundary.push_back(detail::circular_blend(a.point, ta, b.point, tb));
  }
  return fig;
}

namespace detail {

inline std::string svg_path(const ArcSegment& seg) {
  std::ostringstream os;
  os.precision(10);
  const Vec2 p0 = seg.start;
  const Vec2 p1 = seg.end();
  os << "M " << p0.x << " " << p0.y << " ";
  if (std::abs(seg.kappa_ccw) < 1e-14) {
    os << "L " << p1.x << " " << p1.y;
  } else {
    const double r = 1.0 / std::abs(seg.kappa_ccw);
    const int large = std::abs(seg.kappa_ccw) * seg.length > kPi ? 1 : 0;
    const int sweep = seg.kappa_ccw > 0.0 ? 1 : 0;  // y-up orientation
    os << "A " << r << " " << r << " 0 " << large << " " << sweep << " "
       << p1.x << " " << p1.y;
  }
  return os.str();
}

}  // namespace detail

inline void emit_geometry_svg(const PartitionConfig& cfg, const std::string& path) {
  const FigureGeometry fig = figure_geometry(cfg);

  // Bounding box over sampled boundary points.
  double xmin = 0.0, xmax = cfg.L, ymin = 0.0, ymax = 0.0;
  for (const ArcSegment& seg : fig.boundary) {
    for (int i = 0; i <= 32; ++i) {
      const Vec2 p = seg.point_at(seg.length * i / 32.0);
      xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
  }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
  xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;

  std::ostringstream os;
  os.precision(10);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << xmin << " "
     << -ymax << " " << (xmax - xmin) << " " << (ymax - ymin) << "\">\n";
  os << "  <!-- double triple-junction partition: kappa=" << cfg.kappa
     << " l=" << cfg.l << " L=" << cfg.L << " -->\n";
  os << "  <g transform=\"scale(1,-1)\" fill=\"none\" stroke-linecap=\"round\">\n";
  const double w = 0.006 * std::max(xmax - xmin, ymax - ymin);
  for (const ArcSegment& seg : fig.boundary)
    os << "    <path d=\"" << detail::svg_path(seg)
       << "\" stroke=\"#444444\" stroke-width=\"" << w << "\"/>\n";
  for (int i = 0; i < 5; ++i)
    os << "    <path d=\"" << detail::svg_path(fig.leaves[i])
       << "\" stroke=\"" << (i == 0 ? "#c03030" : "#1f5fbf")
       << "\" stroke-width=\"" << w << "\"/>\n";
  for (const Vec2 p : {Vec2{0.0, 0.0}, Vec2{cfg.L, 0.0}})
    os << "    <circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"" << 1.2 * w
       << "\" fill=\"#000000\"/>\n";
  os << "  </g>\n</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("emit_geometry_svg: cannot open " + path);
  out << os.str();
  out.flush();
  if (!out) throw IOError("emit_geometry_svg: write failed for " + path);
}

}  // namespace tjstab
