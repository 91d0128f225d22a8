#pragma once

#include <array>
#include <cmath>
#include <string>

#include "tjstab/errors.hpp"

namespace tjstab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt3 = 1.7320508075688772935;

// Machine tolerance for identities that should hold exactly (doubles with headroom).
inline constexpr double kExactTol = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {c * x, c * y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 rot90() const { return {-y, x}; }  // counterclockwise quarter turn
};

inline Vec2 unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// One interface of the double-junction system, sequential indexing 1..5:
// 1 = the flat middle leaf, 2/3 attach to junction 1, 4/5 to junction 2.
// kappa is the signed curvature in the local junction frame (the value the
// second fundamental form takes on the spine conormal).
struct Leaf {
  int id = 0;
  double kappa = 0.0;
  double length = 0.0;
  double s_spine = 0.0;      // parameter at the spine end
  double s_wall = 0.0;       // parameter at the outer-wall end
  double sigma_wall = 0.0;   // boundary second-fundamental-form value at the wall
};

struct PartitionConfig {
  double kappa = 0.0;  // arc curvature magnitude, > 0
  double l = 0.0;      // curved-leaf arc length
  double L = 0.0;      // flat-leaf length
  std::array<double, 3> gamma = {1.0, 1.0, 1.0};
  double l_star = 0.0;  // kappa * l
  double L_star = 0.0;  // kappa * L
  // Signed curvature per phase role (kappa_1, kappa_2, kappa_3). The default
  // orientation is (0, -kappa, +kappa); flipping the last two represents the
  // opposite (unstable-leaning) orientation.
  std::array<double, 3> signed_curvatures = {0.0, 0.0, 0.0};
  std::array<Leaf, 5> leaves = {};
};

// Boundary data of a variation at one spine point, split into the normal
// component f and conormal component h of each of the three leaves.
struct SpineTrace {
  double f1 = 0.0, h1 = 0.0;
  double f2 = 0.0, h2 = 0.0;
  double f3 = 0.0, h3 = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline PartitionConfig build_config(double kappa, double l, double L) {
  if (!(kappa > 0.0) || !(l > 0.0) || !(L > 0.0))
    throw DomainError("build_config: kappa, l, L must all be positive");
  if (!(kappa * l < kPi / 6.0))
    throw DomainError("build_config: kappa*l must be below pi/6 for this topology");
  PartitionConfig cfg;
  cfg.kappa = kappa;
  cfg.l = l;
  cfg.L = L;
  cfg.l_star = kappa * l;
  cfg.L_star = kappa * L;
  cfg.signed_curvatures = {0.0, -kappa, +kappa};
  // Phase role of leaf i: leaf 1 -> phase 1, leaves 2,4 -> phase 2, leaves 3,5 -> phase 3.
  const std::array<int, 5> phase_of = {0, 1, 2, 1, 2};
  for (int i = 0; i < 5; ++i) {
    Leaf& lf = cfg.leaves[i];
    lf.id = i + 1;
    lf.kappa = cfg.signed_curvatures[phase_of[i]];
    lf.length = (i == 0) ? L : l;
    lf.s_spine = 0.0;
    lf.s_wall = lf.length;
    lf.sigma_wall = 0.0;  // H1: the container wall is flat at the contacts
  }
  return cfg;
}

// Same lengths, opposite arc orientation (alpha changes sign).
inline PartitionConfig flipped_orientation(PartitionConfig cfg) {
  cfg.signed_curvatures = {0.0, +cfg.kappa, -cfg.kappa};
  for (int i = 1; i < 5; ++i) cfg.leaves[i].kappa = -cfg.leaves[i].kappa;
  return cfg;
}

inline int phase_of_leaf(int leaf_id) {
  switch (leaf_id) {
    case 1: return 1;
    case 2: case 4: return 2;
    case 3: case 5: return 3;
    default: throw DomainError("phase_of_leaf: leaf id out of range");
  }
}

// Images of the leaf-1 spine components under the 120-degree matching map:
//   f2 = -f1/2 - (sqrt3/2) h1,  h2 =  (sqrt3/2) f1 - h1/2,
//   f3 = -f1/2 + (sqrt3/2) h1,  h3 = -(sqrt3/2) f1 - h1/2.
inline SpineTrace spine_transform(double f1, double h1) {
  SpineTrace t;
  t.f1 = f1;
  t.h1 = h1;
  t.f2 = -0.5 * f1 - 0.5 * kSqrt3 * h1;
  t.h2 = 0.5 * kSqrt3 * f1 - 0.5 * h1;
  t.f3 = -0.5 * f1 + 0.5 * kSqrt3 * h1;
  t.h3 = -0.5 * kSqrt3 * f1 - 0.5 * h1;
  return t;
}

// Recover h1 from the three leaf traces (valid when f1+f2+f3 = 0).
inline double h1_from_traces(double f2, double f3) { return (f3 - f2) / kSqrt3; }

// Junction point-term coefficients. alpha = (sqrt3/4)(II_2 - II_3),
// beta = (3/4) II_1, where II_p is the second fundamental form of the
// phase-p leaf on its spine conormal. Identical at both junctions here.
inline std::array<double, 2> alpha_beta(const PartitionConfig& cfg, int junction) {
  if (junction != 1 && junction != 2)
    throw DomainError("alpha_beta: junction must be 1 or 2");
  const double II1 = cfg.signed_curvatures[0];
  const double II2 = cfg.signed_curvatures[1];
  const double II3 = cfg.signed_curvatures[2];
  return {kSqrt3 / 4.0 * (II2 - II3), 0.75 * II1};
}

// ---------------------------------------------------------------------------
// Junction frames and figure geometry
// ---------------------------------------------------------------------------

// Unit vectors of the three leaves at a spine point. t_p points from the
// junction into leaf p, nu_p = -t_p is the outward conormal, N_p completes
// the frame with the orientation that makes N_1 + N_2 + N_3 = 0.
struct JunctionFrame {
  Vec2 pos;
  std::array<Vec2, 3> tangent;   // by phase role 1,2,3
  std::array<Vec2, 3> conormal;  // nu_p = -t_p
  std::array<Vec2, 3> normal;
  double frame_sign = 1.0;  // +1: N_p = ccw rot90 of t_p, -1: cw
};

inline JunctionFrame junction_frame(const PartitionConfig& cfg, int junction) {
  if (junction != 1 && junction != 2)
    throw DomainError("junction_frame: junction must be 1 or 2");
  JunctionFrame fr;
  const bool j1 = (junction == 1);
  fr.pos = j1 ? Vec2{0.0, 0.0} : Vec2{cfg.L, 0.0};
  fr.frame_sign = j1 ? 1.0 : -1.0;
  const double base = j1 ? 0.0 : kPi;  // leaf-1 conormal direction is -base
  // Leaf 1 leaves junction 1 toward +x and junction 2 toward -x.
  fr.tangent[0] = unit_dir(j1 ? 0.0 : kPi);
  // The phase-2 leaf sits at -120 degrees from leaf 1 in the frame orientation.
  fr.tangent[1] = unit_dir(base + fr.frame_sign * (-2.0 * kPi / 3.0));
  fr.tangent[2] = unit_dir(base + fr.frame_sign * (+2.0 * kPi / 3.0));
  for (int p = 0; p < 3; ++p) {
    fr.conormal[p] = fr.tangent[p] * -1.0;
    fr.normal[p] = fr.tangent[p].rot90() * fr.frame_sign;
  }
  return fr;
}

inline Vec2 young_residual_from_conormals(const std::array<Vec2, 3>& nu,
                                          const std::array<double, 3>& gamma) {
  Vec2 r{0.0, 0.0};
  for (int p = 0; p < 3; ++p) r = r + nu[p] * gamma[p];
  return r;
}

// Residual of the first-variation force balance sum_p gamma_p nu_p at each junction.
inline std::array<Vec2, 2> young_residual(const PartitionConfig& cfg) {
  std::array<Vec2, 2> out;
  for (int j = 1; j <= 2; ++j) {
    const JunctionFrame fr = junction_frame(cfg, j);
    out[j - 1] = young_residual_from_conormals(fr.conormal, cfg.gamma);
  }
  return out;
}

// A constant-curvature planar segment: straight when kappa_ccw == 0.
// Parametrized by arc length from `start` with initial heading `theta0`;
// kappa_ccw is the curvature with respect to the counterclockwise normal.
struct ArcSegment {
  Vec2 start;
  double theta0 = 0.0;
  double kappa_ccw = 0.0;
  double length = 0.0;

  double heading_at(double s) const { return theta0 + kappa_ccw * s; }
  Vec2 tangent_at(double s) const { return unit_dir(heading_at(s)); }
  Vec2 point_at(double s) const {
    if (std::abs(kappa_ccw) < 1e-14) return start + unit_dir(theta0) * s;
    const double k = kappa_ccw;
    return {start.x + (std::sin(theta0 + k * s) - std::sin(theta0)) / k,
            start.y + (-std::cos(theta0 + k * s) + std::cos(theta0)) / k};
  }
  Vec2 end() const { return point_at(length); }
};

// The five leaves as drawable segments, ordered by leaf id.
inline std::array<ArcSegment, 5> leaf_segments(const PartitionConfig& cfg) {
  std::array<ArcSegment, 5> seg;
  const double k2 = cfg.signed_curvatures[1];
  const double k3 = cfg.signed_curvatures[2];
  seg[0] = {{0.0, 0.0}, 0.0, 0.0, cfg.L};
  // Junction-1 frame is counterclockwise, junction-2 frame clockwise, so the
  // frame-signed curvature maps to +/- the ccw curvature respectively.
  seg[1] = {{0.0, 0.0}, -2.0 * kPi / 3.0, k2, cfg.l};
  seg[2] = {{0.0, 0.0}, +2.0 * kPi / 3.0, k3, cfg.l};
  seg[3] = {{cfg.L, 0.0}, -kPi / 3.0, -k2, cfg.l};
  seg[4] = {{cfg.L, 0.0}, +kPi / 3.0, -k3, cfg.l};
  return seg;
}

}  // namespace tjstab
