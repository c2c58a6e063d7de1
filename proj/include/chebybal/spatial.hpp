#pragma once

#include <Eigen/Dense>

#include <string>

#include "chebybal/errors.hpp"

namespace chebybal {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Orientational frame of a wrench: the world frame or the local frame of one
// contact patch. The application point is tracked by the caller.
struct Frame {
  static Frame world() { return Frame{true, ""}; }
  static Frame local(std::string contactId) { return Frame{false, std::move(contactId)}; }

  bool isWorld = true;
  std::string contactId;

  bool operator==(const Frame & other) const
  {
    return isWorld == other.isWorld && (isWorld || contactId == other.contactId);
  }
};

// 6-D force/torque pair. Forces in N, torques in N.m.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  Frame frame = Frame::world();

  Vec6 vector() const
  {
    Vec6 v;
    v << force, torque;
    return v;
  }

  Wrench operator+(const Wrench & other) const;
  Wrench operator-(const Wrench & other) const;
  Wrench operator*(double s) const;
};

// Pose of a contact's local frame: rotation local->world, origin in world (m).
struct WrenchTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 origin = Vec3::Zero();
};

// True when R'R = I and det R = 1 within tol.
bool isRotation(const Mat3 & R, double tol = 1e-10);

Mat3 rotationFromAxisAngle(const Vec3 & axis, double angle);

// Skew-symmetric matrix such that crossMat(v) * w == v.cross(w).
Mat3 crossMat(const Vec3 & v);

// Block-diagonal [R 0; 0 R] acting on wrench coordinates.
Mat6 blockRotation(const Mat3 & R);

// Maps a local-frame wrench to the world frame about the world origin:
// f' = R f, tau' = p x (R f) + R tau. Throws FrameError on a world input.
Wrench toWorld(const Wrench & w, const WrenchTransform & t);

// Inverse of toWorld; expects a world wrench about the origin.
Wrench toLocal(const Wrench & w, const WrenchTransform & t, const std::string & contactId);

// World-frame gravity wrench about the origin for a CoM at `com`.
// Convention: g > 0 and force = (0, 0, -mass*g), so contact normal forces
// come out positive. Throws on mass <= 0.
Wrench gravityWrench(double mass, double g, const Vec3 & com);

} // namespace chebybal
