#include "chebybal/spatial.hpp"

namespace chebybal {

namespace {

void requireSameFrame(const Frame & a, const Frame & b)
{
  if(!(a == b))
  {
    throw FrameError("wrench arithmetic requires equal frame tags");
  }
}

} // namespace

Wrench Wrench::operator+(const Wrench & other) const
{
  requireSameFrame(frame, other.frame);
  return {force + other.force, torque + other.torque, frame};
}

Wrench Wrench::operator-(const Wrench & other) const
{
  requireSameFrame(frame, other.frame);
  return {force - other.force, torque - other.torque, frame};
}

Wrench Wrench::operator*(double s) const
{
  return {force * s, torque * s, frame};
}

bool isRotation(const Mat3 & R, double tol)
{
  return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol
         && std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 rotationFromAxisAngle(const Vec3 & axis, double angle)
{
  double n = axis.norm();
  if(n == 0.0)
  {
    if(angle == 0.0)
    {
      return Mat3::Identity();
    }
    throw Error("axis-angle rotation with zero axis and nonzero angle");
  }
  return Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
}

Mat3 crossMat(const Vec3 & v)
{
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Mat6 blockRotation(const Mat3 & R)
{
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = R;
  m.bottomRightCorner<3, 3>() = R;
  return m;
}

Wrench toWorld(const Wrench & w, const WrenchTransform & t)
{
  if(w.frame.isWorld)
  {
    throw FrameError("toWorld: wrench is already tagged World");
  }
  Vec3 f = t.rotation * w.force;
  Vec3 tau = t.origin.cross(f) + t.rotation * w.torque;
  return {f, tau, Frame::world()};
}

Wrench toLocal(const Wrench & w, const WrenchTransform & t, const std::string & contactId)
{
  if(!w.frame.isWorld)
  {
    throw FrameError("toLocal: wrench is not tagged World");
  }
  Vec3 f = t.rotation.transpose() * w.force;
  Vec3 tau = t.rotation.transpose() * (w.torque - t.origin.cross(w.force));
  return {f, tau, Frame::local(contactId)};
}

Wrench gravityWrench(double mass, double g, const Vec3 & com)
{
  if(mass <= 0.0)
  {
    throw Error("gravityWrench: mass must be positive");
  }
  Vec3 f{0.0, 0.0, -mass * g};
  return {f, com.cross(f), Frame::world()};
}

} // namespace chebybal
