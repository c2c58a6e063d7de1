#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chebybal/spatial.hpp"

namespace chebybal {

// Friction and center-of-pressure limits of one contact patch, local frame.
struct ContactLimits {
  double mu = 0.7;       // friction bound, > 0
  double sigma_x = 0.05; // patch half-length along local x (m), >= 0
  double sigma_y = 0.05; // patch half-length along local y (m), >= 0
  double fz_min = 0.0;   // N, >= 0
  double fz_max = 1000.0; // N, > fz_min
  double tz_min = -10.0; // N.m, <= 0
  double tz_max = 10.0;  // N.m, >= 0

  void validate(const std::string & contactId) const;
};

// Direction convention for the tangential sliding force.
// PaperRaw pins f_tan along the sliding velocity; OpposeVelocity (the
// physical Coulomb direction for the robot's own motion) negates it.
enum class SignConvention { PaperRaw, OpposeVelocity };

struct SlidingSpec {
  Vec2 velocity_tangent = Vec2::Zero(); // m/s in the local contact plane, nonzero
  double mu_dynamic = 0.4;              // > 0
  double fz_des = 0.0;                  // desired normal force, N
  SignConvention sign = SignConvention::OpposeVelocity;
};

enum class ContactMode { Fixed, Sliding, Inactive };

struct Contact {
  std::string id;
  WrenchTransform transform;
  ContactMode mode = ContactMode::Fixed;
  std::optional<SlidingSpec> sliding; // set iff mode == Sliding
  ContactLimits limits;

  bool active() const { return mode != ContactMode::Inactive; }
  void validate() const;
};

// Equality block of the static equilibrium: A_g*c + sum_i A_c,i*W_i = b_g,
// decision wrenches W_i in world frame about their contact point.
struct EquilibriumBlock {
  Eigen::Matrix<double, 6, 3> A_g;
  Vec6 b_g;
  Eigen::MatrixXd A_c; // 6 x 6l, [A_c,1 ... A_c,l]
};

struct SlidingEqualityBlock {
  Eigen::Matrix<double, 3, 6> A_sl; // selects the world force of the wrench
  Vec3 b_sl;
};

struct InequalityBlock {
  Eigen::MatrixXd rows; // world-frame rows, one contact's 6 wrench columns
  Eigen::VectorXd h;
  std::vector<std::string> labels;
};

// Stacked constraint set over Y = [com(3), W_1..W_l(6 each)], active
// contacts in declaration order. Inactive contacts contribute nothing.
struct ConstraintBlocks {
  Eigen::MatrixXd A_eq;  // (6 + 3s) x (3 + 6l)
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd G_ineq; // (12 per fixed + 6 per sliding) x (3 + 6l)
  Eigen::VectorXd h_ineq;
  std::vector<std::string> row_labels; // per G row
  std::vector<std::string> eq_labels;  // per A row
  std::vector<std::string> contact_ids; // active contacts, column order
  int num_active = 0;
  int num_sliding = 0;

  int numVars() const { return 3 + 6 * num_active; }
  // Column of contact `k` (index into contact_ids) within Y.
  int wrenchColumn(int k) const { return 3 + 6 * k; }
  int indexOf(const std::string & id) const; // -1 when absent
};

EquilibriumBlock buildEquilibriumBlock(double mass, double g, const std::vector<Contact> & contacts);

SlidingEqualityBlock buildSlidingEquality(const Contact & contact);

// 12 rows realizing the two-sided slip/tilt conditions in the local frame,
// right-multiplied by the world->local rotation:
//   +-f_x <= mu f_z, +-f_y <= mu f_z, fz_min <= f_z <= fz_max,
//   +-tau_x <= sigma_y f_z, +-tau_y <= sigma_x f_z, tz_min <= tau_z <= tz_max
InequalityBlock buildFixedInequalities(const Contact & contact);

// Torque rows only; sliding forces are pinned by the equality block.
InequalityBlock buildSlidingInequalities(const Contact & contact);

ConstraintBlocks assemble(double mass, double g, const std::vector<Contact> & contacts);

} // namespace chebybal
