#include "chebybal/contacts.hpp"

namespace chebybal {

void ContactLimits::validate(const std::string & contactId) const
{
  auto fail = [&](const std::string & what) {
    throw Error("contact '" + contactId + "': " + what);
  };
  if(!(mu > 0.0)) { fail("mu must be > 0"); }
  if(sigma_x < 0.0 || sigma_y < 0.0) { fail("sigma_x, sigma_y must be >= 0"); }
  if(fz_min < 0.0) { fail("fz_min must be >= 0"); }
  if(!(fz_max > fz_min)) { fail("fz_max must be > fz_min"); }
  if(tz_min > 0.0 || tz_max < 0.0) { fail("tz bounds must satisfy tz_min <= 0 <= tz_max"); }
}

void Contact::validate() const
{
  if(!isRotation(transform.rotation))
  {
    throw Error("contact '" + id + "': transform rotation is not orthonormal");
  }
  limits.validate(id);
  if(mode == ContactMode::Sliding)
  {
    if(!sliding)
    {
      throw Error("contact '" + id + "': sliding mode without sliding spec");
    }
    if(sliding->velocity_tangent.norm() == 0.0)
    {
      throw Error("contact '" + id + "': sliding requires nonzero tangential velocity");
    }
    if(!(sliding->mu_dynamic > 0.0))
    {
      throw Error("contact '" + id + "': mu_dynamic must be > 0");
    }
    if(sliding->fz_des < limits.fz_min || sliding->fz_des > limits.fz_max)
    {
      throw Error("contact '" + id + "': fz_des outside [fz_min, fz_max]");
    }
  }
}

EquilibriumBlock buildEquilibriumBlock(double mass, double g, const std::vector<Contact> & contacts)
{
  if(mass <= 0.0)
  {
    throw Error("buildEquilibriumBlock: mass must be positive");
  }
  int active = 0;
  for(const auto & c : contacts)
  {
    if(c.active()) { ++active; }
  }
  if(active == 0)
  {
    throw Error("buildEquilibriumBlock: no active contacts");
  }

  EquilibriumBlock blk;
  // Gravity enters as w^g = [f^g; c x f^g] with f^g = (0, 0, -m g); the
  // CoM-dependent part moves to the left-hand side, constants to b_g.
  Vec3 fg{0.0, 0.0, -mass * g};
  blk.A_g.setZero();
  blk.A_g.bottomRows<3>() = -crossMat(fg); // c x f^g == -[f^g]x c
  blk.b_g.setZero();
  blk.b_g.head<3>() = -fg;

  blk.A_c.resize(6, 6 * active);
  int k = 0;
  for(const auto & c : contacts)
  {
    if(!c.active()) { continue; }
    Mat6 Ac = Mat6::Identity();
    Ac.bottomLeftCorner<3, 3>() = crossMat(c.transform.origin);
    blk.A_c.middleCols<6>(6 * k) = Ac;
    ++k;
  }
  return blk;
}

SlidingEqualityBlock buildSlidingEquality(const Contact & contact)
{
  if(contact.mode != ContactMode::Sliding || !contact.sliding)
  {
    throw Error("buildSlidingEquality: contact '" + contact.id + "' is not sliding");
  }
  const SlidingSpec & spec = *contact.sliding;
  double vnorm = spec.velocity_tangent.norm();
  if(vnorm == 0.0)
  {
    throw Error("buildSlidingEquality: contact '" + contact.id + "' has zero tangential velocity");
  }
  Vec2 alpha = spec.velocity_tangent / vnorm;
  if(spec.sign == SignConvention::OpposeVelocity)
  {
    alpha = -alpha;
  }
  double mu_x = spec.mu_dynamic * alpha.x();
  double mu_y = spec.mu_dynamic * alpha.y();

  // C^-1 * K with C = [1 0 -mu_x; 0 1 -mu_y; 0 0 1], K = (0, 0, fz_des):
  // local force pinned on the friction cone surface.
  Vec3 f_local{mu_x * spec.fz_des, mu_y * spec.fz_des, spec.fz_des};

  SlidingEqualityBlock blk;
  blk.A_sl.setZero();
  blk.A_sl.leftCols<3>() = Mat3::Identity();
  blk.b_sl = contact.transform.rotation * f_local;
  return blk;
}

namespace {

// Rows act on the local wrench; returned rows act on the world decision
// wrench via right-multiplication with blockRotation(R^T).
InequalityBlock rotateRowsToWorld(const Contact & contact, const Eigen::MatrixXd & localRows,
                                  Eigen::VectorXd h, std::vector<std::string> labels)
{
  InequalityBlock blk;
  blk.rows = localRows * blockRotation(contact.transform.rotation.transpose());
  blk.h = std::move(h);
  blk.labels = std::move(labels);
  return blk;
}

} // namespace

InequalityBlock buildFixedInequalities(const Contact & contact)
{
  if(contact.mode != ContactMode::Fixed)
  {
    throw Error("buildFixedInequalities: contact '" + contact.id + "' is not fixed");
  }
  const ContactLimits & lim = contact.limits;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(12, 6);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(12);
  // f_x - mu f_z <= 0 and mirrored
  L(0, 0) = 1.0;  L(0, 2) = -lim.mu;
  L(1, 0) = -1.0; L(1, 2) = -lim.mu;
  L(2, 1) = 1.0;  L(2, 2) = -lim.mu;
  L(3, 1) = -1.0; L(3, 2) = -lim.mu;
  // fz_min <= f_z <= fz_max
  L(4, 2) = 1.0;  h(4) = lim.fz_max;
  L(5, 2) = -1.0; h(5) = -lim.fz_min;
  // tau_x bounded by the patch half-length along y and vice versa
  L(6, 3) = 1.0;  L(6, 2) = -lim.sigma_y;
  L(7, 3) = -1.0; L(7, 2) = -lim.sigma_y;
  L(8, 4) = 1.0;  L(8, 2) = -lim.sigma_x;
  L(9, 4) = -1.0; L(9, 2) = -lim.sigma_x;
  // tz_min <= tau_z <= tz_max
  L(10, 5) = 1.0;  h(10) = lim.tz_max;
  L(11, 5) = -1.0; h(11) = -lim.tz_min;

  const std::string & id = contact.id;
  std::vector<std::string> labels = {
      id + ":+fx<=mu*fz", id + ":-fx<=mu*fz", id + ":+fy<=mu*fz", id + ":-fy<=mu*fz",
      id + ":fz<=fz_max", id + ":fz>=fz_min", id + ":+tx<=sy*fz", id + ":-tx<=sy*fz",
      id + ":+ty<=sx*fz", id + ":-ty<=sx*fz", id + ":tz<=tz_max", id + ":tz>=tz_min"};
  return rotateRowsToWorld(contact, L, std::move(h), std::move(labels));
}

InequalityBlock buildSlidingInequalities(const Contact & contact)
{
  if(contact.mode != ContactMode::Sliding)
  {
    throw Error("buildSlidingInequalities: contact '" + contact.id + "' is not sliding");
  }
  const ContactLimits & lim = contact.limits;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(6, 6);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(6);
  L(0, 3) = 1.0;  L(0, 2) = -lim.sigma_y;
  L(1, 3) = -1.0; L(1, 2) = -lim.sigma_y;
  L(2, 4) = 1.0;  L(2, 2) = -lim.sigma_x;
  L(3, 4) = -1.0; L(3, 2) = -lim.sigma_x;
  L(4, 5) = 1.0;  h(4) = lim.tz_max;
  L(5, 5) = -1.0; h(5) = -lim.tz_min;

  const std::string & id = contact.id;
  std::vector<std::string> labels = {
      id + ":+tx<=sy*fz", id + ":-tx<=sy*fz", id + ":+ty<=sx*fz",
      id + ":-ty<=sx*fz", id + ":tz<=tz_max", id + ":tz>=tz_min"};
  return rotateRowsToWorld(contact, L, std::move(h), std::move(labels));
}

int ConstraintBlocks::indexOf(const std::string & id) const
{
  for(size_t k = 0; k < contact_ids.size(); ++k)
  {
    if(contact_ids[k] == id) { return static_cast<int>(k); }
  }
  return -1;
}

ConstraintBlocks assemble(double mass, double g, const std::vector<Contact> & contacts)
{
  std::vector<const Contact *> active;
  for(const auto & c : contacts)
  {
    c.validate();
    if(c.active()) { active.push_back(&c); }
  }
  if(active.empty())
  {
    throw Error("assemble: no active contacts");
  }

  ConstraintBlocks blocks;
  blocks.num_active = static_cast<int>(active.size());
  for(const auto * c : active)
  {
    blocks.contact_ids.push_back(c->id);
    if(c->mode == ContactMode::Sliding) { ++blocks.num_sliding; }
  }

  const int l = blocks.num_active;
  const int s = blocks.num_sliding;
  const int nY = 3 + 6 * l;

  EquilibriumBlock eq = buildEquilibriumBlock(mass, g, contacts);

  blocks.A_eq = Eigen::MatrixXd::Zero(6 + 3 * s, nY);
  blocks.b_eq = Eigen::VectorXd::Zero(6 + 3 * s);
  blocks.A_eq.topLeftCorner<6, 3>() = eq.A_g;
  blocks.A_eq.block(0, 3, 6, 6 * l) = eq.A_c;
  blocks.b_eq.head<6>() = eq.b_g;
  blocks.eq_labels = {"eq:force_x", "eq:force_y", "eq:force_z",
                      "eq:moment_x", "eq:moment_y", "eq:moment_z"};

  int eqRow = 6;
  int ineqRows = 0;
  for(const auto * c : active)
  {
    ineqRows += (c->mode == ContactMode::Sliding) ? 6 : 12;
  }
  blocks.G_ineq = Eigen::MatrixXd::Zero(ineqRows, nY);
  blocks.h_ineq = Eigen::VectorXd::Zero(ineqRows);

  int gRow = 0;
  for(int k = 0; k < l; ++k)
  {
    const Contact & c = *active[k];
    const int col = blocks.wrenchColumn(k);
    if(c.mode == ContactMode::Sliding)
    {
      SlidingEqualityBlock sl = buildSlidingEquality(c);
      blocks.A_eq.block(eqRow, col, 3, 6) = sl.A_sl;
      blocks.b_eq.segment<3>(eqRow) = sl.b_sl;
      blocks.eq_labels.push_back(c.id + ":slide_fx");
      blocks.eq_labels.push_back(c.id + ":slide_fy");
      blocks.eq_labels.push_back(c.id + ":slide_fz");
      eqRow += 3;

      InequalityBlock ineq = buildSlidingInequalities(c);
      blocks.G_ineq.block(gRow, col, 6, 6) = ineq.rows;
      blocks.h_ineq.segment(gRow, 6) = ineq.h;
      blocks.row_labels.insert(blocks.row_labels.end(), ineq.labels.begin(), ineq.labels.end());
      gRow += 6;
    }
    else
    {
      InequalityBlock ineq = buildFixedInequalities(c);
      blocks.G_ineq.block(gRow, col, 12, 6) = ineq.rows;
      blocks.h_ineq.segment(gRow, 12) = ineq.h;
      blocks.row_labels.insert(blocks.row_labels.end(), ineq.labels.begin(), ineq.labels.end());
      gRow += 12;
    }
  }
  return blocks;
}

} // namespace chebybal
