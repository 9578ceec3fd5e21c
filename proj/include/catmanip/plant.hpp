#pragma once

#include <cstdint>
#include <vector>

#include "catmanip/cloud.hpp"
#include "catmanip/rng.hpp"
#include "catmanip/sdf.hpp"

namespace catmanip::catbc {

using attention::SdfScene;
using geom::PointCloud;
using geom::Pose;
using geom::Vec3;

// Pose tracker characteristics: isotropic translation noise, rotation noise
// about a random axis, and a fixed reporting delay in control ticks.
struct TrackerModel {
  double sigma_trans = 0.0;  // meters
  double sigma_rot = 0.0;    // radians
  int latency_ticks = 0;
  double rate_hz = 10.0;
};

// External poke applied at a fixed control tick (world-frame translation).
struct PushEvent {
  long tick = 0;
  Vec3 translation = Vec3::Zero();
};

struct DisturbanceModel {
  // In-gripper slip sampled once when the object is grasped.
  double grasp_slip_sigma_trans = 0.0;  // meters
  double grasp_slip_sigma_rot = 0.0;    // radians
  // Small slip applied on every tick whose motion ended in contact.
  double contact_slip_sigma_trans = 0.0;
  double contact_slip_sigma_rot = 0.0;
  std::vector<PushEvent> pushes;
};

// Quasi-static rigid object among static obstacles. Commanded motions are
// projected so the object never penetrates the scene: motion stops at first
// contact, the blocked normal component is discarded and the tangential
// remainder slides. All randomness (slip, pushes are scripted) comes from one
// per-run stream.
class Plant {
 public:
  static constexpr double kPenetrationTol = 1e-6;  // meters
  static constexpr double kSurfaceTol = 1e-7;      // binary search resolution

  Plant(SdfScene scene, PointCloud model, const Pose& initial_pose,
        std::uint64_t seed, DisturbanceModel disturbance = {});

  const Pose& true_pose() const { return pose_; }
  const SdfScene& scene() const { return scene_; }
  const PointCloud& model() const { return model_; }
  long tick() const { return tick_; }
  bool last_contact() const { return last_contact_; }
  double min_distance() const { return scene_.min_distance(model_, pose_); }
  Rng& rng() { return rng_; }

  // Draws the grasp slip once (right-multiplied: expressed in the object
  // frame) and returns it. No-op returning identity when both sigmas are 0.
  Pose apply_grasp_slip();

  // Advances one control tick toward `tentative`: contact-projected motion,
  // then scheduled pushes, then contact slip. Keeps min distance above
  // -kPenetrationTol always.
  void step_to(const Pose& tentative);

 private:
  double distance_at(const Pose& pose) const;
  Pose project_motion(const Pose& from, const Pose& to, bool& contact) const;
  bool resolve_penetration(Pose& pose) const;

  SdfScene scene_;
  PointCloud model_;
  Pose pose_;
  DisturbanceModel disturbance_;
  Rng rng_;
  long tick_ = 0;
  bool last_contact_ = false;
  bool slip_applied_ = false;
};

}  // namespace catmanip::catbc
