#include "drivesim/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "drivesim/errors.hpp"

namespace drivesim {

namespace {

void require_finite(const DynamicState& s, const char* what) {
  for (double v : s.as_array()) {
    if (!std::isfinite(v)) throw NonFiniteInput(what);
  }
}

void require_finite(std::span<const double> a, const char* what) {
  for (double v : a) {
    if (!std::isfinite(v)) throw NonFiniteInput(what);
  }
}

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive and finite");
}

// Semi-implicit bicycle update: speed first, pose with the new speed. Front axle at the
// geometric center, so the slip angle equals the steering angle.
std::array<double, 4> bicycle_raw(const AgentAttributes& attrs, const std::array<double, 4>& s,
                                  double steering, double accel, double dt) {
  const double v_next = s[3] + accel * dt;
  const double psi_next = s[2] + v_next * std::sin(steering) / attrs.rear_axis_offset * dt;
  const double course = s[2] + steering;
  return {s[0] + v_next * std::cos(course) * dt, s[1] + v_next * std::sin(course) * dt, psi_next,
          v_next};
}

std::array<double, 4> raw_step(const KinematicModel& model, const AgentAttributes& attrs,
                               const std::array<double, 4>& s, std::span<const double> a,
                               double dt) {
  switch (model.kind()) {
    case KinematicModel::Kind::Bicycle:
      return bicycle_raw(attrs, s, a[0], a[1], dt);
    case KinematicModel::Kind::Unconstrained:
      return {s[0] + a[0], s[1] + a[1], s[2] + a[2], s[3] + a[3]};
    case KinematicModel::Kind::Teleporting:
      return {a[0], a[1], a[2], a[3]};
  }
  return s;
}

}  // namespace

DynamicState DynamicState::from_array(std::span<const double> v) {
  if (v.size() != 4) throw DimensionMismatch(4, v.size());
  return {v[0], v[1], v[2], v[3]};
}

void validate_attributes(const AgentAttributes& a) {
  if (!(a.length > 0.0) || !(a.width > 0.0)) throw ConfigError("agent size must be positive");
  if (!(a.rear_axis_offset > 0.0) || !(a.rear_axis_offset < 0.5 * a.length)) {
    throw ConfigError("rear axis offset must lie in (0, length / 2)");
  }
}

KinematicModel KinematicModel::bicycle(BicycleLimits limits) {
  const bool ok = std::isfinite(limits.max_steering) && limits.max_steering > 0.0 &&
                  std::isfinite(limits.min_acceleration) &&
                  std::isfinite(limits.max_acceleration) &&
                  limits.min_acceleration <= limits.max_acceleration;
  if (!ok) throw ConfigError("bicycle limits must be finite and ordered");
  return KinematicModel(Kind::Bicycle, limits);
}

std::string_view to_string(KinematicModel::Kind k) {
  switch (k) {
    case KinematicModel::Kind::Bicycle: return "bicycle";
    case KinematicModel::Kind::Unconstrained: return "unconstrained";
    case KinematicModel::Kind::Teleporting: return "teleporting";
  }
  return "unknown";
}

DynamicState step(const KinematicModel& model, const AgentAttributes& attrs,
                  const DynamicState& s, std::span<const double> action, double dt,
                  bool* clipped) {
  if (action.size() != model.action_dim()) throw DimensionMismatch(model.action_dim(), action.size());
  require_dt(dt);
  require_finite(s, "state");
  require_finite(action, "action");
  if (clipped != nullptr) *clipped = false;

  if (model.kind() == KinematicModel::Kind::Bicycle) {
    const auto& lim = model.limits();
    const double steering = std::clamp(action[0], -lim.max_steering, lim.max_steering);
    const double accel = std::clamp(action[1], lim.min_acceleration, lim.max_acceleration);
    if (clipped != nullptr) *clipped = steering != action[0] || accel != action[1];
    const auto next = bicycle_raw(attrs, s.as_array(), steering, accel, dt);
    return DynamicState::from_array(next);
  }
  return DynamicState::from_array(raw_step(model, attrs, s.as_array(), action, dt));
}

Action fit_action(const KinematicModel& model, const AgentAttributes& attrs,
                  const DynamicState& current, const DynamicState& future, double dt) {
  require_dt(dt);
  require_finite(current, "current state");
  require_finite(future, "future state");
  switch (model.kind()) {
    case KinematicModel::Kind::Teleporting: {
      const auto f = future.as_array();
      return {f.begin(), f.end()};
    }
    case KinematicModel::Kind::Unconstrained:
      return {future.pose.x - current.pose.x, future.pose.y - current.pose.y,
              angle_diff(future.pose.psi(), current.pose.psi()), future.speed - current.speed};
    case KinematicModel::Kind::Bicycle: {
      const auto& lim = model.limits();
      const double accel =
          std::clamp((future.speed - current.speed) / dt, lim.min_acceleration, lim.max_acceleration);
      const double v_next = current.speed + accel * dt;
      double steering = 0.0;
      if (v_next != 0.0) {
        const double dpsi = angle_diff(future.pose.psi(), current.pose.psi());
        const double sin_delta = std::clamp(dpsi * attrs.rear_axis_offset / (v_next * dt), -1.0, 1.0);
        steering = std::clamp(std::asin(sin_delta), -lim.max_steering, lim.max_steering);
      }
      return {steering, accel};
    }
  }
  return {};
}

Jacobian analytic_jacobian(const KinematicModel& model, const AgentAttributes& attrs,
                           const DynamicState& s, std::span<const double> action, double dt) {
  if (action.size() != model.action_dim()) throw DimensionMismatch(model.action_dim(), action.size());
  require_dt(dt);
  if (model.kind() == KinematicModel::Kind::Teleporting) {
    throw ConfigError("jacobian check supports bicycle and unconstrained models only");
  }
  Jacobian j;
  j.cols = 4 + model.action_dim();
  j.data.assign(j.rows * j.cols, 0.0);
  auto at = [&j](std::size_t r, std::size_t c) -> double& { return j.data[r * j.cols + c]; };

  if (model.kind() == KinematicModel::Kind::Unconstrained) {
    for (std::size_t i = 0; i < 4; ++i) {
      at(i, i) = 1.0;
      at(i, 4 + i) = 1.0;
    }
    return j;
  }

  const double psi = s.pose.psi();
  const double delta = action[0];
  const double v_next = s.speed + action[1] * dt;
  const double lr = attrs.rear_axis_offset;
  const double cc = std::cos(psi + delta);
  const double sc = std::sin(psi + delta);
  // Columns: x, y, psi, v, steering, acceleration.
  at(0, 0) = 1.0;
  at(0, 2) = -v_next * sc * dt;
  at(0, 3) = cc * dt;
  at(0, 4) = -v_next * sc * dt;
  at(0, 5) = cc * dt * dt;
  at(1, 1) = 1.0;
  at(1, 2) = v_next * cc * dt;
  at(1, 3) = sc * dt;
  at(1, 4) = v_next * cc * dt;
  at(1, 5) = sc * dt * dt;
  at(2, 2) = 1.0;
  at(2, 3) = std::sin(delta) / lr * dt;
  at(2, 4) = v_next * std::cos(delta) / lr * dt;
  at(2, 5) = std::sin(delta) / lr * dt * dt;
  at(3, 3) = 1.0;
  at(3, 5) = dt;
  return j;
}

Jacobian numeric_jacobian(const KinematicModel& model, const AgentAttributes& attrs,
                          const DynamicState& s, std::span<const double> action, double dt,
                          double h) {
  if (action.size() != model.action_dim()) throw DimensionMismatch(model.action_dim(), action.size());
  Jacobian j;
  j.cols = 4 + model.action_dim();
  j.data.assign(j.rows * j.cols, 0.0);
  const auto base = s.as_array();
  const Action act(action.begin(), action.end());
  for (std::size_t c = 0; c < j.cols; ++c) {
    auto sp = base;
    auto sm = base;
    Action ap = act;
    Action am = act;
    if (c < 4) {
      sp[c] += h;
      sm[c] -= h;
    } else {
      ap[c - 4] += h;
      am[c - 4] -= h;
    }
    const auto fp = raw_step(model, attrs, sp, ap, dt);
    const auto fm = raw_step(model, attrs, sm, am, dt);
    for (std::size_t r = 0; r < 4; ++r) {
      const double diff = r == 2 ? angle_diff(fp[r], fm[r]) : fp[r] - fm[r];
      j.data[r * j.cols + c] = diff / (2.0 * h);
    }
  }
  return j;
}

double jacobian_check(const KinematicModel& model, const AgentAttributes& attrs,
                      const DynamicState& s, std::span<const double> action, double dt) {
  const Jacobian a = analytic_jacobian(model, attrs, s, action, dt);
  const Jacobian n = numeric_jacobian(model, attrs, s, action, dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - n.data[i]));
  return worst;
}

}  // namespace drivesim
