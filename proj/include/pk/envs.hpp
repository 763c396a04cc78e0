#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pk/dynamics.hpp"
#include "pk/matrix.hpp"
#include "pk/rng.hpp"

namespace pk {

struct EnvSpec {
  int obs_dim = 0;
  int act_dim = 0;
  Vec act_low;
  Vec act_high;
  double dt = 0.0;
  int max_steps = 0;
};

struct StepResult {
  Vec next_obs;
  double reward = 0.0;
  bool terminated = false;  // failure / absorbing state
  bool truncated = false;   // horizon
};

struct ReferencePoint {
  Vec x_d;
  Vec u_d;
  double progress = 0.0;  // arc parameter for tracking tasks
};

struct EnvOptions {
  std::map<std::string, double> overrides;  // physical constants, reset ranges
  bool actuator_noise = false;              // tracking only, off by default
};

/// Ground-truth simulation with RK4 integration. Rewards are evaluated at
/// the state the action was taken from; termination looks at the state the
/// step produced. The controller-side model uses Euler discretization, so an
/// integrator mismatch stands in for the unmodeled residual.
class Env {
 public:
  virtual ~Env() = default;

  const std::string& task() const { return task_; }
  const EnvSpec& spec() const { return spec_; }
  const Vec& state() const { return state_; }
  int steps() const { return steps_; }
  const EnvOptions& options() const { return options_; }

  /// Reset from the task's default initial-state distribution.
  Vec reset(RngStream& rng);

  /// Reset from a named preset (fixed initial state). Unknown name throws.
  Vec reset_preset(const std::string& name);

  StepResult step(const Vec& action);

  /// Current reference (setpoint for regulation, path point for tracking).
  virtual ReferencePoint reference() const = 0;

  /// Model with the environment's true physical parameters.
  virtual std::unique_ptr<PartialModel> true_model() const = 0;

  /// Same structure driven by a chosen psi (empty selects true values).
  virtual std::unique_ptr<PartialModel> policy_model(const Vec& psi) const = 0;

  virtual std::vector<std::string> preset_names() const { return {}; }

 protected:
  Env(std::string task, EnvSpec spec, EnvOptions options);

  virtual Vec sample_initial_state(RngStream& rng) = 0;
  virtual Vec preset_initial_state(const std::string& name) = 0;
  virtual Vec integrate(const Vec& state, const Vec& action) = 0;
  virtual double reward_at(const Vec& state, const Vec& action) const = 0;
  virtual bool is_terminal(const Vec& state) const = 0;
  /// Per-step bookkeeping after the state advanced (tracking progress).
  virtual void advance_reference() {}
  virtual void on_reset() {}

  std::string task_;
  EnvSpec spec_;
  EnvOptions options_;
  Vec state_;
  int steps_ = 0;
  RngStream noise_rng_{0};
};

std::unique_ptr<Env> make_env(const std::string& task, const EnvOptions& options);

/// One RK4 step of a continuous-time model under a zero-order-hold action.
Vec rk4_step(const PartialModel& model, const Vec& x, const Vec& u, double h);

/// Trajectory container used by evaluation and CSV export.
struct Trajectory {
  std::vector<Vec> states;   // includes the initial state
  std::vector<Vec> actions;  // clamped, as executed
  Vec rewards;
  std::vector<ReferencePoint> references;  // reference before each step
};

/// CSV columns: t, state..., action..., reward.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, double dt);

}  // namespace pk
