#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pk/dual.hpp"
#include "pk/matrix.hpp"

namespace pk {

enum class TimeKind { kContinuous, kDiscrete };

/// Named trainable parameters (psi). Known constants never live here.
struct ParamVector {
  std::vector<std::string> names;
  Vec values;
  std::vector<bool> trainable;  // always true for psi entries

  int size() const { return static_cast<int>(values.size()); }
};

struct Setpoint {
  Vec x_d;
  Vec u_d;
};

/// Linearization of a partial model about a setpoint, together with its
/// Euler discretization and the parameter Jacobians of the native-time
/// coefficient matrices.
struct LinearizedSystem {
  Matrix a;      // d f / d x at the setpoint (native time)
  Matrix b;      // d f / d u at the setpoint
  Matrix a_dis;  // tau * a + I for continuous models, a otherwise
  Matrix b_dis;  // tau * b for continuous models, b otherwise
  double tau = 0.0;
  std::vector<Matrix> da_dpsi;  // per psi entry, native-time
  std::vector<Matrix> db_dpsi;
};

/// Parametric dynamics with fixed known constants and trainable unknowns.
/// The dynamics expression is evaluated over plain doubles, first-order
/// duals (linearization) and nested duals (parameter Jacobians); gradients
/// can only flow through psi because known constants enter as doubles.
class PartialModel {
 public:
  virtual ~PartialModel() = default;

  const std::string& name() const { return name_; }
  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }
  TimeKind time_kind() const { return time_kind_; }
  ParamVector& psi() { return psi_; }
  const ParamVector& psi() const { return psi_; }
  const std::map<std::string, double>& known_constants() const { return constants_; }

  virtual std::unique_ptr<PartialModel> clone() const = 0;

  virtual void eval_dynamics(std::span<const double> x, std::span<const double> u,
                             std::span<const double> psi, std::span<double> out) const = 0;
  virtual void eval_dynamics(std::span<const Dual1> x, std::span<const Dual1> u,
                             std::span<const Dual1> psi, std::span<Dual1> out) const = 0;
  virtual void eval_dynamics(std::span<const Dual2> x, std::span<const Dual2> u,
                             std::span<const Dual2> psi, std::span<Dual2> out) const = 0;

 protected:
  PartialModel(std::string name, int state_dim, int control_dim, TimeKind kind,
               std::map<std::string, double> constants, ParamVector psi);

 private:
  std::string name_;
  int state_dim_;
  int control_dim_;
  TimeKind time_kind_;
  std::map<std::string, double> constants_;
  ParamVector psi_;
};

/// State derivative (continuous) or next state (discrete) at (x, u) with the
/// model's current psi.
Vec eval_f(const PartialModel& model, const Vec& x, const Vec& u);

/// Exact Jacobians at the setpoint via first-order duals plus the Euler
/// discretization; parameter Jacobians are filled via nested duals.
LinearizedSystem linearize(const PartialModel& model, const Setpoint& sp, double tau);

/// Mixed second derivatives d/dpsi_j of the state and control Jacobians,
/// computed with one nested-dual sweep (outer: psi, inner: state/control).
void param_jacobians(const PartialModel& model, const Setpoint& sp,
                     std::vector<Matrix>& da_dpsi, std::vector<Matrix>& db_dpsi);

// Built-in models. Constants not present in `constants` take the documented
// defaults; psi order is part of the interface.
//   cartpole: state (x, xdot, theta, thetadot), psi = (m_c, m_p, l)
//   idp:      state (x, xdot, th1, th1dot, th2, th2dot), psi = (m0, m1, m2, L1, L2)
//   unicycle: state (x, y, theta, v, omega), psi = (gain_v, gain_w)
//   lintoy:   discrete scalar x' = a x + b u, psi = (a, b)
std::unique_ptr<PartialModel> make_cartpole(const std::map<std::string, double>& constants,
                                            const Vec& psi);
std::unique_ptr<PartialModel> make_idp(const std::map<std::string, double>& constants,
                                       const Vec& psi);
std::unique_ptr<PartialModel> make_unicycle(const std::map<std::string, double>& constants,
                                            const Vec& psi);
std::unique_ptr<PartialModel> make_lintoy(const std::map<std::string, double>& constants,
                                          const Vec& psi);

/// Factory by model name; empty psi selects the true-physics defaults.
std::unique_ptr<PartialModel> make_model(const std::string& name,
                                         const std::map<std::string, double>& constants,
                                         const Vec& psi);

/// True-physics psi defaults for a built-in model.
Vec true_psi(const std::string& name, const std::map<std::string, double>& constants);

}  // namespace pk
