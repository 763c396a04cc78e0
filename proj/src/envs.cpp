#include "pk/envs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace pk {
namespace {

double opt_or(const EnvOptions& o, const std::string& key, double dflt) {
  auto it = o.overrides.find(key);
  return it == o.overrides.end() ? dflt : it->second;
}

double wrap_pi(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace

Vec rk4_step(const PartialModel& model, const Vec& x, const Vec& u, double h) {
  const int n = static_cast<int>(x.size());
  auto add_scaled = [n](const Vec& a, const Vec& b, double s) {
    Vec r(n);
    for (int i = 0; i < n; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const Vec k1 = eval_f(model, x, u);
  const Vec k2 = eval_f(model, add_scaled(x, k1, 0.5 * h), u);
  const Vec k3 = eval_f(model, add_scaled(x, k2, 0.5 * h), u);
  const Vec k4 = eval_f(model, add_scaled(x, k3, h), u);
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Env::Env(std::string task, EnvSpec spec, EnvOptions options)
    : task_(std::move(task)), spec_(std::move(spec)), options_(std::move(options)) {}

Vec Env::reset(RngStream& rng) {
  state_ = sample_initial_state(rng);
  steps_ = 0;
  noise_rng_ = RngStream(rng.next_u64());
  on_reset();
  return state_;
}

Vec Env::reset_preset(const std::string& name) {
  state_ = preset_initial_state(name);
  steps_ = 0;
  noise_rng_ = RngStream(0x9E3779B9u);  // presets are deterministic
  on_reset();
  return state_;
}

StepResult Env::step(const Vec& action) {
  if (static_cast<int>(action.size()) != spec_.act_dim)
    throw InvalidParameter("Env::step: action dimension mismatch");
  Vec a(action);
  for (int i = 0; i < spec_.act_dim; ++i)
    a[i] = std::clamp(a[i], spec_.act_low[i], spec_.act_high[i]);

  StepResult r;
  r.reward = reward_at(state_, a);
  state_ = integrate(state_, a);
  ++steps_;
  advance_reference();
  r.next_obs = state_;
  r.terminated = is_terminal(state_);
  r.truncated = !r.terminated && steps_ >= spec_.max_steps;
  return r;
}

namespace {

class CartpoleEnv final : public Env {
 public:
  explicit CartpoleEnv(const EnvOptions& options)
      : Env("cartpole",
            EnvSpec{4, 1, {-opt_or(options, "force_max", 10.0)},
                    {opt_or(options, "force_max", 10.0)}, opt_or(options, "dt", 0.02),
                    static_cast<int>(opt_or(options, "max_steps", 500))},
            options),
        x_threshold_(opt_or(options, "x_threshold", 2.4)),
        theta_threshold_(opt_or(options, "theta_threshold", 0.2095)),
        reset_range_(opt_or(options, "reset_range", 0.05)),
        model_(make_cartpole(options.overrides, true_psi("cartpole", options.overrides))) {}

  CartpoleEnv(const CartpoleEnv& o)
      : Env(o), x_threshold_(o.x_threshold_), theta_threshold_(o.theta_threshold_),
        reset_range_(o.reset_range_), model_(o.model_->clone()) {}

  ReferencePoint reference() const override {
    return ReferencePoint{Vec(4, 0.0), Vec(1, 0.0), 0.0};
  }
  std::unique_ptr<PartialModel> true_model() const override { return model_->clone(); }
  std::unique_ptr<PartialModel> policy_model(const Vec& psi) const override {
    return make_cartpole(options_.overrides,
                         psi.empty() ? true_psi("cartpole", options_.overrides) : psi);
  }

 protected:
  Vec sample_initial_state(RngStream& rng) override {
    Vec s(4);
    for (auto& v : s) v = rng.uniform(-reset_range_, reset_range_);
    return s;
  }
  Vec preset_initial_state(const std::string& name) override {
    if (name.empty() || name == "default") return Vec(4, 0.0);
    throw InvalidParameter("cartpole: unknown preset " + name);
  }
  Vec integrate(const Vec& s, const Vec& a) override {
    return rk4_step(*model_, s, a, spec_.dt);
  }
  double reward_at(const Vec&, const Vec&) const override {
    return 1.0;  // alive bonus, granted for every executed step
  }
  bool is_terminal(const Vec& s) const override {
    return std::fabs(s[0]) > x_threshold_ || std::fabs(s[2]) > theta_threshold_;
  }

 private:
  double x_threshold_;
  double theta_threshold_;
  double reset_range_;
  std::unique_ptr<PartialModel> model_;
};

class IdpEnv final : public Env {
 public:
  explicit IdpEnv(const EnvOptions& options)
      : Env("idp",
            EnvSpec{6, 1, {-1.0}, {1.0}, opt_or(options, "dt", 0.05),
                    static_cast<int>(opt_or(options, "max_steps", 1000))},
            options),
        y_threshold_(opt_or(options, "y_threshold", 1.0)),
        reset_vel_range_(opt_or(options, "reset_vel_range", 0.2)),
        model_(make_idp(options.overrides, true_psi("idp", options.overrides))),
        l1_(model_->psi().values[3]),
        l2_(model_->psi().values[4]) {}

  IdpEnv(const IdpEnv& o)
      : Env(o), y_threshold_(o.y_threshold_), reset_vel_range_(o.reset_vel_range_),
        model_(o.model_->clone()), l1_(o.l1_), l2_(o.l2_) {}

  ReferencePoint reference() const override {
    return ReferencePoint{Vec(6, 0.0), Vec(1, 0.0), 0.0};
  }
  std::unique_ptr<PartialModel> true_model() const override { return model_->clone(); }
  std::unique_ptr<PartialModel> policy_model(const Vec& psi) const override {
    return make_idp(options_.overrides, psi.empty() ? true_psi("idp", options_.overrides) : psi);
  }
  std::vector<std::string> preset_names() const override { return {"hard1", "hard2", "hard3"}; }

 protected:
  Vec sample_initial_state(RngStream& rng) override {
    Vec s(6, 0.0);
    s[1] = rng.uniform(-reset_vel_range_, reset_vel_range_);
    s[3] = rng.uniform(-reset_vel_range_, reset_vel_range_);
    s[5] = rng.uniform(-reset_vel_range_, reset_vel_range_);
    return s;
  }
  Vec preset_initial_state(const std::string& name) override {
    // hard-start velocity vectors (cart, lower joint, upper joint)
    Vec s(6, 0.0);
    if (name == "hard1") {
      s[1] = -0.13; s[3] = -0.13; s[5] = 0.17;
    } else if (name == "hard2") {
      s[1] = -0.11; s[3] = -0.13; s[5] = 0.17;
    } else if (name == "hard3") {
      s[1] = -0.13; s[3] = -0.13; s[5] = 0.18;
    } else if (!(name.empty() || name == "default")) {
      throw InvalidParameter("idp: unknown preset " + name);
    }
    return s;
  }
  Vec integrate(const Vec& s, const Vec& a) override {
    return rk4_step(*model_, s, a, spec_.dt);
  }
  double reward_at(const Vec& s, const Vec&) const override {
    const double x_tip = s[0] + l1_ * std::sin(s[2]) + l2_ * std::sin(s[4]);
    const double y_tip = l1_ * std::cos(s[2]) + l2_ * std::cos(s[4]);
    const double dy = y_tip - (l1_ + l2_);
    return -(x_tip * x_tip + 2.0 * dy * dy + 10.0 * s[3] * s[3] + 20.0 * s[5] * s[5]);
  }
  bool is_terminal(const Vec& s) const override {
    const double y_tip = l1_ * std::cos(s[2]) + l2_ * std::cos(s[4]);
    return y_tip <= y_threshold_;
  }

 private:
  double y_threshold_;
  double reset_vel_range_;
  std::unique_ptr<PartialModel> model_;
  double l1_, l2_;
};

class TrackingEnv final : public Env {
 public:
  explicit TrackingEnv(const EnvOptions& options)
      : Env("tracking",
            EnvSpec{5, 2,
                    {-opt_or(options, "dv_max", 0.1), -opt_or(options, "dw_max", 0.2)},
                    {opt_or(options, "dv_max", 0.1), opt_or(options, "dw_max", 0.2)},
                    opt_or(options, "dt", 0.1),
                    static_cast<int>(opt_or(options, "max_steps", 600))},
            options),
        amp_(opt_or(options, "path_amplitude", 0.8)),
        v_ref_(opt_or(options, "target_speed", 0.35)),
        ey_threshold_(opt_or(options, "ey_threshold", 1.5)),
        reset_offset_(opt_or(options, "reset_y_offset", 0.5)),
        reset_heading_(opt_or(options, "reset_heading_range", 0.4)),
        noise_level_(opt_or(options, "noise_level", 0.05)),
        model_(make_unicycle(options.overrides, true_psi("unicycle", options.overrides))) {}

  TrackingEnv(const TrackingEnv& o)
      : Env(o), amp_(o.amp_), v_ref_(o.v_ref_), ey_threshold_(o.ey_threshold_),
        reset_offset_(o.reset_offset_), reset_heading_(o.reset_heading_),
        noise_level_(o.noise_level_), model_(o.model_->clone()), x_ref_(o.x_ref_),
        progress_(o.progress_) {}

  ReferencePoint reference() const override {
    ReferencePoint ref;
    ref.progress = progress_;
    ref.x_d = {x_ref_, amp_ * std::sin(x_ref_), heading_at(x_ref_), v_ref_, omega_at(x_ref_)};
    // feedforward increments a nominal on-path vehicle would need
    const double x_next = advance_path(x_ref_, v_ref_ * spec_.dt);
    ref.u_d = {0.0, omega_at(x_next) - omega_at(x_ref_)};
    return ref;
  }
  std::unique_ptr<PartialModel> true_model() const override { return model_->clone(); }
  std::unique_ptr<PartialModel> policy_model(const Vec& psi) const override {
    Vec p = psi;
    if (p.empty()) p = {1.0, 1.0};  // nominal assumption; true gains model slippage
    std::map<std::string, double> c = options_.overrides;
    c["control_interval"] = spec_.dt;
    return make_unicycle(c, p);
  }
  std::vector<std::string> preset_names() const override { return {"upper", "lower"}; }

 protected:
  Vec sample_initial_state(RngStream& rng) override {
    Vec s(5, 0.0);
    s[1] = rng.uniform(-reset_offset_, reset_offset_);
    s[2] = rng.uniform(-reset_heading_, reset_heading_);
    return s;
  }
  Vec preset_initial_state(const std::string& name) override {
    Vec s(5, 0.0);
    if (name == "upper") {
      s[1] = reset_offset_;
    } else if (name == "lower") {
      s[1] = -reset_offset_;
    } else if (!(name.empty() || name == "default")) {
      throw InvalidParameter("tracking: unknown preset " + name);
    }
    return s;
  }
  Vec integrate(const Vec& s, const Vec& a) override {
    Vec act = a;
    if (options_.actuator_noise) {
      act[0] *= 1.0 + noise_rng_.uniform(-noise_level_, noise_level_);
      act[1] *= 1.0 + noise_rng_.uniform(-noise_level_, noise_level_);
    }
    return rk4_step(*model_, s, act, spec_.dt);
  }
  double reward_at(const Vec& s, const Vec&) const override {
    const double e_y = s[1] - amp_ * std::sin(s[0]);
    const double e_th = wrap_pi(s[2] - heading_at(s[0]));
    const double e_v = s[3] - v_ref_;
    return -(e_th * e_th + e_y * e_y + e_v * e_v);
  }
  bool is_terminal(const Vec& s) const override {
    return std::fabs(s[1] - amp_ * std::sin(s[0])) > ey_threshold_;
  }
  void advance_reference() override {
    x_ref_ = advance_path(x_ref_, v_ref_ * spec_.dt);
    progress_ += v_ref_ * spec_.dt;
  }
  void on_reset() override {
    x_ref_ = 0.0;
    progress_ = 0.0;
  }

 private:
  double heading_at(double x) const { return std::atan(amp_ * std::cos(x)); }
  double omega_at(double x) const {
    const double c = amp_ * std::cos(x);
    const double slope_rate = -amp_ * std::sin(x) / (1.0 + c * c);
    return v_ref_ * slope_rate / std::sqrt(1.0 + c * c);
  }
  /// Advance the path coordinate by arc length ds (4 sub-steps).
  double advance_path(double x, double ds) const {
    for (int i = 0; i < 4; ++i) {
      const double c = amp_ * std::cos(x);
      x += (ds / 4.0) / std::sqrt(1.0 + c * c);
    }
    return x;
  }

  double amp_, v_ref_, ey_threshold_, reset_offset_, reset_heading_, noise_level_;
  std::unique_ptr<PartialModel> model_;
  double x_ref_ = 0.0;
  double progress_ = 0.0;
};

class LintoyEnv final : public Env {
 public:
  explicit LintoyEnv(const EnvOptions& options)
      : Env("lintoy",
            EnvSpec{1, 1, {-opt_or(options, "u_max", 5.0)}, {opt_or(options, "u_max", 5.0)},
                    1.0, static_cast<int>(opt_or(options, "max_steps", 30))},
            options),
        u_weight_(opt_or(options, "u_weight", 0.1)),
        model_(make_lintoy(options.overrides, true_psi("lintoy", options.overrides))) {}

  LintoyEnv(const LintoyEnv& o) : Env(o), u_weight_(o.u_weight_), model_(o.model_->clone()) {}

  ReferencePoint reference() const override {
    return ReferencePoint{Vec(1, 0.0), Vec(1, 0.0), 0.0};
  }
  std::unique_ptr<PartialModel> true_model() const override { return model_->clone(); }
  std::unique_ptr<PartialModel> policy_model(const Vec& psi) const override {
    return make_lintoy(options_.overrides,
                       psi.empty() ? true_psi("lintoy", options_.overrides) : psi);
  }

 protected:
  Vec sample_initial_state(RngStream& rng) override { return {rng.uniform(-1.0, 1.0)}; }
  Vec preset_initial_state(const std::string& name) override {
    if (name.empty() || name == "default") return {1.0};
    throw InvalidParameter("lintoy: unknown preset " + name);
  }
  Vec integrate(const Vec& s, const Vec& a) override { return eval_f(*model_, s, a); }
  double reward_at(const Vec& s, const Vec& a) const override {
    return -(s[0] * s[0] + u_weight_ * a[0] * a[0]);
  }
  bool is_terminal(const Vec& s) const override { return std::fabs(s[0]) > 50.0; }

 private:
  double u_weight_;
  std::unique_ptr<PartialModel> model_;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& task, const EnvOptions& options) {
  if (task == "cartpole") return std::make_unique<CartpoleEnv>(options);
  if (task == "idp") return std::make_unique<IdpEnv>(options);
  if (task == "tracking") return std::make_unique<TrackingEnv>(options);
  if (task == "lintoy") return std::make_unique<LintoyEnv>(options);
  throw InvalidParameter("make_env: unknown task " + task);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, double dt) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  const int m = traj.actions.empty() ? 0 : static_cast<int>(traj.actions.front().size());
  out << "t";
  for (int i = 0; i < n; ++i) out << ",state_" << i;
  for (int i = 0; i < m; ++i) out << ",action_" << i;
  out << ",reward\n";
  char buf[64];
  for (size_t k = 0; k < traj.actions.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) * dt);
    out << buf;
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", traj.states[k][i]);
      out << buf;
    }
    for (int i = 0; i < m; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", traj.actions[k][i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g", traj.rewards[k]);
    out << buf << "\n";
  }
}

}  // namespace pk
