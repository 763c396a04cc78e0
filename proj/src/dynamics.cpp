#include "pk/dynamics.hpp"

#include <cmath>
#include <utility>

namespace pk {
namespace {

double constant_or(const std::map<std::string, double>& m, const std::string& key, double dflt) {
  auto it = m.find(key);
  return it == m.end() ? dflt : it->second;
}

void require_positive(const std::string& model, const std::string& name, double v) {
  if (!(v > 0.0))
    throw InvalidParameter(model + ": parameter " + name + " must be positive");
}

ParamVector make_psi(std::vector<std::string> names, Vec values) {
  ParamVector p;
  p.names = std::move(names);
  p.values = std::move(values);
  p.trainable.assign(p.values.size(), true);
  for (double v : p.values)
    if (!std::isfinite(v)) throw InvalidParameter("psi value not finite");
  return p;
}

/// Generates the three scalar-kind eval_dynamics overrides from one
/// templated dynamics<S> member of the derived model.
template <class Derived>
class ModelFacade : public PartialModel {
 public:
  using PartialModel::PartialModel;

  std::unique_ptr<PartialModel> clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }

  void eval_dynamics(std::span<const double> x, std::span<const double> u,
                     std::span<const double> psi, std::span<double> out) const override {
    static_cast<const Derived&>(*this).template dynamics<double>(x, u, psi, out);
  }
  void eval_dynamics(std::span<const Dual1> x, std::span<const Dual1> u,
                     std::span<const Dual1> psi, std::span<Dual1> out) const override {
    static_cast<const Derived&>(*this).template dynamics<Dual1>(x, u, psi, out);
  }
  void eval_dynamics(std::span<const Dual2> x, std::span<const Dual2> u,
                     std::span<const Dual2> psi, std::span<Dual2> out) const override {
    static_cast<const Derived&>(*this).template dynamics<Dual2>(x, u, psi, out);
  }
};

/// 3x3 linear solve by Cramer's rule over any dual-capable scalar. The IDP
/// mass matrix is well conditioned for positive masses and lengths.
template <class S>
void solve3(const S m[3][3], const S rhs[3], S out[3]) {
  auto det3 = [](const S a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const S det = det3(m);
  if (std::fabs(value(det)) < 1e-300) throw SingularMatrix("solve3: singular mass matrix");
  for (int col = 0; col < 3; ++col) {
    S rep[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) rep[i][j] = (j == col) ? rhs[i] : m[i][j];
    out[col] = det3(rep) / det;
  }
}

class CartpoleModel final : public ModelFacade<CartpoleModel> {
 public:
  CartpoleModel(std::map<std::string, double> constants, Vec psi)
      : ModelFacade("cartpole", 4, 1, TimeKind::kContinuous, constants,
                    make_psi({"m_c", "m_p", "l"}, psi)),
        g_(constant_or(constants, "g", 9.8)),
        denom_coeff_(constant_or(constants, "theta_denom", 0.1)) {
    require_positive("cartpole", "m_c", psi[0]);
    require_positive("cartpole", "m_p", psi[1]);
    require_positive("cartpole", "l", psi[2]);
    require_positive("cartpole", "g", g_);
    require_positive("cartpole", "theta_denom", denom_coeff_);
  }

  template <class S>
  void dynamics(std::span<const S> x, std::span<const S> u, std::span<const S> psi,
                std::span<S> out) const {
    using std::cos;
    using std::sin;
    const S& mc = psi[0];
    const S& mp = psi[1];
    const S& l = psi[2];
    const S sin_t = sin(x[2]);
    const S cos_t = cos(x[2]);
    const S total = mp + mc;
    const S temp = (u[0] - mp * l * x[3] * x[3] * sin_t) / total;
    const S theta_dd =
        (g_ * sin_t - cos_t * temp) / (denom_coeff_ * (4.0 / 3.0 - mp * cos_t * cos_t / total));
    const S x_dd = temp - mp * l * theta_dd * cos_t / total;
    out[0] = x[1];
    out[1] = x_dd;
    out[2] = x[3];
    out[3] = theta_dd;
  }

 private:
  double g_;
  double denom_coeff_;
};

class IdpModel final : public ModelFacade<IdpModel> {
 public:
  IdpModel(std::map<std::string, double> constants, Vec psi)
      : ModelFacade("idp", 6, 1, TimeKind::kContinuous, constants,
                    make_psi({"m0", "m1", "m2", "L1", "L2"}, psi)),
        g_(constant_or(constants, "g", 9.81)),
        gear_(constant_or(constants, "gear", 100.0)) {
    const char* names[] = {"m0", "m1", "m2", "L1", "L2"};
    for (int i = 0; i < 5; ++i) require_positive("idp", names[i], psi[i]);
    require_positive("idp", "g", g_);
    require_positive("idp", "gear", gear_);
  }

  template <class S>
  void dynamics(std::span<const S> x, std::span<const S> u, std::span<const S> psi,
                std::span<S> out) const {
    using std::cos;
    using std::sin;
    const S& m0 = psi[0];
    const S& m1 = psi[1];
    const S& m2 = psi[2];
    const S& l1 = psi[3];
    const S& l2 = psi[4];
    const S& w1 = x[3];
    const S& w2 = x[5];
    const S s1 = sin(x[2]);
    const S c1 = cos(x[2]);
    const S s2 = sin(x[4]);
    const S c2 = cos(x[4]);
    const S s12 = sin(x[2] - x[4]);
    const S c12 = cos(x[2] - x[4]);
    const S h1 = 0.5 * m1 * l1 + m2 * l1;
    const S force = gear_ * u[0];

    // mass matrix of (xdd, th1dd, th2dd) and the velocity/gravity right side
    S mm[3][3];
    mm[0][0] = m0 + m1 + m2;
    mm[0][1] = h1 * c1;
    mm[0][2] = 0.5 * m2 * l2 * c2;
    mm[1][0] = mm[0][1];
    mm[1][1] = 0.25 * m1 * l1 * l1 + m2 * l1 * l1 + m1 * l1 * l1 / 12.0;
    mm[1][2] = 0.5 * m2 * l1 * l2 * c12;
    mm[2][0] = mm[0][2];
    mm[2][1] = mm[1][2];
    mm[2][2] = 0.25 * m2 * l2 * l2 + m2 * l2 * l2 / 12.0;
    S rhs[3];
    rhs[0] = force + h1 * s1 * w1 * w1 + 0.5 * m2 * l2 * s2 * w2 * w2;
    rhs[1] = g_ * h1 * s1 - 0.5 * m2 * l1 * l2 * s12 * w2 * w2;
    rhs[2] = 0.5 * m2 * l1 * l2 * s12 * w1 * w1 + 0.5 * m2 * g_ * l2 * s2;

    S acc[3];
    solve3(mm, rhs, acc);
    out[0] = x[1];
    out[1] = acc[0];
    out[2] = w1;
    out[3] = acc[1];
    out[4] = w2;
    out[5] = acc[2];
  }

 private:
  double g_;
  double gear_;
};

class UnicycleModel final : public ModelFacade<UnicycleModel> {
 public:
  UnicycleModel(std::map<std::string, double> constants, Vec psi)
      : ModelFacade("unicycle", 5, 2, TimeKind::kContinuous, constants,
                    make_psi({"gain_v", "gain_w"}, psi)),
        interval_(constant_or(constants, "control_interval", 0.1)) {
    require_positive("unicycle", "gain_v", psi[0]);
    require_positive("unicycle", "gain_w", psi[1]);
    require_positive("unicycle", "control_interval", interval_);
  }

  template <class S>
  void dynamics(std::span<const S> x, std::span<const S> u, std::span<const S> psi,
                std::span<S> out) const {
    using std::cos;
    using std::sin;
    // actions are velocity increments per control interval
    out[0] = x[3] * cos(x[2]);
    out[1] = x[3] * sin(x[2]);
    out[2] = x[4];
    out[3] = psi[0] * u[0] / interval_;
    out[4] = psi[1] * u[1] / interval_;
  }

 private:
  double interval_;
};

class LintoyModel final : public ModelFacade<LintoyModel> {
 public:
  LintoyModel(std::map<std::string, double> constants, Vec psi)
      : ModelFacade("lintoy", 1, 1, TimeKind::kDiscrete, constants,
                    make_psi({"a", "b"}, psi)) {
    (void)constants;
    require_positive("lintoy", "a", psi[0]);
    require_positive("lintoy", "b", psi[1]);
  }

  template <class S>
  void dynamics(std::span<const S> x, std::span<const S> u, std::span<const S> psi,
                std::span<S> out) const {
    out[0] = psi[0] * x[0] + psi[1] * u[0];
  }
};

}  // namespace

PartialModel::PartialModel(std::string name, int state_dim, int control_dim, TimeKind kind,
                           std::map<std::string, double> constants, ParamVector psi)
    : name_(std::move(name)),
      state_dim_(state_dim),
      control_dim_(control_dim),
      time_kind_(kind),
      constants_(std::move(constants)),
      psi_(std::move(psi)) {}

Vec eval_f(const PartialModel& model, const Vec& x, const Vec& u) {
  if (static_cast<int>(x.size()) != model.state_dim() ||
      static_cast<int>(u.size()) != model.control_dim())
    throw InvalidParameter("eval_f: dimension mismatch");
  Vec out(model.state_dim(), 0.0);
  model.eval_dynamics(std::span<const double>(x), std::span<const double>(u),
                      std::span<const double>(model.psi().values), std::span<double>(out));
  for (double v : out)
    if (!std::isfinite(v)) throw InvalidParameter("eval_f: non-finite output");
  return out;
}

LinearizedSystem linearize(const PartialModel& model, const Setpoint& sp, double tau) {
  const int n = model.state_dim();
  const int m = model.control_dim();
  if (static_cast<int>(sp.x_d.size()) != n || static_cast<int>(sp.u_d.size()) != m)
    throw InvalidParameter("linearize: setpoint dimension mismatch");
  if (model.time_kind() == TimeKind::kContinuous && !(tau > 0.0))
    throw InvalidParameter("linearize: tau must be positive for continuous models");

  const int dirs = n + m;
  std::vector<Dual1> x(n), u(m), psi(model.psi().size()), out(n);
  for (int i = 0; i < n; ++i) x[i] = dual1_active(sp.x_d[i], i, dirs);
  for (int j = 0; j < m; ++j) u[j] = dual1_active(sp.u_d[j], n + j, dirs);
  for (int k = 0; k < model.psi().size(); ++k) psi[k] = Dual1(model.psi().values[k]);
  model.eval_dynamics(std::span<const Dual1>(x), std::span<const Dual1>(u),
                      std::span<const Dual1>(psi), std::span<Dual1>(out));

  LinearizedSystem lin;
  lin.tau = tau;
  lin.a = Matrix(n, n);
  lin.b = Matrix(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) lin.a(i, j) = out[i].d[j];
    for (int j = 0; j < m; ++j) lin.b(i, j) = out[i].d[n + j];
  }
  if (model.time_kind() == TimeKind::kContinuous) {
    lin.a_dis = Matrix(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lin.a_dis(i, j) = tau * lin.a(i, j) + (i == j ? 1.0 : 0.0);
    lin.b_dis = tau * lin.b;
  } else {
    lin.a_dis = lin.a;
    lin.b_dis = lin.b;
  }
  param_jacobians(model, sp, lin.da_dpsi, lin.db_dpsi);
  return lin;
}

void param_jacobians(const PartialModel& model, const Setpoint& sp,
                     std::vector<Matrix>& da_dpsi, std::vector<Matrix>& db_dpsi) {
  const int n = model.state_dim();
  const int m = model.control_dim();
  const int np = model.psi().size();
  const int dirs = n + m;

  std::vector<Dual2> x(n), u(m), psi(np), out(n);
  for (int i = 0; i < n; ++i) x[i] = dual2_inner(sp.x_d[i], i, dirs, np);
  for (int j = 0; j < m; ++j) u[j] = dual2_inner(sp.u_d[j], n + j, dirs, np);
  for (int k = 0; k < np; ++k) psi[k] = dual2_outer(model.psi().values[k], k, np);
  model.eval_dynamics(std::span<const Dual2>(x), std::span<const Dual2>(u),
                      std::span<const Dual2>(psi), std::span<Dual2>(out));

  da_dpsi.assign(np, Matrix(n, n));
  db_dpsi.assign(np, Matrix(n, m));
  for (int k = 0; k < np; ++k)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) da_dpsi[k](i, j) = out[i].d[k].d[j];
      for (int j = 0; j < m; ++j) db_dpsi[k](i, j) = out[i].d[k].d[n + j];
    }
}

std::unique_ptr<PartialModel> make_cartpole(const std::map<std::string, double>& constants,
                                            const Vec& psi) {
  if (psi.size() != 3) throw InvalidParameter("cartpole: psi must be (m_c, m_p, l)");
  return std::make_unique<CartpoleModel>(constants, psi);
}

std::unique_ptr<PartialModel> make_idp(const std::map<std::string, double>& constants,
                                       const Vec& psi) {
  if (psi.size() != 5) throw InvalidParameter("idp: psi must be (m0, m1, m2, L1, L2)");
  return std::make_unique<IdpModel>(constants, psi);
}

std::unique_ptr<PartialModel> make_unicycle(const std::map<std::string, double>& constants,
                                            const Vec& psi) {
  if (psi.size() != 2) throw InvalidParameter("unicycle: psi must be (gain_v, gain_w)");
  return std::make_unique<UnicycleModel>(constants, psi);
}

std::unique_ptr<PartialModel> make_lintoy(const std::map<std::string, double>& constants,
                                          const Vec& psi) {
  if (psi.size() != 2) throw InvalidParameter("lintoy: psi must be (a, b)");
  return std::make_unique<LintoyModel>(constants, psi);
}

Vec true_psi(const std::string& name, const std::map<std::string, double>& constants) {
  auto c = [&](const std::string& key, double dflt) { return constant_or(constants, key, dflt); };
  if (name == "cartpole")
    return {c("true_m_c", 1.0), c("true_m_p", 0.1), c("true_l", 0.5)};
  if (name == "idp")
    return {c("true_m0", 1.0), c("true_m1", 0.5), c("true_m2", 0.5), c("true_L1", 0.6),
            c("true_L2", 0.6)};
  if (name == "unicycle") return {c("true_gain_v", 0.85), c("true_gain_w", 0.9)};
  if (name == "lintoy") return {c("true_a", 1.2), c("true_b", 0.5)};
  throw InvalidParameter("true_psi: unknown model " + name);
}

std::unique_ptr<PartialModel> make_model(const std::string& name,
                                         const std::map<std::string, double>& constants,
                                         const Vec& psi) {
  const Vec p = psi.empty() ? true_psi(name, constants) : psi;
  if (name == "cartpole") return make_cartpole(constants, p);
  if (name == "idp") return make_idp(constants, p);
  if (name == "unicycle") return make_unicycle(constants, p);
  if (name == "lintoy") return make_lintoy(constants, p);
  throw InvalidParameter("make_model: unknown model " + name);
}

}  // namespace pk
