#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pk/dynamics.hpp"
#include "pk/rng.hpp"

using namespace pk;

namespace {

// minimal custom model for analytic checks: xdot = (x2, sin(psi * x1) + u)
class SinToyModel final : public PartialModel {
 public:
  SinToyModel()
      : PartialModel("sintoy", 2, 1, TimeKind::kContinuous, {},
                     ParamVector{{"psi"}, {0.0}, {true}}) {}

  std::unique_ptr<PartialModel> clone() const override {
    return std::make_unique<SinToyModel>(*this);
  }
  void eval_dynamics(std::span<const double> x, std::span<const double> u,
                     std::span<const double> psi, std::span<double> out) const override {
    impl<double>(x, u, psi, out);
  }
  void eval_dynamics(std::span<const Dual1> x, std::span<const Dual1> u,
                     std::span<const Dual1> psi, std::span<Dual1> out) const override {
    impl<Dual1>(x, u, psi, out);
  }
  void eval_dynamics(std::span<const Dual2> x, std::span<const Dual2> u,
                     std::span<const Dual2> psi, std::span<Dual2> out) const override {
    impl<Dual2>(x, u, psi, out);
  }

 private:
  template <class S>
  void impl(std::span<const S> x, std::span<const S> u, std::span<const S> psi,
            std::span<S> out) const {
    using std::sin;
    out[0] = x[1];
    out[1] = sin(psi[0] * x[0]) + u[0];
  }
};

Matrix fd_state_jacobian(const PartialModel& model, const Setpoint& sp, double h = 1e-6) {
  const int n = model.state_dim();
  Matrix j(n, n);
  for (int c = 0; c < n; ++c) {
    Vec xp = sp.x_d, xm = sp.x_d;
    xp[c] += h;
    xm[c] -= h;
    const Vec fp = eval_f(model, xp, sp.u_d);
    const Vec fm = eval_f(model, xm, sp.u_d);
    for (int r = 0; r < n; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

Matrix fd_control_jacobian(const PartialModel& model, const Setpoint& sp, double h = 1e-6) {
  const int n = model.state_dim();
  const int m = model.control_dim();
  Matrix j(n, m);
  for (int c = 0; c < m; ++c) {
    Vec up = sp.u_d, um = sp.u_d;
    up[c] += h;
    um[c] -= h;
    const Vec fp = eval_f(model, sp.x_d, up);
    const Vec fm = eval_f(model, sp.x_d, um);
    for (int r = 0; r < n; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

Setpoint random_setpoint(RngStream& rng, const PartialModel& model, double scale) {
  Setpoint sp;
  sp.x_d.resize(model.state_dim());
  sp.u_d.resize(model.control_dim());
  for (auto& v : sp.x_d) v = rng.uniform(-scale, scale);
  for (auto& v : sp.u_d) v = rng.uniform(-scale, scale);
  return sp;
}

}  // namespace

TEST_CASE("cartpole equilibrium and hand-substituted accelerations") {
  auto model = make_cartpole({}, {1.0, 0.1, 0.5});
  const Vec rest = eval_f(*model, {0.0, 0.0, 0.0, 0.0}, {0.0});
  for (double v : rest) CHECK(v == 0.0);

  // theta = 0, u = 1, m_p + m_c = 2 (Table-style hand substitution)
  auto model2 = make_cartpole({}, {1.5, 0.5, 0.5});
  const double mp = 0.5, total = 2.0, l = 0.5;
  const Vec f = eval_f(*model2, {0.0, 0.0, 0.0, 0.0}, {1.0});
  const double temp = 1.0 / total;
  const double theta_dd = (0.0 - temp) / (0.1 * (4.0 / 3.0 - mp / total));
  const double x_dd = temp - mp * l * theta_dd / total;
  CHECK(f[3] == doctest::Approx(theta_dd).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(x_dd).epsilon(1e-14));
}

TEST_CASE("cartpole matches the printed model for gym constants") {
  auto model = make_cartpole({{"g", 9.8}}, {1.0, 0.1, 0.5});
  RngStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double x1 = rng.uniform(-1, 1), th = rng.uniform(-0.3, 0.3);
    const double xd = rng.uniform(-1, 1), thd = rng.uniform(-1, 1);
    const double u = rng.uniform(-10, 10);
    const Vec f = eval_f(*model, {x1, xd, th, thd}, {u});
    const double mc = 1.0, mp = 0.1, l = 0.5, g = 9.8;
    const double temp = (u - mp * l * thd * thd * std::sin(th)) / (mp + mc);
    const double thdd = (g * std::sin(th) - std::cos(th) * temp) /
                        (0.1 * (4.0 / 3.0 - mp * std::cos(th) * std::cos(th) / (mp + mc)));
    const double xdd = temp - mp * l * thdd * std::cos(th) / (mp + mc);
    CHECK(f[0] == xd);
    CHECK(f[1] == doctest::Approx(xdd).epsilon(1e-13));
    CHECK(f[2] == thd);
    CHECK(f[3] == doctest::Approx(thdd).epsilon(1e-13));
  }
}

TEST_CASE("idp upright rest is an equilibrium") {
  auto model = make_idp({}, {1.0, 0.5, 0.5, 0.6, 0.6});
  const Vec f = eval_f(*model, Vec(6, 0.0), {0.0});
  for (double v : f) CHECK(v == 0.0);
}

TEST_CASE("idp mass matrix at upright is symmetric positive definite") {
  const double m0 = 1.0, m1 = 1.0, m2 = 1.0, l1 = 1.0, l2 = 1.0;
  const Matrix mm{{m0 + m1 + m2, 0.5 * m1 * l1 + m2 * l1, 0.5 * m2 * l2},
                  {0.5 * m1 * l1 + m2 * l1, m1 * l1 * l1 / 3.0 + m2 * l1 * l1,
                   0.5 * m2 * l1 * l2},
                  {0.5 * m2 * l2, 0.5 * m2 * l1 * l2, m2 * l2 * l2 / 3.0}};
  // manual Cholesky
  Matrix l(3, 3);
  bool ok = true;
  for (int i = 0; i < 3 && ok; ++i)
    for (int j = 0; j <= i && ok; ++j) {
      double s = mm(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        ok = s > 0.0;
        if (ok) l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  CHECK(ok);
}

TEST_CASE("unicycle kinematics at theta = 0") {
  auto model = make_unicycle({}, {1.0, 1.0});
  const Vec f = eval_f(*model, {0.0, 0.0, 0.0, 1.0, 0.0}, {0.0, 0.0});
  CHECK(f[0] == 1.0);  // xdot = v cos(theta)
  CHECK(f[1] == 0.0);  // ydot = v sin(theta)
}

TEST_CASE("sintoy linearization at the origin") {
  SinToyModel model;
  model.psi().values[0] = 1.0;  // xdot = (x2, sin(x1) + u)
  const Setpoint sp{{0.0, 0.0}, {0.0}};
  const auto lin = linearize(model, sp, 0.02);
  CHECK(lin.a(0, 0) == 0.0);
  CHECK(lin.a(0, 1) == 1.0);
  CHECK(lin.a(1, 0) == 1.0);  // cos(0)
  CHECK(lin.a(1, 1) == 0.0);
  CHECK(lin.b(0, 0) == 0.0);
  CHECK(lin.b(1, 0) == 1.0);
}

TEST_CASE("discretization identities") {
  SinToyModel model;  // a = 0 at psi = 0 in the (1,0) slot? use generic checks
  const Setpoint sp{{0.3, -0.2}, {0.1}};
  const double tau = 0.02;
  const auto lin = linearize(model, sp, tau);
  // bitwise Euler reproduction
  for (int i = 0; i < lin.a.rows(); ++i)
    for (int j = 0; j < lin.a.cols(); ++j) {
      const double expect = tau * lin.a(i, j) + (i == j ? 1.0 : 0.0);
      CHECK(lin.a_dis(i, j) == expect);
    }
  for (int i = 0; i < lin.b.rows(); ++i)
    for (int j = 0; j < lin.b.cols(); ++j) CHECK(lin.b_dis(i, j) == tau * lin.b(i, j));

  // discrete-time models pass through unchanged
  auto toy = make_lintoy({}, {1.2, 0.5});
  const auto dlin = linearize(*toy, Setpoint{{0.0}, {0.0}}, 0.0);
  CHECK(dlin.a_dis(0, 0) == 1.2);
  CHECK(dlin.b_dis(0, 0) == 0.5);
}

TEST_CASE("zero state matrix discretizes to the identity") {
  SinToyModel model;  // at psi=0: sin(0*x)=0 so a = [[0,1],[0,0]]; craft a=0 case directly
  auto toy = make_unicycle({}, {1.0, 1.0});
  const Setpoint sp{{0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0}};
  const auto lin = linearize(*toy, sp, 0.02);
  // at v = 0 the only nonzero native entries are (0,3)=1... a_dis diagonal is 1
  for (int i = 0; i < 5; ++i) CHECK(lin.a_dis(i, i) == 1.0);
}

TEST_CASE("dual jacobians match finite differences for built-in models") {
  RngStream rng(99);
  struct Case {
    std::unique_ptr<PartialModel> model;
    double scale;
  };
  std::vector<Case> cases;
  cases.push_back({make_cartpole({}, {1.0, 0.1, 0.5}), 0.5});
  cases.push_back({make_idp({}, {1.0, 0.5, 0.5, 0.6, 0.6}), 0.4});
  cases.push_back({make_unicycle({}, {0.85, 0.9}), 0.8});
  cases.push_back({make_lintoy({}, {1.2, 0.5}), 1.0});
  for (auto& c : cases) {
    for (int trial = 0; trial < 20; ++trial) {
      const Setpoint sp = random_setpoint(rng, *c.model, c.scale);
      const double tau = 0.02;
      const auto lin = linearize(*c.model, sp, tau);
      CHECK((lin.a - fd_state_jacobian(*c.model, sp)).max_abs() <= 1e-7);
      CHECK((lin.b - fd_control_jacobian(*c.model, sp)).max_abs() <= 1e-7);
    }
  }
}

TEST_CASE("parameter jacobians: analytic toy values") {
  // x' = a x + b u: dA/da = 1, dA/db = 0, dB/db = 1
  auto toy = make_lintoy({}, {1.2, 0.5});
  std::vector<Matrix> da, db;
  param_jacobians(*toy, Setpoint{{0.4}, {-0.3}}, da, db);
  CHECK(da[0](0, 0) == 1.0);
  CHECK(da[1](0, 0) == 0.0);
  CHECK(db[0](0, 0) == 0.0);
  CHECK(db[1](0, 0) == 1.0);

  // xdot2 = sin(psi x1) + u at psi = 0, x1 = 1: dA(1,0)/dpsi = cos(0)*1 = 1
  SinToyModel sintoy;
  std::vector<Matrix> da2, db2;
  param_jacobians(sintoy, Setpoint{{1.0, 0.0}, {0.0}}, da2, db2);
  CHECK(da2[0](1, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("parameter jacobians match finite differences over psi") {
  RngStream rng(123);
  std::vector<std::unique_ptr<PartialModel>> models;
  models.push_back(make_cartpole({}, {1.0, 0.1, 0.5}));
  models.push_back(make_idp({}, {1.0, 0.5, 0.5, 0.6, 0.6}));
  models.push_back(make_unicycle({}, {0.85, 0.9}));
  for (auto& model : models) {
    const Setpoint sp = random_setpoint(rng, *model, 0.3);
    std::vector<Matrix> da, db;
    param_jacobians(*model, sp, da, db);
    for (int k = 0; k < model->psi().size(); ++k) {
      const double h = 1e-6 * (1.0 + std::fabs(model->psi().values[k]));
      auto plus = model->clone();
      auto minus = model->clone();
      plus->psi().values[k] += h;
      minus->psi().values[k] -= h;
      const auto lp = linearize(*plus, sp, 0.02);
      const auto lm = linearize(*minus, sp, 0.02);
      const Matrix fd_a = (1.0 / (2.0 * h)) * (lp.a - lm.a);
      const Matrix fd_b = (1.0 / (2.0 * h)) * (lp.b - lm.b);
      CHECK((da[k] - fd_a).max_abs() <= 1e-6 * (1.0 + fd_a.max_abs()));
      CHECK((db[k] - fd_b).max_abs() <= 1e-6 * (1.0 + fd_b.max_abs()));
    }
  }
}

TEST_CASE("maker validation") {
  CHECK_THROWS_AS(make_cartpole({}, {0.0, 0.1, 0.5}), InvalidParameter);
  CHECK_THROWS_AS(make_idp({}, {1.0, -0.5, 0.5, 0.6, 0.6}), InvalidParameter);
  CHECK_THROWS_AS(make_unicycle({}, {1.0}), InvalidParameter);
  CHECK_THROWS_AS(make_model("nosuch", {}, {}), InvalidParameter);
  auto m = make_model("cartpole", {}, {});
  CHECK(m->psi().values == Vec{1.0, 0.1, 0.5});
  CHECK(m->psi().names[2] == "l");
}
