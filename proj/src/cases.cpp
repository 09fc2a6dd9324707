#include "hdgflow/cases.hpp"

#include <cmath>
#include <stdexcept>

#include "hdgflow/voigt.hpp"

namespace hdgflow {

Eigen::Vector3d AnalyticCase::exact_mixed(const Eigen::Vector2d& x) const {
  const Eigen::Matrix2d g = velocity_gradient(x);
  const Eigen::Vector3d e(g(0, 0), g(1, 1), g(0, 1) + g(1, 0));
  const double s2 = std::sqrt(2.0 * nu), s1 = std::sqrt(nu);
  return Eigen::Vector3d(-s2 * e(0), -s2 * e(1), -s1 * e(2));
}

Eigen::Vector2d AnalyticCase::traction(const Eigen::Vector2d& x, const Eigen::Vector2d& n,
                                       Regime regime) const {
  const Eigen::Matrix2d g = velocity_gradient(x);
  const Eigen::Matrix2d grad_s = 0.5 * (g + g.transpose());
  const double p = pressure(x);
  Eigen::Vector2d t = (2.0 * nu * grad_s - p * Eigen::Matrix2d::Identity()) * n;
  if (regime != Regime::stokes) {
    const Eigen::Vector2d u = velocity(x);
    t -= u.dot(n) * u;  // convective flux (a = u for these benchmarks)
  }
  return t;
}

std::vector<std::pair<FaceTag, BoundaryTagger>> AnalyticCase::default_taggers(
    bool all_dirichlet) const {
  if (all_dirichlet)
    return {{FaceTag::dirichlet, [](const Eigen::Vector2d&) { return true; }}};
  const double tol = 1e-12;
  if (name == "poiseuille") {
    const double xr = domain.x1;
    return {{FaceTag::outflow, [xr, tol](const Eigen::Vector2d& x) { return std::abs(x(0) - xr) < tol; }},
            {FaceTag::dirichlet, [xr, tol](const Eigen::Vector2d& x) { return std::abs(x(0) - xr) >= tol; }}};
  }
  const double yb = domain.y0;
  return {{FaceTag::neumann, [yb, tol](const Eigen::Vector2d& x) { return std::abs(x(1) - yb) < tol; }},
          {FaceTag::dirichlet, [yb, tol](const Eigen::Vector2d& x) { return std::abs(x(1) - yb) >= tol; }}};
}

StabilizationConfig AnalyticCase::default_stab(Regime regime) const {
  StabilizationConfig cfg;
  if (name == "wang") {
    cfg.kappa = 3.0;
    cfg.beta = 0.0;
  } else if (name == "kovasznay") {
    cfg.kappa = 10.0;
    cfg.beta = regime == Regime::navier_stokes ? 0.1 : 0.02;
  } else {
    cfg.kappa = 10.0;
    cfg.beta = 0.1;
  }
  return cfg;
}

ProblemData AnalyticCase::problem_data(Regime regime) const {
  ProblemData data;
  data.nu = nu;
  data.source = source;
  data.dirichlet = velocity;
  // Neumann faces of the shipped layouts lie on the bottom boundary.
  const AnalyticCase self = *this;
  data.traction = [self, regime](const Eigen::Vector2d& x) {
    return self.traction(x, Eigen::Vector2d(0.0, -1.0), regime);
  };
  return data;
}

FlowProblem AnalyticCase::make_problem(const Mesh& mesh, Regime regime) const {
  FlowProblem p;
  p.mesh = &mesh;
  p.data = problem_data(regime);
  p.regime = regime;
  p.stab = default_stab(regime);
  if (regime == Regime::oseen) p.convection = velocity;  // a = exact u
  return p;
}

AnalyticCase analytic_case(const std::string& name, const CaseParams& params) {
  AnalyticCase c;
  c.name = name;
  if (name == "wang") {
    const double a = params.a, b = params.b, lam = params.lambda;
    c.nu = params.nu_wang;
    c.domain = {0.0, 0.0, 1.0, 1.0};
    c.velocity = [a, b, lam](const Eigen::Vector2d& x) {
      const double E = std::exp(-lam * x(1));
      return Eigen::Vector2d(2.0 * a * x(1) - b * lam * std::cos(lam * x(0)) * E,
                             b * lam * std::sin(lam * x(0)) * E);
    };
    c.pressure = [](const Eigen::Vector2d&) { return 0.0; };
    c.velocity_gradient = [a, b, lam](const Eigen::Vector2d& x) {
      const double E = std::exp(-lam * x(1));
      const double s = std::sin(lam * x(0)), cs = std::cos(lam * x(0));
      Eigen::Matrix2d g;
      g(0, 0) = b * lam * lam * s * E;
      g(0, 1) = 2.0 * a + b * lam * lam * cs * E;
      g(1, 0) = b * lam * lam * cs * E;
      g(1, 1) = -b * lam * lam * s * E;
      return g;
    };
  } else if (name == "kovasznay") {
    const double Re = params.Re;
    c.nu = 1.0 / (2.0 * Re);
    c.domain = {0.0, 0.0, 1.0, 1.0};
    const double lam = Re / 2.0 - std::sqrt(Re * Re / 4.0 + 4.0 * M_PI * M_PI);
    const double C =
        (1.0 + std::exp(4.0 * lam) - (1.0 / (2.0 * lam)) * (1.0 - std::exp(4.0 * lam))) / 8.0;
    c.velocity = [lam](const Eigen::Vector2d& x) {
      const double E = std::exp(2.0 * lam * x(0));
      const double th = (4.0 * x(1) - 1.0) * M_PI;
      return Eigen::Vector2d(1.0 - E * std::cos(th), lam / (2.0 * M_PI) * E * std::sin(th));
    };
    c.pressure = [lam, C](const Eigen::Vector2d& x) {
      return -0.5 * std::exp(4.0 * lam * x(0)) + C;
    };
    c.velocity_gradient = [lam](const Eigen::Vector2d& x) {
      const double E = std::exp(2.0 * lam * x(0));
      const double th = (4.0 * x(1) - 1.0) * M_PI;
      const double s = std::sin(th), cs = std::cos(th);
      Eigen::Matrix2d g;
      g(0, 0) = -2.0 * lam * E * cs;
      g(0, 1) = 4.0 * M_PI * E * s;
      g(1, 0) = lam * lam / M_PI * E * s;
      g(1, 1) = 2.0 * lam * E * cs;
      return g;
    };
  } else if (name == "poiseuille") {
    const double V = params.V;
    c.nu = params.nu_poiseuille;
    c.domain = {0.0, 0.0, 10.0, 1.0};
    const double nu = c.nu;
    c.velocity = [V](const Eigen::Vector2d& x) {
      return Eigen::Vector2d(4.0 * V * x(1) * (1.0 - x(1)), 0.0);
    };
    c.pressure = [V, nu](const Eigen::Vector2d& x) { return -8.0 * nu * V * x(0) + 80.0 * nu * V; };
    c.velocity_gradient = [V](const Eigen::Vector2d& x) {
      Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
      g(0, 1) = 4.0 * V * (1.0 - 2.0 * x(1));
      return g;
    };
  } else {
    throw std::invalid_argument("analytic_case: unknown case " + name);
  }
  c.source = [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero().eval(); };
  return c;
}

}  // namespace hdgflow
