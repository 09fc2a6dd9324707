#include "hdgflow/verification.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hdgflow {

ErrorReport compute_errors(const Solution& sol, const PostprocessedField* star,
                           const AnalyticCase& exact, const Mesh& mesh,
                           bool mean_adjust_pressure) {
  const int k = mesh.degree;
  const ReferenceElement re = reference_element(mesh.elem_type, k);
  const QuadratureRule rule = quadrature_rule(mesh.elem_type, 2 * (k + 1) + 2);
  const Eigen::MatrixXd N = re.eval(rule.points);
  const ReferenceElement re_s =
      star ? reference_element(mesh.elem_type, star->degree) : ReferenceElement{};
  const Eigen::MatrixXd Ns = star ? re_s.eval(rule.points) : Eigen::MatrixXd();
  const Eigen::MatrixXd lattice = reference_lattice(mesh.elem_type, k + 3);
  const Eigen::MatrixXd Nlat = re.eval(lattice);

  double num_u = 0, den_u = 0, num_s = 0, num_L = 0, den_L = 0;
  double linf = 0.0;
  double p_diff_int = 0, area = 0;  // for the mean adjustment
  double num_p = 0, den_p = 0;

  // Two passes when the pressure gauge needs adjusting: first the mean of
  // (p_h - p_exact), then the norms.
  std::vector<MappedGeometry> geos;
  geos.reserve(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e)
    geos.push_back(map_element(mesh.element_coords(e), re, rule.points));

  if (mean_adjust_pressure) {
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const MappedGeometry& geo = geos[e];
      for (Eigen::Index g = 0; g < rule.weights.size(); ++g) {
        const double dV = geo.detJ(g) * rule.weights(g);
        double ph = 0;
        for (int j = 0; j < re.nen; ++j) ph += N(g, j) * sol.p[e](j);
        p_diff_int += (ph - exact.pressure(geo.x.row(g).transpose())) * dV;
        area += dV;
      }
    }
  }
  const double shift = mean_adjust_pressure && area > 0 ? p_diff_int / area : 0.0;

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const MappedGeometry& geo = geos[e];
    for (Eigen::Index g = 0; g < rule.weights.size(); ++g) {
      const double dV = geo.detJ(g) * rule.weights(g);
      const Eigen::Vector2d x = geo.x.row(g).transpose();
      Eigen::Vector2d uh = Eigen::Vector2d::Zero();
      Eigen::Vector3d Lh = Eigen::Vector3d::Zero();
      double ph = 0;
      for (int j = 0; j < re.nen; ++j) {
        uh += N(g, j) * sol.u[e].segment<2>(2 * j);
        Lh += N(g, j) * sol.L[e].segment<3>(3 * j);
        ph += N(g, j) * sol.p[e](j);
      }
      const Eigen::Vector2d ue = exact.velocity(x);
      const Eigen::Vector3d Le = exact.exact_mixed(x);
      const double pe = exact.pressure(x);
      num_u += (uh - ue).squaredNorm() * dV;
      den_u += ue.squaredNorm() * dV;
      num_L += (Lh - Le).squaredNorm() * dV;
      den_L += Le.squaredNorm() * dV;
      num_p += (ph - shift - pe) * (ph - shift - pe) * dV;
      den_p += pe * pe * dV;
      if (star) {
        Eigen::Vector2d us = Eigen::Vector2d::Zero();
        for (int j = 0; j < re_s.nen; ++j) us += Ns(g, j) * star->u_star[e].segment<2>(2 * j);
        num_s += (us - ue).squaredNorm() * dV;
      }
    }
    // Linf on the sample lattice
    const MappedGeometry lat = map_element(mesh.element_coords(e), re, lattice);
    for (Eigen::Index q = 0; q < lattice.rows(); ++q) {
      Eigen::Vector2d uh = Eigen::Vector2d::Zero();
      for (int j = 0; j < re.nen; ++j) uh += Nlat(q, j) * sol.u[e].segment<2>(2 * j);
      const Eigen::Vector2d ue = exact.velocity(lat.x.row(q).transpose());
      linf = std::max(linf, (uh - ue).cwiseAbs().maxCoeff());
    }
  }

  const auto rel = [](double num, double den) {
    return den > 1e-28 ? std::sqrt(num / den) : std::sqrt(num);
  };
  ErrorReport rep;
  rep.u = rel(num_u, den_u);
  rep.L = rel(num_L, den_L);
  rep.p = rel(num_p, den_p);
  rep.ustar = star ? rel(num_s, den_u) : 0.0;
  rep.linf_u = linf;
  rep.pressure_shift = shift;
  return rep;
}

double fit_rate(const std::vector<double>& h, const std::vector<double>& err, int npts) {
  if (h.size() != err.size() || static_cast<int>(h.size()) < npts || npts < 2)
    throw std::invalid_argument("fit_rate: need at least npts matching samples");
  const size_t n0 = h.size() - static_cast<size_t>(npts);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = n0; i < h.size(); ++i) {
    const double X = std::log(h[i]);
    const double Y = std::log(std::max(err[i], 1e-300));
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  const double n = static_cast<double>(npts);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int mesh_resolution(ElemType elem_type, int level) {
  const int base = elem_type == ElemType::simplex ? 2 : 4;
  return base << level;
}

double mesh_h(const AnalyticCase& c, ElemType elem_type, int level) {
  const int nx = mesh_resolution(elem_type, level);
  const double hx = (c.domain.x1 - c.domain.x0) / nx;
  const double hy = (c.domain.y1 - c.domain.y0) / nx;
  return std::sqrt(hx * hx + hy * hy);
}

Mesh case_mesh(const AnalyticCase& c, ElemType elem_type, int level, int k, bool all_dirichlet) {
  const int nx = mesh_resolution(elem_type, level);
  Mesh mesh = structured_mesh(c.domain, nx, nx, elem_type, k);
  classify_boundary(mesh, c.default_taggers(all_dirichlet));
  return mesh;
}

ConvergenceTable convergence_study(const AnalyticCase& c, Regime regime,
                                   const std::vector<int>& degrees, int n_meshes,
                                   ElemType elem_type, int threads,
                                   const NewtonConfig& newton) {
  if (n_meshes < 3) throw std::invalid_argument("convergence_study: at least 3 meshes required");
  ConvergenceTable table;
  table.case_name = c.name;
  table.regime = regime;
  for (int k : degrees) {
    ConvergenceSeries series;
    series.k = k;
    std::vector<double> hs, eu, es, eL, ep;
    for (int level = 0; level < n_meshes; ++level) {
      const Mesh mesh = case_mesh(c, elem_type, level, k);
      FlowProblem problem = c.make_problem(mesh, regime);
      problem.threads = threads;
      ConvergenceRow row;
      row.k = k;
      row.level = level;
      row.h = mesh_h(c, elem_type, level);
      try {
        const SolveArtifacts art = solve_flow(problem, newton);
        const PostprocessedField star = postprocess_velocity(art.solution, mesh, problem.data);
        row.err = compute_errors(art.solution, &star, c, mesh, mesh.pure_dirichlet());
        row.n_dof = art.structure.n_hat + art.structure.n_rho;
        row.newton_iterations = art.solution.newton_iterations;
      } catch (const std::exception&) {
        table.complete = false;
        series.rows.push_back(row);
        break;
      }
      series.rows.push_back(row);
      hs.push_back(row.h);
      eu.push_back(row.err.u);
      es.push_back(row.err.ustar);
      eL.push_back(row.err.L);
      ep.push_back(row.err.p);
    }
    if (static_cast<int>(hs.size()) >= 3) {
      series.rate_u = fit_rate(hs, eu);
      series.rate_ustar = fit_rate(hs, es);
      series.rate_L = fit_rate(hs, eL);
      series.rate_p = fit_rate(hs, ep);
    }
    table.series.push_back(std::move(series));
  }
  return table;
}

std::vector<SweepRow> sensitivity_sweep(const AnalyticCase& c, Regime regime,
                                        SweepParameter parameter,
                                        const std::vector<double>& grid, ElemType elem_type,
                                        int mesh_level, int k, int threads) {
  if (grid.size() < 5)
    throw std::invalid_argument("sensitivity_sweep: grid of at least 5 values required");
  const Mesh mesh = case_mesh(c, elem_type, mesh_level, k);
  std::vector<SweepRow> rows;
  for (double value : grid) {
    SweepRow row;
    row.value = value;
    FlowProblem problem = c.make_problem(mesh, regime);
    problem.threads = threads;
    if (parameter == SweepParameter::kappa)
      problem.stab.kappa = value;
    else
      problem.stab.beta = value;
    try {
      const SolveArtifacts art = solve_flow(problem);
      const PostprocessedField star = postprocess_velocity(art.solution, mesh, problem.data);
      row.err = compute_errors(art.solution, &star, c, mesh, mesh.pure_dirichlet());
    } catch (const std::exception&) {
      row.failed = true;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

// 6th-order central first and second derivative stencils.
template <typename F>
double d1(const F& f, double h) {
  return (-f(-3) + 9 * f(-2) - 45 * f(-1) + 45 * f(1) - 9 * f(2) + f(3)) / (60.0 * h);
}
template <typename F>
double d2(const F& f, double h) {
  return (2 * f(-3) - 27 * f(-2) + 270 * f(-1) - 490 * f(0) + 270 * f(1) - 27 * f(2) + 2 * f(3)) /
         (180.0 * h * h);
}

}  // namespace

CaseConsistency check_case_consistency(const AnalyticCase& c, bool with_convection) {
  CaseConsistency out;
  const double hx = 1e-3 * (c.domain.x1 - c.domain.x0);
  const double hy = 1e-3 * (c.domain.y1 - c.domain.y0);
  const int n = 50;

  const auto comp = [&](const Eigen::Vector2d& x, int i) { return c.velocity(x)(i); };

  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      Eigen::Vector2d x;
      x(0) = c.domain.x0 + (c.domain.x1 - c.domain.x0) * (0.02 + 0.96 * ix / (n - 1));
      x(1) = c.domain.y0 + (c.domain.y1 - c.domain.y0) * (0.02 + 0.96 * iy / (n - 1));

      const auto ux = [&](int i, int s) { return comp(x + Eigen::Vector2d(s * hx, 0), i); };
      const auto uy = [&](int i, int s) { return comp(x + Eigen::Vector2d(0, s * hy), i); };

      Eigen::Matrix2d grad;  // grad(i,j) = du_i/dx_j
      Eigen::Vector2d lap;
      for (int i = 0; i < 2; ++i) {
        grad(i, 0) = d1([&](int s) { return ux(i, s); }, hx);
        grad(i, 1) = d1([&](int s) { return uy(i, s); }, hy);
        lap(i) = d2([&](int s) { return ux(i, s); }, hx) + d2([&](int s) { return uy(i, s); }, hy);
      }
      // div(2 nu grad_s u) = nu (lap u + grad(div u)); the second part needs
      // mixed derivatives of the divergence, evaluated by nested stencils.
      Eigen::Vector2d grad_div;
      grad_div(0) = d1(
          [&](int s) {
            const Eigen::Vector2d xs = x + Eigen::Vector2d(s * hx, 0);
            return d1([&](int r) { return comp(xs + Eigen::Vector2d(r * hx, 0), 0); }, hx) +
                   d1([&](int r) { return comp(xs + Eigen::Vector2d(0, r * hy), 1); }, hy);
          },
          hx);
      grad_div(1) = d1(
          [&](int s) {
            const Eigen::Vector2d xs = x + Eigen::Vector2d(0, s * hy);
            return d1([&](int r) { return comp(xs + Eigen::Vector2d(r * hx, 0), 0); }, hx) +
                   d1([&](int r) { return comp(xs + Eigen::Vector2d(0, r * hy), 1); }, hy);
          },
          hy);

      Eigen::Vector2d grad_p;
      grad_p(0) = d1([&](int s) { return c.pressure(x + Eigen::Vector2d(s * hx, 0)); }, hx);
      grad_p(1) = d1([&](int s) { return c.pressure(x + Eigen::Vector2d(0, s * hy)); }, hy);

      Eigen::Vector2d res = -c.nu * (lap + grad_div) + grad_p - c.source(x);
      if (with_convection) {
        const Eigen::Vector2d u = c.velocity(x);
        res += grad * u;  // (u . grad) u for the solenoidal field
      }
      out.max_momentum_residual = std::max(out.max_momentum_residual, res.cwiseAbs().maxCoeff());
      out.max_divergence = std::max(out.max_divergence, std::abs(grad(0, 0) + grad(1, 1)));
    }

  // compatibility: total boundary flux of the exact velocity
  const QuadratureRule gl = gauss_legendre(40);
  double flux = 0.0;
  const int nseg = 20;
  const auto side = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& nrm) {
    for (int s = 0; s < nseg; ++s) {
      const Eigen::Vector2d p0 = a + (b - a) * (static_cast<double>(s) / nseg);
      const Eigen::Vector2d p1 = a + (b - a) * (static_cast<double>(s + 1) / nseg);
      const double half = (p1 - p0).norm() / 2.0;
      for (Eigen::Index g = 0; g < gl.weights.size(); ++g) {
        const Eigen::Vector2d xg = 0.5 * (p0 + p1) + 0.5 * gl.points(g, 0) * (p1 - p0);
        flux += c.velocity(xg).dot(nrm) * half * gl.weights(g);
      }
    }
  };
  const Rect& d = c.domain;
  side({d.x0, d.y0}, {d.x1, d.y0}, {0, -1});
  side({d.x1, d.y0}, {d.x1, d.y1}, {1, 0});
  side({d.x1, d.y1}, {d.x0, d.y1}, {0, 1});
  side({d.x0, d.y1}, {d.x0, d.y0}, {-1, 0});
  out.boundary_flux = flux;
  return out;
}

void write_convergence_csv(const ConvergenceTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_convergence_csv: cannot open " + path);
  out.precision(12);
  out << "case,regime,k,level,h,n_dof_global,err_u,err_ustar,err_L,err_p,"
         "rate_u,rate_ustar,rate_L,rate_p,newton_iterations\n";
  const char* regime = table.regime == Regime::stokes
                           ? "stokes"
                           : (table.regime == Regime::oseen ? "oseen" : "navier_stokes");
  for (const ConvergenceSeries& s : table.series)
    for (const ConvergenceRow& r : s.rows)
      out << table.case_name << "," << regime << "," << r.k << "," << r.level << "," << r.h << ","
          << r.n_dof << "," << r.err.u << "," << r.err.ustar << "," << r.err.L << "," << r.err.p
          << "," << s.rate_u << "," << s.rate_ustar << "," << s.rate_L << "," << s.rate_p << ","
          << r.newton_iterations << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, SweepParameter parameter,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out.precision(12);
  out << (parameter == SweepParameter::kappa ? "kappa" : "beta")
      << ",failed,err_u,err_ustar,err_L,err_p\n";
  for (const SweepRow& r : rows)
    out << r.value << "," << (r.failed ? 1 : 0) << "," << r.err.u << "," << r.err.ustar << ","
        << r.err.L << "," << r.err.p << "\n";
}

}  // namespace hdgflow
