#include "cheeger/tensor.hpp"

#include <array>
#include <cmath>

#include "cheeger/errors.hpp"
#include "cheeger/random.hpp"

namespace cheeger::tensor {

namespace {

// Fourth-order central difference of f along coordinate m.
template <class F>
Matrix central_difference(const F& f, const Point& x, int m, double h) {
  auto at = [&](double t) {
    Point y = x;
    y(m) += t;
    return f(y);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

template <class F>
Matrix extrapolated_difference(const F& f, const Point& x, int m, const FdOptions& fd) {
  const Matrix coarse = central_difference(f, x, m, fd.h);
  if (!fd.richardson) return coarse;
  const Matrix fine = central_difference(f, x, m, 0.5 * fd.h);
  return (16.0 * fine - coarse) / 15.0;
}

double quadratic(const Matrix& g, const Vector& a, const Vector& b) { return a.dot(g * b); }

}  // namespace

Derivatives fd_derivatives(const TensorField& field, const Point& x, const FdOptions& fd) {
  if (field.chart) field.chart->require_inside(x, 2.0 * fd.h, "metric_derivatives stencil");
  Derivatives out;
  out.reserve(x.size());
  for (int m = 0; m < x.size(); ++m) {
    out.push_back(linalg::symmetrize(extrapolated_difference(field.value, x, m, fd)));
  }
  return out;
}

Derivatives metric_derivatives(const TensorField& field, const Point& x, const FdOptions& fd) {
  if (field.derivatives) return field.derivatives(x);
  return fd_derivatives(field, x, fd);
}

Christoffel christoffel(const Matrix& g, const Derivatives& dg) {
  const auto n = g.rows();
  const Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) {
    throw NumericalError("christoffel: metric matrix is singular or indefinite");
  }
  // First kind: Gamma_{n,ij} = 1/2 (d_i g_nj + d_j g_ni - d_n g_ij).
  Christoffel first(n, Matrix(n, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        first[k](i, j) = 0.5 * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
      }
    }
  }
  Christoffel out(n, Matrix::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector lowered(n);
      for (Eigen::Index k = 0; k < n; ++k) lowered(k) = first[k](i, j);
      const Vector raised = ldlt.solve(lowered);
      for (Eigen::Index m = 0; m < n; ++m) out[m](i, j) = raised(m);
    }
  }
  return out;
}

Christoffel christoffel(const TensorField& metric, const Point& x, const FdOptions& fd) {
  return christoffel(metric.value(x), metric_derivatives(metric, x, fd));
}

namespace {

Vector contract(const Christoffel& gamma, const Vector& a, const Vector& b) {
  Vector out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t m = 0; m < gamma.size(); ++m) out(m) = quadratic(gamma[m], a, b);
  return out;
}

struct PhaseDerivative {
  Vector dx;
  Vector dv;
};

PhaseDerivative geodesic_rhs(const TensorField& metric, const Point& x, const Vector& v,
                             const FdOptions& fd) {
  return {v, -contract(christoffel(metric, x, fd), v, v)};
}

}  // namespace

Trajectory geodesic_integrate(const TensorField& metric, const GeodesicState& initial,
                              double length, double step, const FdOptions& fd) {
  if (!(step > 0.0) || !(length >= 0.0)) {
    throw std::invalid_argument("geodesic_integrate: need step > 0 and length >= 0");
  }
  Trajectory out;
  GeodesicState state = initial;
  const double speed0 = std::sqrt(quadratic(metric.value(state.position), state.velocity,
                                            state.velocity));
  if (!(speed0 > 0.0)) throw std::invalid_argument("geodesic_integrate: zero initial velocity");
  state.velocity /= speed0;
  out.states.push_back(state);

  const auto steps = static_cast<long>(std::ceil(length / step - 1e-9));
  try {
    for (long s = 0; s < steps; ++s) {
      const double h = std::min(step, length - state.arc_length);
      const Point& x = state.position;
      const Vector& v = state.velocity;
      const auto k1 = geodesic_rhs(metric, x, v, fd);
      const auto k2 = geodesic_rhs(metric, x + 0.5 * h * k1.dx, v + 0.5 * h * k1.dv, fd);
      const auto k3 = geodesic_rhs(metric, x + 0.5 * h * k2.dx, v + 0.5 * h * k2.dv, fd);
      const auto k4 = geodesic_rhs(metric, x + h * k3.dx, v + h * k3.dv, fd);
      GeodesicState next;
      next.position = x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
      next.velocity = v + h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
      next.arc_length = state.arc_length + h;
      if (metric.chart && !metric.chart->contains(next.position, 2.0 * fd.h)) break;
      const double speed = std::sqrt(quadratic(metric.value(next.position), next.velocity,
                                               next.velocity));
      out.max_speed_drift = std::max(out.max_speed_drift, std::abs(speed - 1.0));
      state = std::move(next);
      out.states.push_back(state);
    }
  } catch (const DomainError&) {
    // Left the chart mid-step: report what was integrated.
  }
  out.exit_arc_length = state.arc_length;
  out.completed = state.arc_length >= length - 1e-9;
  return out;
}

TTensorSample t_tensor(const TensorField& metric, const manifold::MetricFn& killing,
                       const manifold::KillingData& data, const Point& x,
                       const TTensorOptions& options) {
  TTensorSample out{x, 0.0};
  const Matrix g = metric.value(x);
  const auto n = g.rows();
  const Matrix km = data.vertical_vectors();
  const auto r = km.cols();
  if (r == 0 || r == n) return out;  // no fibers, or no horizontal space

  const Christoffel gamma = christoffel(g, metric_derivatives(metric, x, options.fd));

  // g-orthonormal vertical frame V = K m C.
  const Matrix V = linalg::gram_schmidt(km, g);
  const Matrix C = (km.transpose() * g * km).llt().solve(km.transpose() * g * V);

  // d_i K at x, applied to the m_basis.
  if (metric.chart) {
    metric.chart->require_inside(x, 2.0 * options.h_killing, "t_tensor Killing stencil");
  }
  std::vector<Matrix> dkm;
  for (int i = 0; i < n; ++i) {
    dkm.push_back(central_difference(killing, x, i, options.h_killing) * data.m_basis);
  }

  // h(V_a, V_b) = horizontal part of nabla_{V_a} W_b with W_b = K(.) m c_b.
  std::vector<std::vector<Vector>> h(r, std::vector<Vector>(r));
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      const Vector va = V.col(a);
      const Vector wb = V.col(b);
      Vector cov = contract(gamma, va, wb);
      for (int i = 0; i < n; ++i) cov += va(i) * (dkm[i] * C.col(b));
      h[a][b] = cov - V * (V.transpose() * g * cov);
    }
  }

  auto norm_of = [&](const Vector& alpha, const Vector& beta) {
    Vector sum = Vector::Zero(n);
    for (Eigen::Index a = 0; a < r; ++a)
      for (Eigen::Index b = 0; b < r; ++b) sum += alpha(a) * beta(b) * h[a][b];
    return std::sqrt(std::max(0.0, quadratic(g, sum, sum)));
  };

  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      out.value = std::max(out.value, norm_of(Vector::Unit(r, a), Vector::Unit(r, b)));
    }
  }
  if (r > 1) {
    CounterRng rng(options.seed, streams::kDirections);
    for (int k = 0; k < options.direction_pairs; ++k) {
      const Vector alpha = rng.unit_vector(r);
      const Vector beta = rng.unit_vector(r);
      out.value = std::max(out.value, norm_of(alpha, beta));
    }
  }
  return out;
}

SamplePlan make_sample_plan(const manifold::Chart& region, int points, int directions,
                            std::uint64_t seed) {
  static constexpr std::array<unsigned, 6> kPrimes = {2, 3, 5, 7, 11, 13};
  if (points < 1) throw std::invalid_argument("sample plan needs at least one point");
  if (region.dim() > static_cast<int>(kPrimes.size())) {
    throw std::invalid_argument("sample plan supports charts up to dimension 6");
  }
  SamplePlan plan;
  plan.directions = directions;
  plan.seed = seed;
  plan.points.reserve(points);
  for (int i = 1; i <= points; ++i) {
    Point p(region.dim());
    for (int d = 0; d < region.dim(); ++d) {
      const auto& iv = region.intervals()[d];
      p(d) = iv.lo + (iv.hi - iv.lo) * radical_inverse(static_cast<std::uint64_t>(i), kPrimes[d]);
    }
    plan.points.push_back(std::move(p));
  }
  return plan;
}

CpNorms cp_norms(const TensorField& difference, const SamplePlan& plan,
                 const manifold::MetricFn& reference, const FdOptions& fd) {
  CpNorms out;
  double derivative_sup = 0.0;
  for (const Point& x : plan.points) {
    const Matrix g = reference(x);
    out.c0 = std::max(out.c0, linalg::metric_operator_norm(difference.value(x), g));
    for (const Matrix& d : metric_derivatives(difference, x, fd)) {
      derivative_sup = std::max(derivative_sup, linalg::metric_operator_norm(d, g));
    }
  }
  out.c1 = out.c0 + derivative_sup;
  return out;
}

double cp_norm(const TensorField& difference, int p, const SamplePlan& plan,
               const manifold::MetricFn& reference, const FdOptions& fd) {
  if (p < 0) throw std::invalid_argument("cp_norm: negative order");
  if (p >= 2) throw UnsupportedOrderError(p);
  if (p == 0) {
    double c0 = 0.0;
    for (const Point& x : plan.points) {
      c0 = std::max(c0, linalg::metric_operator_norm(difference.value(x), reference(x)));
    }
    return c0;
  }
  return cp_norms(difference, plan, reference, fd).c1;
}

}  // namespace cheeger::tensor
