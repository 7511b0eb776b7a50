#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace delam {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Isotropic linear-elastic bulk in plane strain. E in MPa.
template <class Scalar = double>
struct Material {
  Scalar young_modulus = Scalar(70000);
  Scalar poisson_ratio = Scalar(0.35);

  Scalar shear_modulus() const { return young_modulus / (Scalar(2) * (Scalar(1) + poisson_ratio)); }

  void validate() const {
    if (!(young_modulus > Scalar(0))) throw KernelError("material: Young modulus must be positive");
    if (!(poisson_ratio >= Scalar(0) && poisson_ratio < Scalar(0.5)))
      throw KernelError("material: Poisson ratio must lie in [0, 0.5)");
  }
};

template <class Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <class Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Displacement kernel: entry (l, m) is the m-displacement at `field` due to a
/// unit l-force at `source`. Symmetric.
template <class Scalar>
Matrix2<Scalar> kelvin_U(const Material<Scalar>& mat, const Vector2<Scalar>& field,
                         const Vector2<Scalar>& source) {
  using std::log;
  const Vector2<Scalar> d = field - source;
  const Scalar r = d.norm();
  if (!(r > Scalar(0))) throw KernelError("kelvin_U: field and source points coincide");
  const Scalar nu = mat.poisson_ratio;
  const Scalar k = Scalar(1) / (Scalar(8) * std::numbers::pi_v<Scalar> * mat.shear_modulus() * (Scalar(1) - nu));
  const Vector2<Scalar> e = d / r;
  return k * ((Scalar(3) - Scalar(4) * nu) * log(Scalar(1) / r) * Matrix2<Scalar>::Identity() + e * e.transpose());
}

/// Traction kernel on a surface with unit `normal` at `field`: row l is the
/// load direction, column m the traction component.
template <class Scalar>
Matrix2<Scalar> kelvin_T(const Material<Scalar>& mat, const Vector2<Scalar>& field,
                         const Vector2<Scalar>& source, const Vector2<Scalar>& normal) {
  const Vector2<Scalar> d = field - source;
  const Scalar r = d.norm();
  if (!(r > Scalar(0))) throw KernelError("kelvin_T: field and source points coincide");
  const Scalar nu = mat.poisson_ratio;
  const Scalar c = Scalar(1) - Scalar(2) * nu;
  const Vector2<Scalar> e = d / r;
  const Scalar drdn = e.dot(normal);
  const Matrix2<Scalar> sym = c * Matrix2<Scalar>::Identity() + Scalar(2) * e * e.transpose();
  const Matrix2<Scalar> skew = e * normal.transpose() - normal * e.transpose();
  return -(drdn * sym - c * skew) / (Scalar(4) * std::numbers::pi_v<Scalar> * (Scalar(1) - nu) * r);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
template <class Scalar = double>
struct GaussRule {
  std::vector<Scalar> points;
  std::vector<Scalar> weights;
};

template <class Scalar = double>
GaussRule<Scalar> gauss_legendre(int order) {
  using std::abs;
  using std::cos;
  if (order < 1) throw KernelError("gauss_legendre: order must be at least 1");
  GaussRule<Scalar> rule;
  rule.points.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (order + 1) / 2; ++i) {
    Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(order) + Scalar(0.5)));
    Scalar dp = Scalar(0);
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = Scalar(1), p1 = x;
      for (int k = 2; k <= order; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = Scalar(1);
      dp = Scalar(order) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) < Scalar(1e-15)) break;
    }
    Scalar p0 = Scalar(1), p1 = x;
    for (int k = 2; k <= order; ++k) {
      const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = p2;
    }
    dp = Scalar(order) * (x * p1 - p0) / (x * x - Scalar(1));
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.points[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.points[static_cast<std::size_t>(order - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order == 1) {
    rule.points[0] = Scalar(0);
    rule.weights[0] = Scalar(2);
  }
  return rule;
}

struct QuadratureOptions {
  int order = 12;
  int near_order = 16;
  /// Order-16 rule when the source is closer than this many element lengths.
  double near_distance = 1.0;
  /// Bisect when the source is closer than this many (sub)segment lengths.
  double split_distance = 0.5;
  int max_depth = 24;
};

/// ∫ N_a U dS and ∫ N_a T dS over one straight element, a = 0, 1.
/// When the source is an end node of the element the T block of that node is
/// divergent; it is left zero and `singular_node` names it.
template <class Scalar = double>
struct ElementBlocks {
  std::array<Matrix2<Scalar>, 2> U{Matrix2<Scalar>::Zero(), Matrix2<Scalar>::Zero()};
  std::array<Matrix2<Scalar>, 2> T{Matrix2<Scalar>::Zero(), Matrix2<Scalar>::Zero()};
  int singular_node = -1;
};

namespace detail {

template <class Scalar>
Scalar xlogx_abs(Scalar u) {
  using std::abs;
  using std::log;
  return u == Scalar(0) ? Scalar(0) : u * log(abs(u));
}

// Source on the element's supporting line, at parameter s0 (any real).
template <class Scalar>
ElementBlocks<Scalar> collinear_blocks(const Material<Scalar>& mat, Scalar h, const Vector2<Scalar>& t,
                                       const Vector2<Scalar>& n, Scalar s0, Scalar tol) {
  using std::abs;
  using std::log;
  const Scalar nu = mat.poisson_ratio;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  ElementBlocks<Scalar> out;

  const Scalar ua = -s0, ub = h - s0;
  // antiderivatives of ln|u| and u ln|u|
  const auto F0 = [](Scalar u) { return xlogx_abs(u) - u; };
  const auto F1 = [](Scalar u) { return Scalar(0.5) * u * xlogx_abs(u) - Scalar(0.25) * u * u; };
  const Scalar I0 = F0(ub) - F0(ua);
  const Scalar I1 = F1(ub) - F1(ua);
  const Scalar log2 = (I1 + s0 * I0) / h;  // ∫ N2 ln|u|
  const Scalar log1 = I0 - log2;            // ∫ N1 ln|u|
  const Scalar kU = Scalar(1) / (Scalar(8) * pi * mat.shear_modulus() * (Scalar(1) - nu));
  const Matrix2<Scalar> ttT = t * t.transpose();
  out.U[0] = kU * (-(Scalar(3) - Scalar(4) * nu) * log1 * Matrix2<Scalar>::Identity() + Scalar(0.5) * h * ttT);
  out.U[1] = kU * (-(Scalar(3) - Scalar(4) * nu) * log2 * Matrix2<Scalar>::Identity() + Scalar(0.5) * h * ttT);

  const Matrix2<Scalar> skew = t * n.transpose() - n * t.transpose();
  const Scalar kT = (Scalar(1) - Scalar(2) * nu) / (Scalar(4) * pi * (Scalar(1) - nu));
  if (abs(s0) <= tol) {
    out.T[1] = kT * skew;  // ∫ N2 / u = 1
    out.singular_node = 0;
  } else if (abs(s0 - h) <= tol) {
    out.T[0] = -kT * skew;  // ∫ N1 / u = -1
    out.singular_node = 1;
  } else {
    const Scalar J0 = log(abs(ub)) - log(abs(ua));
    const Scalar J2 = (h + s0 * J0) / h;
    out.T[0] = kT * (J0 - J2) * skew;
    out.T[1] = kT * J2 * skew;
  }
  return out;
}

template <class Scalar>
Scalar distance_to_segment(const Vector2<Scalar>& a, const Vector2<Scalar>& b, const Vector2<Scalar>& p) {
  using std::clamp;
  const Vector2<Scalar> ab = b - a;
  const Scalar s = clamp(Scalar((p - a).dot(ab) / ab.squaredNorm()), Scalar(0), Scalar(1));
  return (a + s * ab - p).norm();
}

// Accumulates the quadrature of [sa, sb] ⊂ [0, h] into `out`.
template <class Scalar>
void quadrature_blocks(const Material<Scalar>& mat, const Vector2<Scalar>& x1, Scalar h,
                       const Vector2<Scalar>& t, const Vector2<Scalar>& n, const Vector2<Scalar>& source,
                       Scalar sa, Scalar sb, const QuadratureOptions& opt, int depth,
                       ElementBlocks<Scalar>& out) {
  const Scalar len = sb - sa;
  const Scalar dist = distance_to_segment<Scalar>(x1 + sa * t, x1 + sb * t, source);
  if (dist < Scalar(opt.split_distance) * len && depth < opt.max_depth) {
    const Scalar mid = Scalar(0.5) * (sa + sb);
    quadrature_blocks(mat, x1, h, t, n, source, sa, mid, opt, depth + 1, out);
    quadrature_blocks(mat, x1, h, t, n, source, mid, sb, opt, depth + 1, out);
    return;
  }
  const int order = dist < Scalar(opt.near_distance) * h ? opt.near_order : opt.order;
  const GaussRule<Scalar> rule = gauss_legendre<Scalar>(order);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Scalar s = sa + Scalar(0.5) * (rule.points[q] + Scalar(1)) * len;
    const Scalar w = Scalar(0.5) * len * rule.weights[q];
    const Vector2<Scalar> x = x1 + s * t;
    const Matrix2<Scalar> U = kelvin_U(mat, x, source);
    const Matrix2<Scalar> T = kelvin_T(mat, x, source, n);
    const Scalar N2 = s / h, N1 = Scalar(1) - N2;
    out.U[0] += w * N1 * U;
    out.U[1] += w * N2 * U;
    out.T[0] += w * N1 * T;
    out.T[1] += w * N2 * T;
  }
}

}  // namespace detail

/// Element integrals for the straight element x1 -> x2 with outward normal
/// (t_y, -t_x). Sources on the element's line use closed forms (weakly
/// singular U, principal value T); other sources use graded Gauss-Legendre.
template <class Scalar = double>
ElementBlocks<Scalar> element_integrals(const Material<Scalar>& mat, const Vector2<Scalar>& x1,
                                        const Vector2<Scalar>& x2, const Vector2<Scalar>& source,
                                        const QuadratureOptions& opt = {}) {
  using std::abs;
  const Scalar h = (x2 - x1).norm();
  if (!(h > Scalar(0))) throw KernelError("element_integrals: degenerate element");
  const Vector2<Scalar> t = (x2 - x1) / h;
  const Vector2<Scalar> n(t.y(), -t.x());
  const Vector2<Scalar> rel = source - x1;
  const Scalar offset = rel.dot(n);
  const Scalar tol = Scalar(1e-12) * h;
  if (abs(offset) <= tol) return detail::collinear_blocks(mat, h, t, n, Scalar(rel.dot(t)), tol);
  ElementBlocks<Scalar> out;
  detail::quadrature_blocks(mat, x1, h, t, n, source, Scalar(0), h, opt, 0, out);
  return out;
}

/// Free-term tensor at a boundary point where the element arriving has unit
/// tangent `t_in` and the element leaving has unit tangent `t_out`, for a
/// counterclockwise loop (domain on the left).
template <class Scalar = double>
Matrix2<Scalar> free_term(const Material<Scalar>& mat, const Vector2<Scalar>& t_in, const Vector2<Scalar>& t_out) {
  using std::atan2;
  using std::cos;
  using std::sin;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar theta1 = atan2(t_out.y(), t_out.x());
  Scalar theta2 = atan2(-t_in.y(), -t_in.x());
  while (theta2 <= theta1) theta2 += Scalar(2) * pi;
  while (theta2 - theta1 > Scalar(2) * pi) theta2 -= Scalar(2) * pi;
  const Scalar alpha = theta2 - theta1;
  const Scalar k = Scalar(1) / (Scalar(8) * pi * (Scalar(1) - mat.poisson_ratio));
  const Scalar ds = sin(Scalar(2) * theta2) - sin(Scalar(2) * theta1);
  const Scalar dc = cos(Scalar(2) * theta2) - cos(Scalar(2) * theta1);
  Matrix2<Scalar> c;
  c(0, 0) = alpha / (Scalar(2) * pi) + k * ds;
  c(1, 1) = alpha / (Scalar(2) * pi) - k * ds;
  c(0, 1) = c(1, 0) = -k * dc;
  return c;
}

}  // namespace delam
