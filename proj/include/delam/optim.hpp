#pragma once

#include "delam/adhesive.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace delam {

class QpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// min ½xᵀQx + bᵀx subject to lower ≤ x ≤ upper (±∞ allowed).
template <class Scalar = double>
struct BoxQP {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Matrix Q;
  Vector b;
  Vector lower;
  Vector upper;

  Eigen::Index size() const { return b.size(); }
  Scalar objective(const Vector& x) const { return Scalar(0.5) * x.dot(Q * x) + b.dot(x); }
};

struct QpOptions {
  double tol = 1e-8;   // relative to 1 + ‖b‖
  int max_iter = -1;   // -1: 50 n
  double gamma = 1.0;  // proportioning constant
  bool polish = true;
};

template <class Scalar = double>
struct QpResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar objective = Scalar(0);
  Scalar projected_gradient = Scalar(0);
  Scalar complementarity = Scalar(0);
  int iterations = 0;
  bool converged = false;
  bool polished = false;
};

namespace detail {

template <class Vector>
Vector project(const Vector& x, const Vector& lo, const Vector& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Projected gradient: g on free variables, the descent-feasible part on bound ones.
template <class Vector>
void split_gradient(const Vector& x, const Vector& g, const Vector& lo, const Vector& hi, Vector& phi, Vector& beta) {
  using Scalar = typename Vector::Scalar;
  const auto n = x.size();
  phi.setZero(n);
  beta.setZero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool at_lo = x(i) <= lo(i);
    const bool at_hi = x(i) >= hi(i);
    if (at_lo && at_hi) continue;
    if (at_lo)
      beta(i) = std::min(g(i), Scalar(0));
    else if (at_hi)
      beta(i) = std::max(g(i), Scalar(0));
    else
      phi(i) = g(i);
  }
}

template <class Vector>
typename Vector::Scalar max_feasible_step(const Vector& x, const Vector& p, const Vector& lo, const Vector& hi) {
  using Scalar = typename Vector::Scalar;
  Scalar a = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (p(i) > Scalar(0))
      a = std::min(a, (x(i) - lo(i)) / p(i));
    else if (p(i) < Scalar(0))
      a = std::min(a, (x(i) - hi(i)) / p(i));
  }
  return std::max(a, Scalar(0));
}

}  // namespace detail

/// Bound-constrained convex QP by modified proportioning with reduced gradient
/// projections (projected conjugate gradients), on the Jacobi-scaled problem.
template <class Scalar = double>
QpResult<Scalar> solve_box_qp(const BoxQP<Scalar>& qp, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& start,
                              const QpOptions& opt = {}) {
  using Vector = typename BoxQP<Scalar>::Vector;
  using Matrix = typename BoxQP<Scalar>::Matrix;
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = qp.size();
  if (qp.Q.rows() != n || qp.Q.cols() != n || qp.lower.size() != n || qp.upper.size() != n || start.size() != n)
    throw QpError("box QP: inconsistent sizes");
  if ((qp.lower.array() > qp.upper.array()).any()) throw QpError("box QP: lower bound above upper bound");
  QpResult<Scalar> res;
  if (n == 0) {
    res.x = Vector(0);
    res.converged = true;
    return res;
  }

  // Jacobi scaling x = D y
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar q = qp.Q(i, i);
    if (q < Scalar(0)) throw QpError("box QP: negative diagonal entry, Q is indefinite");
    d(i) = q > Scalar(0) ? Scalar(1) / sqrt(q) : Scalar(1);
  }
  const Matrix A = d.asDiagonal() * qp.Q * d.asDiagonal();
  const Vector c = d.cwiseProduct(qp.b);
  const Vector lo = qp.lower.cwiseQuotient(d);
  const Vector hi = qp.upper.cwiseQuotient(d);

  const Scalar tol = Scalar(opt.tol) * (Scalar(1) + c.norm());
  const int max_iter = opt.max_iter > 0 ? opt.max_iter : static_cast<int>(50 * n);
  const Scalar a_norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  const Scalar abar = a_norm > Scalar(0) ? Scalar(1) / a_norm : Scalar(1);

  Vector y = detail::project(Vector(start.cwiseQuotient(d)), lo, hi);
  Vector g = A * y + c;
  Vector phi, beta;
  detail::split_gradient(y, g, lo, hi, phi, beta);
  Vector p = phi;

  const auto reduced_free = [&](const Vector& yy, const Vector& ph) {
    Vector r = ph;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (ph(i) > Scalar(0))
        r(i) = std::min((yy(i) - lo(i)) / abar, ph(i));
      else if (ph(i) < Scalar(0))
        r(i) = std::max((yy(i) - hi(i)) / abar, ph(i));
    }
    return r;
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    if ((phi + beta).norm() <= tol) break;
    const Vector rphi = reduced_free(y, phi);
    if (beta.squaredNorm() <= Scalar(opt.gamma * opt.gamma) * rphi.dot(phi)) {
      const Vector Ap = A * p;
      const Scalar pAp = p.dot(Ap);
      const Scalar a_f = detail::max_feasible_step(y, p, lo, hi);
      if (pAp <= Scalar(1e-14) * p.squaredNorm()) {
        if (pAp < -Scalar(1e-12) * p.squaredNorm()) throw QpError("box QP: direction of negative curvature, Q is indefinite");
        if (!std::isfinite(static_cast<double>(a_f))) throw QpError("box QP: objective unbounded below on the box");
        y = detail::project(Vector(y - a_f * p), lo, hi);
        g = A * y + c;
        detail::split_gradient(y, g, lo, hi, phi, beta);
        p = phi;
        continue;
      }
      const Scalar a_cg = g.dot(p) / pAp;
      if (a_cg <= a_f) {
        y -= a_cg * p;
        g -= a_cg * Ap;
        detail::split_gradient(y, g, lo, hi, phi, beta);
        const Scalar gamma = phi.dot(Ap) / pAp;
        p = phi - gamma * p;
      } else {
        // expansion step
        y -= a_f * p;
        g -= a_f * Ap;
        detail::split_gradient(y, g, lo, hi, phi, beta);
        y = detail::project(Vector(y - abar * phi), lo, hi);
        g = A * y + c;
        detail::split_gradient(y, g, lo, hi, phi, beta);
        p = phi;
      }
    } else {
      // proportioning step
      const Vector Ab = A * beta;
      const Scalar bAb = beta.dot(Ab);
      Scalar a = bAb > Scalar(0) ? g.dot(beta) / bAb : detail::max_feasible_step(y, beta, lo, hi);
      if (!std::isfinite(static_cast<double>(a))) throw QpError("box QP: objective unbounded below on the box");
      y = detail::project(Vector(y - a * beta), lo, hi);
      g = A * y + c;
      detail::split_gradient(y, g, lo, hi, phi, beta);
      p = phi;
    }
  }
  res.iterations = it;

  if (opt.polish) {
    // Newton step on the free set of the final iterate
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) > lo(i) && y(i) < hi(i)) free.push_back(i);
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Matrix Aff(nf, nf);
      Vector rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        rhs(a) = -g(free[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < nf; ++b) Aff(a, b) = A(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
      Eigen::LDLT<Matrix> ldlt(Aff);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        const Vector step = ldlt.solve(rhs);
        Vector cand = y;
        for (Eigen::Index a = 0; a < nf; ++a) cand(free[static_cast<std::size_t>(a)]) += step(a);
        if (step.allFinite() && (cand.array() >= lo.array()).all() && (cand.array() <= hi.array()).all()) {
          const Vector gc = A * cand + c;
          Vector ph, be;
          detail::split_gradient(cand, gc, lo, hi, ph, be);
          const Scalar f_old = Scalar(0.5) * y.dot(A * y) + c.dot(y);
          const Scalar f_new = Scalar(0.5) * cand.dot(A * cand) + c.dot(cand);
          if ((ph + be).norm() <= std::max(tol, (phi + beta).norm()) && f_new <= f_old + Scalar(1e-14) * (Scalar(1) + abs(f_old))) {
            y = cand;
            g = gc;
            phi = ph;
            beta = be;
            res.polished = true;
          }
        }
      }
    }
  }

  res.x = detail::project(Vector(d.cwiseProduct(y)), qp.lower, qp.upper);
  res.projected_gradient = (phi + beta).norm();
  res.converged = res.projected_gradient <= tol;
  res.objective = qp.objective(res.x);
  Scalar comp = Scalar(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(static_cast<double>(lo(i)))) comp = std::max(comp, abs(std::max(g(i), Scalar(0)) * (y(i) - lo(i))));
    if (std::isfinite(static_cast<double>(hi(i)))) comp = std::max(comp, abs(std::min(g(i), Scalar(0)) * (hi(i) - y(i))));
  }
  res.complementarity = comp;
  return res;
}

/// Variable layout of the kinematic substep: per entry (⟦u⟧ₙ, ⟦u⟧ₜ) first,
/// then the two components of the secondary displacement for two-domain
/// pairings, then slip increments π⁺ and π⁻ when slip is active.
struct KinematicLayout {
  Index entries = 0;
  bool two_domain = false;
  bool slip = false;
  Index jump(Index i) const { return 2 * i; }
  Index base(Index i) const { return 2 * entries + 2 * i; }
  Index kinematic_size() const { return (two_domain ? 4 : 2) * entries; }
  Index plus(Index i) const { return kinematic_size() + i; }
  Index minus(Index i) const { return kinematic_size() + entries + i; }
  Index size() const { return kinematic_size() + (slip ? 2 * entries : 0); }
};

struct KinematicInput {
  const InterfacePairing* pairing = nullptr;
  const AdhesiveParams* params = nullptr;
  /// Bulk energy ½vᵀKv + fᵀv in the kinematic variables (without slip).
  const MatX* bulk_K = nullptr;
  const VecX* bulk_f = nullptr;
  VecX zeta;        // fixed damage
  VecX pi_anchor;   // slip of the last accepted step
  bool slip = true;  // false: π stays at pi_anchor
  VecX start;       // kinematic variables, may be empty
  VecX pi_start;    // may be empty
  QpOptions qp{1e-10, -1, 1.0, true};
};

struct KinematicResult {
  VecX v;   // kinematic variables
  VecX jump_n, jump_t, pi;
  double objective = 0.0;  // QP objective, constants dropped
  QpResult<double> qp;
};

/// Minimizes bulk + adhesive energy + σ_yield‖π − π_anchor‖₁ over the
/// kinematic variables and π with ζ fixed and ⟦u⟧ₙ ≥ 0.
KinematicResult kinematic_substep(const KinematicInput& in);

/// The assembled QP of the kinematic substep (exposed for verification).
BoxQP<double> kinematic_qp(const KinematicInput& in, KinematicLayout& layout);

/// Minimizes Σ_m h_m ζ_m (e_m − G_Ic) (+ gradient term) over 0 ≤ ζ ≤ ζ_anchor.
/// Ties e_m = G_Ic keep ζ_anchor.
VecX damage_substep(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& energy_density,
                    const VecX& zeta_anchor, const QpOptions& qp = {});

}  // namespace delam
