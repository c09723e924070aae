#pragma once

// The Jacobi operator L0 = -Lap_Sigma - |A|^2, the linearized Willmore
// operator
//   Ltilde phi = L0^2 phi + (3/2) H^2 L0 phi - H (grad phi, grad H)
//              + 2 (A grad phi, grad H) + 2 H <A, Hess phi>
//              + phi (2 <A, Hess H> + |grad H|^2 + 2 H tr A^3),
// and the extended bordered system (Ltilde phi + lambda, Int phi dsigma).
//
// Matrices are assembled as weak forms S_kl = <Op e_l, e_k>_dsigma against
// the trigonometric basis together with the Gram matrix G; the action on
// coefficients is G^{-1} S, which is self-adjoint in the dsigma inner
// product by construction.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "chtorus/circle_field.hpp"
#include "chtorus/numerics.hpp"
#include "chtorus/torus_geometry.hpp"

namespace chtorus {

// pointwise Jacobi operator on a theta1-only field
inline double jacobi_at(const TorusShape& sh, const CircleField& f, double theta1) {
  const auto J = jet(sh, theta1);
  return -laplace_beltrami_at(sh, f, theta1) - J.absA2 * f.evaluate(theta1);
}

inline CircleField apply_jacobi(const TorusShape& sh, const CircleField& f,
                                std::size_t modes_out, std::size_t grid = 0) {
  const std::size_t m = grid ? grid : 4 * modes_out + 8;
  const auto th = theta_nodes(m);
  std::vector<double> v(m);
  for (std::size_t j = 0; j < m; ++j) v[j] = jacobi_at(sh, f, th[j]);
  return CircleField::from_samples(v, modes_out, f.symmetric);
}

// term mask for the six summands of Ltilde (used by the termwise-assembly check)
enum LtildeTerm : unsigned {
  kL0Squared = 1u << 0,
  kH2L0 = 1u << 1,
  kGradHGradPhi = 1u << 2,
  kAGradPhiGradH = 1u << 3,
  kHAHess = 1u << 4,
  kZeroOrder = 1u << 5,
  kAllTerms = (1u << 6) - 1,
};

// pointwise Ltilde given the precomputed field L0 phi
inline double ltilde_at(const TorusShape& sh, const CircleField& phi,
                        const CircleField& L0phi, double theta1,
                        unsigned mask = kAllTerms) {
  const auto J = jet(sh, theta1);
  const double p = phi.evaluate(theta1);
  const double p1 = phi.evaluate(theta1, 1);
  const double p2 = phi.evaluate(theta1, 2);
  const double A11up = J.k1 * J.ginv11;
  const double A22up = J.k2 * J.ginv22;
  const double hessA_phi = A11up * p2 - A22up * J.Gamma1_22 * p1;
  const double hessA_H = A11up * J.d2H - A22up * J.Gamma1_22 * J.dH;
  double out = 0.0;
  if (mask & kL0Squared) out += jacobi_at(sh, L0phi, theta1);
  if (mask & kH2L0) out += 1.5 * J.H * J.H * (-laplace_beltrami_at(sh, phi, theta1) - J.absA2 * p);
  if (mask & kGradHGradPhi) out += -J.H * J.ginv11 * p1 * J.dH;
  if (mask & kAGradPhiGradH) out += 2.0 * A11up * p1 * J.dH;
  if (mask & kHAHess) out += 2.0 * J.H * hessA_phi;
  if (mask & kZeroOrder)
    out += p * (2.0 * hessA_H + J.ginv11 * J.dH * J.dH + 2.0 * J.H * J.trA3);
  return out;
}

inline CircleField apply_ltilde(const TorusShape& sh, const CircleField& phi,
                                std::size_t modes_out = 0, unsigned mask = kAllTerms,
                                std::size_t grid = 0) {
  const std::size_t n = modes_out ? modes_out : phi.modes();
  const std::size_t m = grid ? grid : 4 * n + 8;
  const CircleField L0phi = apply_jacobi(sh, phi, m / 2, m);
  const auto th = theta_nodes(m);
  std::vector<double> v(m);
  for (std::size_t j = 0; j < m; ++j) v[j] = ltilde_at(sh, phi, L0phi, th[j], mask);
  return CircleField::from_samples(v, n, phi.symmetric);
}

// ---------------------------------------------------------------------------

struct OperatorMatrix {
  Eigen::MatrixXd S;  // weak form
  Eigen::MatrixXd G;  // Gram matrix of the basis in dsigma
  Eigen::MatrixXd M;  // action on coefficients, G^{-1} S
  std::size_t mode_count = 0;
  bool symmetric_mode = true;
  std::string label;

  std::size_t dim() const { return std::size_t(S.rows()); }

  // basis: cos(k theta), k < N; full mode appends sin(k theta), 1 <= k < N
  static double basis_at(std::size_t idx, std::size_t modes, double theta) {
    return idx < modes ? std::cos(double(idx) * theta)
                       : std::sin(double(idx - modes + 1) * theta);
  }

  CircleField to_field(const Eigen::VectorXd& a) const {
    CircleField f(mode_count, symmetric_mode);
    for (std::size_t k = 0; k < mode_count; ++k) f.cosc[k] = a(Eigen::Index(k));
    if (!symmetric_mode)
      for (std::size_t k = 1; k < mode_count; ++k)
        f.sinc[k] = a(Eigen::Index(mode_count + k - 1));
    return f;
  }
  Eigen::VectorXd to_vector(const CircleField& f) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(Eigen::Index(dim()));
    for (std::size_t k = 0; k < mode_count; ++k) a(Eigen::Index(k)) = f.cosc[k];
    if (!symmetric_mode && !f.symmetric)
      for (std::size_t k = 1; k < mode_count; ++k)
        a(Eigen::Index(mode_count + k - 1)) = f.sinc[k];
    return a;
  }

  CircleField apply(const CircleField& f) const { return to_field(M * to_vector(f)); }

  double self_adjointness_defect() const {
    return (S - S.transpose()).norm() / S.norm();
  }

  // dense binary layout: two uint64 dims, then row-major doubles of M
  void dump_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    require_num(bool(os), "dump_binary: cannot open " + path);
    const std::uint64_t rows = std::uint64_t(M.rows()), cols = std::uint64_t(M.cols());
    os.write(reinterpret_cast<const char*>(&rows), 8);
    os.write(reinterpret_cast<const char*>(&cols), 8);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        const double v = M(i, j);
        os.write(reinterpret_cast<const char*>(&v), 8);
      }
  }
};

namespace detail {

// weak-form assembly of a pointwise operator against the trig basis
template <typename PointOp>
inline OperatorMatrix assemble_operator(const TorusShape& sh, std::size_t modes,
                                        bool symmetric_mode, PointOp&& op,
                                        const std::string& label) {
  OperatorMatrix out;
  out.mode_count = modes;
  out.symmetric_mode = symmetric_mode;
  out.label = label;
  const std::size_t dim = symmetric_mode ? modes : 2 * modes - 1;
  const std::size_t mq = 6 * modes + 16;
  const auto th = theta_nodes(mq);
  std::vector<double> wq(mq);
  for (std::size_t j = 0; j < mq; ++j)
    wq[j] = 2.0 * pi * sh.r * (sh.R + sh.r * std::cos(th[j])) * (2.0 * pi / double(mq));

  // values of Op(e_l) on the quadrature grid
  const Eigen::Index mqi = Eigen::Index(mq), dimi = Eigen::Index(dim);
  Eigen::MatrixXd opv(mqi, dimi);
  for (std::size_t l = 0; l < dim; ++l) {
    CircleField e(modes, symmetric_mode);
    if (l < modes)
      e.cosc[l] = 1.0;
    else
      e.sinc[l - modes + 1] = 1.0;
    const auto vals = op(e);
    require(vals.size() == mq, "assemble_operator: op must evaluate on the grid");
    for (std::size_t j = 0; j < mq; ++j) opv(Eigen::Index(j), Eigen::Index(l)) = vals[j];
  }
  out.S.setZero(Eigen::Index(dim), Eigen::Index(dim));
  out.G.setZero(Eigen::Index(dim), Eigen::Index(dim));
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = 0; l < dim; ++l) {
      double s = 0.0, g = 0.0;
      for (std::size_t j = 0; j < mq; ++j) {
        const double ek = OperatorMatrix::basis_at(k, modes, th[j]);
        s += wq[j] * ek * opv(Eigen::Index(j), Eigen::Index(l));
        g += wq[j] * ek * OperatorMatrix::basis_at(l, modes, th[j]);
      }
      out.S(Eigen::Index(k), Eigen::Index(l)) = s;
      out.G(Eigen::Index(k), Eigen::Index(l)) = g;
    }
  out.M = out.G.ldlt().solve(out.S);
  return out;
}

}  // namespace detail

inline OperatorMatrix assemble_jacobi(const TorusShape& sh, std::size_t modes,
                                      bool symmetric_mode = true) {
  return detail::assemble_operator(
      sh, modes, symmetric_mode,
      [&](const CircleField& e) {
        const std::size_t mq = 6 * modes + 16;
        const auto th = theta_nodes(mq);
        std::vector<double> v(mq);
        for (std::size_t j = 0; j < mq; ++j) v[j] = jacobi_at(sh, e, th[j]);
        return v;
      },
      "jacobi");
}

inline OperatorMatrix assemble_ltilde(const TorusShape& sh, std::size_t modes,
                                      bool symmetric_mode = true,
                                      unsigned mask = kAllTerms) {
  return detail::assemble_operator(
      sh, modes, symmetric_mode,
      [&](const CircleField& e) {
        const std::size_t mq = 6 * modes + 16;
        const auto th = theta_nodes(mq);
        const CircleField L0e = apply_jacobi(sh, e, mq / 2, mq);
        std::vector<double> v(mq);
        for (std::size_t j = 0; j < mq; ++j) v[j] = ltilde_at(sh, e, L0e, th[j], mask);
        return v;
      },
      "ltilde");
}

// coefficient-space row of the constraint Int phi dsigma
inline Eigen::VectorXd area_row(const TorusShape& sh, const OperatorMatrix& op) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(Eigen::Index(op.dim()));
  g(0) = 4.0 * pi * pi * sh.R * sh.r;
  if (op.mode_count > 1) g(1) = 2.0 * pi * pi * sh.r * sh.r;
  return g;
}

struct ExtendedSolution {
  CircleField phi;
  double lambda = 0.0;
  double residual_op = 0.0;   // |Ltilde phi + lambda - f| in coefficients
  double residual_avg = 0.0;  // |Int phi dsigma - m|
  double smallest_singular_value = 0.0;
};

// bordered matrix of the extended system in coefficient space
inline Eigen::MatrixXd bordered_matrix(const TorusShape& sh, const OperatorMatrix& op) {
  const Eigen::Index n = Eigen::Index(op.dim());
  Eigen::MatrixXd B(n + 1, n + 1);
  B.topLeftCorner(n, n) = op.M;
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
  e0(0) = 1.0;  // the constant function
  B.topRightCorner(n, 1) = e0;
  B.bottomLeftCorner(1, n) = area_row(sh, op).transpose();
  B(n, n) = 0.0;
  return B;
}

// smallest singular value of the bordered system measured in the
// dsigma-weighted norm on fields (plain absolute value on lambda)
inline double bordered_smallest_singular_value(const TorusShape& sh,
                                               const OperatorMatrix& op) {
  const Eigen::Index n = Eigen::Index(op.dim());
  const Eigen::MatrixXd B = bordered_matrix(sh, op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(op.G);
  const Eigen::VectorXd d = ge.eigenvalues();
  require_num(d.minCoeff() > 0.0, "bordered system: Gram matrix not positive");
  Eigen::MatrixXd Ghalf = ge.eigenvectors() * d.cwiseSqrt().asDiagonal() *
                          ge.eigenvectors().transpose();
  Eigen::MatrixXd Ghalfinv = ge.eigenvectors() * d.cwiseSqrt().cwiseInverse().asDiagonal() *
                             ge.eigenvectors().transpose();
  Eigen::MatrixXd W = Eigen::MatrixXd::Identity(n + 1, n + 1);
  W.topLeftCorner(n, n) = Ghalf;
  Eigen::MatrixXd Winv = Eigen::MatrixXd::Identity(n + 1, n + 1);
  Winv.topLeftCorner(n, n) = Ghalfinv;
  const Eigen::MatrixXd scaled = W * B * Winv;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  return svd.singularValues().minCoeff();
}

inline ExtendedSolution solve_extended(const TorusShape& sh, const OperatorMatrix& op,
                                       const CircleField& f, double m) {
  require(op.symmetric_mode && f.symmetric,
          "solve_extended: symmetric mode required");
  const Eigen::Index n = Eigen::Index(op.dim());
  const Eigen::MatrixXd B = bordered_matrix(sh, op);
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = op.to_vector(f);
  rhs(n) = m;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  const Eigen::VectorXd sol = lu.solve(rhs);
  ExtendedSolution out;
  out.phi = op.to_field(sol.head(n));
  out.lambda = sol(n);
  const Eigen::VectorXd res = B * sol - rhs;
  out.residual_op = res.head(n).cwiseAbs().maxCoeff();
  out.residual_avg = std::abs(res(n));
  out.smallest_singular_value = bordered_smallest_singular_value(sh, op);
  require_num(out.smallest_singular_value > 1e-12,
              "solve_extended: bordered system numerically singular, sigma_min = " +
                  std::to_string(out.smallest_singular_value));
  return out;
}

struct SpectrumReport {
  std::vector<double> eigenvalues;       // sorted, from the (S, G) pencil
  std::vector<double> imag_defect;       // |imag| of the plain eigensolve of M
  double smallest_singular_value = 0.0;  // of the bordered system
};

inline SpectrumReport spectrum_report(const TorusShape& sh, const OperatorMatrix& op) {
  SpectrumReport rep;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(op.S, op.G);
  rep.eigenvalues.assign(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  Eigen::EigenSolver<Eigen::MatrixXd> plain(op.M);
  for (Eigen::Index i = 0; i < plain.eigenvalues().size(); ++i)
    rep.imag_defect.push_back(std::abs(plain.eigenvalues()(i).imag()) /
                              (1.0 + std::abs(plain.eigenvalues()(i).real())));
  rep.smallest_singular_value = bordered_smallest_singular_value(sh, op);
  return rep;
}

// dsigma-normalized kernel residual of a candidate kernel field, scaled by
// the response of a nearby low non-kernel mode so the threshold is
// operator-scale independent
inline double kernel_residual(const TorusShape& sh, const CircleField& f) {
  const auto Lf = apply_ltilde(sh, f, std::max<std::size_t>(f.modes() + 8, 16));
  CircleField ref(4, true);
  ref.cosc[2] = 1.0;  // cos(2 theta), not conformal
  const auto Lref = apply_ltilde(sh, ref, 16);
  const double scale = std::sqrt(dsigma_inner(sh, Lref, Lref, 512)) /
                       std::sqrt(dsigma_inner(sh, ref, ref, 512));
  return std::sqrt(dsigma_inner(sh, Lf, Lf, 512)) /
         (std::sqrt(dsigma_inner(sh, f, f, 512)) * scale);
}

}  // namespace chtorus
