#include "qkalman/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "qkalman/numerics.hpp"
#include "qkalman/symplectic.hpp"

namespace qkalman {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd hcat(Eigen::Index rows,
                     std::initializer_list<const Eigen::MatrixXd*> blocks) {
  Eigen::Index cols = 0;
  for (const auto* b : blocks) cols += b->cols();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index c = 0;
  for (const auto* b : blocks) {
    if (b->cols() > 0) out.middleCols(c, b->cols()) = *b;
    c += b->cols();
  }
  return out;
}

Eigen::MatrixXd projector(const Eigen::MatrixXd& basis, Eigen::Index dim) {
  if (basis.cols() == 0) return Eigen::MatrixXd::Zero(dim, dim);
  return basis * basis.transpose();
}

Eigen::MatrixXd clean_copy(const Eigen::MatrixXd& m, double tol) {
  return m.unaryExpr([tol](double x) { return std::abs(x) <= tol ? 0.0 : x; });
}

double block_max(const Eigen::MatrixXd& m, Eigen::Index r0, Eigen::Index nr,
                 Eigen::Index c0, Eigen::Index nc) {
  if (nr == 0 || nc == 0) return 0.0;
  return m.block(r0, c0, nr, nc).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd symplectic_pair_basis(const Eigen::MatrixXd& subspace_basis, double tol) {
  const Eigen::Index d = subspace_basis.rows();
  if (d % 2 != 0)
    throw std::invalid_argument("symplectic_pair_basis: ambient dimension must be even");
  if (subspace_basis.cols() % 2 != 0)
    throw std::invalid_argument("symplectic_pair_basis: subspace dimension must be even");
  const Eigen::Index n = d / 2;
  const Eigen::Index k = subspace_basis.cols() / 2;
  if (k == 0) return Eigen::MatrixXd(d, 0);

  if (max_abs(subspace_basis.transpose() * subspace_basis -
              Eigen::MatrixXd::Identity(2 * k, 2 * k)) > tol)
    throw std::invalid_argument("symplectic_pair_basis: basis must be orthonormal");

  const Eigen::MatrixXd j = j_form(n);
  const Eigen::MatrixXd p = projector(subspace_basis, d);
  if (max_abs((Eigen::MatrixXd::Identity(d, d) - p) * j * p) > tol)
    throw std::invalid_argument("symplectic_pair_basis: span is not J-invariant");

  // Each unit vector w in the span that is orthogonal to all previously built
  // pairs yields the pair {v, J^T v} with v = (w + Jw)/sqrt(2); the pair spans
  // the J-invariant plane of w. Seeds are standard basis vectors projected
  // onto the span, scanned in index order, so the result is deterministic.
  Eigen::MatrixXd v(d, k);
  Eigen::MatrixXd collected(d, 0);
  for (Eigen::Index pair = 0; pair < k; ++pair) {
    bool found = false;
    for (Eigen::Index seed = 0; seed < d && !found; ++seed) {
      const Eigen::VectorXd cand = p.col(seed);
      const auto w = orthonormalize_against(cand, collected, tol);
      if (!w) continue;
      Eigen::VectorXd vcol(d);
      vcol.head(n) = w->head(n) + w->tail(n);
      vcol.tail(n) = -(w->head(n) - w->tail(n));
      vcol /= std::numbers::sqrt2;
      v.col(pair) = vcol;
      collected.conservativeResize(d, collected.cols() + 2);
      collected.col(collected.cols() - 2) = vcol;
      collected.col(collected.cols() - 1) = j.transpose() * vcol;
      found = true;
    }
    if (!found)
      throw std::runtime_error(
          "symplectic_pair_basis: no seed completes pair " + std::to_string(pair + 1) +
          " of " + std::to_string(k) + "; the subspace dimension is misclassified");
  }

  Eigen::MatrixXd block(d, 2 * k);
  block.leftCols(k) = v;
  block.rightCols(k) = j.transpose() * v;
  return block;
}

Eigen::MatrixXd TransformationParts::t() const {
  const Eigen::Index rows =
      std::max({t_cobar.rows(), t_co.rows(), t_cbarobar.rows(), t_cbaro.rows()});
  return hcat(rows, {&t_cobar, &t_co, &t_cbarobar, &t_cbaro});
}

Eigen::MatrixXd TransformationParts::t_tilde() const {
  const Eigen::Index rows =
      std::max({t_cobar.rows(), t_co.rows(), t_cbarobar.rows(), t_cbaro.rows()});
  return hcat(rows, {&t_cobar, &t_cbaro, &t_co, &t_cbarobar});
}

Eigen::MatrixXd TransformationParts::t_h() const {
  const Eigen::Index rows = std::max(t_cobar.rows(), t_cbaro.rows());
  return hcat(rows, {&t_cobar, &t_cbaro});
}

TransformationParts build_transformation(const KalmanSubspaces& subs, double tol) {
  TransformationParts parts;
  parts.n1 = subs.n1;
  parts.n2 = subs.n2;
  parts.n3 = subs.n3;
  parts.t_cobar = subs.basis_cobar;
  parts.t_cbaro = subs.basis_cbaro;
  parts.t_co = symplectic_pair_basis(subs.basis_co, tol);
  parts.t_cbarobar = symplectic_pair_basis(subs.basis_cbarobar, tol);
  return parts;
}

KalmanDecomposition apply_transformation(const QuadratureSystem& sys,
                                         const SLHModel& model,
                                         const TransformationParts& parts,
                                         BlockOrdering ordering,
                                         const ToleranceConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = sys.a.rows();
  const Eigen::Index n1 = parts.n1, n2 = parts.n2, n3 = parts.n3;
  if (2 * (n1 + n2 + n3) != d)
    throw std::invalid_argument("apply_transformation: block dimensions do not sum to 2n");
  if (model.hamiltonian.rows() != d || model.coupling.cols() != d)
    throw std::invalid_argument("apply_transformation: model shape mismatch");

  KalmanDecomposition dec;
  dec.parts = parts;
  dec.ordering = ordering;
  dec.t = parts.t();
  dec.t_tilde = parts.t_tilde();

  const Eigen::MatrixXd& tx = ordering == BlockOrdering::Ttilde ? dec.t_tilde : dec.t;
  dec.a_bar_raw = tx.transpose() * sys.a * tx;
  dec.b_bar_raw = tx.transpose() * sys.b;
  dec.c_bar_raw = sys.c * tx;
  dec.h_bar = tx.transpose() * model.hamiltonian * tx;
  dec.lambda_bar = model.coupling * tx;
  dec.a_bar_clean = clean_copy(dec.a_bar_raw, cfg.residual_tol);
  dec.b_bar_clean = clean_copy(dec.b_bar_raw, cfg.residual_tol);
  dec.c_bar_clean = clean_copy(dec.c_bar_raw, cfg.residual_tol);

  // Named blocks always refer to the Ttilde arrangement [h | co | cbarobar].
  const Eigen::MatrixXd att = ordering == BlockOrdering::Ttilde
                                  ? dec.a_bar_raw
                                  : Eigen::MatrixXd(dec.t_tilde.transpose() * sys.a *
                                                    dec.t_tilde);
  const Eigen::MatrixXd btt = ordering == BlockOrdering::Ttilde
                                  ? dec.b_bar_raw
                                  : Eigen::MatrixXd(dec.t_tilde.transpose() * sys.b);
  const Eigen::MatrixXd ctt = ordering == BlockOrdering::Ttilde
                                  ? dec.c_bar_raw
                                  : Eigen::MatrixXd(sys.c * dec.t_tilde);

  const Eigen::Index oh = 0, oco = 2 * n3, ocb = 2 * n3 + 2 * n1;
  dec.a_h = att.block(oh, oh, 2 * n3, 2 * n3);
  dec.a_h11 = att.block(0, 0, n3, n3);
  dec.a_h12 = att.block(0, n3, n3, n3);
  dec.a_h22 = att.block(n3, n3, n3, n3);
  dec.a_co = att.block(oco, oco, 2 * n1, 2 * n1);
  dec.a_cbarobar = att.block(ocb, ocb, 2 * n2, 2 * n2);
  dec.a_12 = att.block(0, oco, n3, 2 * n1);
  dec.a_13 = att.block(0, ocb, n3, 2 * n2);
  dec.a_24 = att.block(oco, n3, 2 * n1, n3);
  dec.a_34 = att.block(ocb, n3, 2 * n2, n3);
  dec.b_h = btt.topRows(2 * n3);
  dec.b_co = btt.middleRows(oco, 2 * n1);
  dec.c_h = ctt.leftCols(2 * n3);
  dec.c_co = ctt.middleCols(oco, 2 * n1);

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  dec.diagnostics.orthogonality =
      std::max(max_abs(dec.t.transpose() * dec.t - eye),
               max_abs(dec.t_tilde.transpose() * dec.t_tilde - eye));
  dec.diagnostics.block_symplectic =
      max_abs(dec.t_tilde.transpose() * j_form(d / 2) * dec.t_tilde -
              block_diag({j_form(n3), j_form(n1), j_form(n2)}));
  return dec;
}

StructureReport verify_canonical_structure(const KalmanDecomposition& dec,
                                           const QuadratureSystem& sys,
                                           const GramianPair& gram, double tol) {
  const Eigen::Index n1 = dec.parts.n1, n2 = dec.parts.n2, n3 = dec.parts.n3;
  const Eigen::Index d = 2 * (n1 + n2 + n3);

  // Block offsets and widths in the T ordering [cobar | co | cbarobar | cbaro].
  const Eigen::Index off[4] = {0, n3, n3 + 2 * n1, n3 + 2 * n1 + 2 * n2};
  const Eigen::Index width[4] = {n3, 2 * n1, 2 * n2, n3};

  const Eigen::MatrixXd at = dec.t.transpose() * sys.a * dec.t;
  const Eigen::MatrixXd bt = dec.t.transpose() * sys.b;
  const Eigen::MatrixXd ct = sys.c * dec.t;

  StructureReport out;

  // A_bar vanishes wherever a coupling would leak into a forbidden block.
  const int a_zero[][2] = {{1, 0}, {1, 2}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};
  for (const auto& rc : a_zero)
    out.structural_zeros =
        std::max(out.structural_zeros, block_max(at, off[rc[0]], width[rc[0]],
                                                 off[rc[1]], width[rc[1]]));
  // B_bar is supported on the cobar and co rows, C_bar on the co and cbaro cols.
  for (int blk : {2, 3})
    out.structural_zeros = std::max(
        out.structural_zeros, block_max(bt, off[blk], width[blk], 0, bt.cols()));
  for (int blk : {0, 2})
    out.structural_zeros = std::max(
        out.structural_zeros, block_max(ct, 0, ct.rows(), off[blk], width[blk]));

  // T^T W_c T lives in the leading (cobar|co) corner.
  const Eigen::MatrixXd wct = dec.t.transpose() * gram.wc * dec.t;
  const Eigen::Index tail = off[2];
  out.gramian_pattern =
      std::max({block_max(wct, tail, d - tail, 0, d), block_max(wct, 0, d, tail, d - tail)});
  // T^T W_o T touches only the co and cbaro blocks.
  const Eigen::MatrixXd wot = dec.t.transpose() * gram.wo * dec.t;
  for (int blk : {0, 2}) {
    out.gramian_pattern =
        std::max({out.gramian_pattern, block_max(wot, off[blk], width[blk], 0, d),
                  block_max(wot, 0, d, off[blk], width[blk])});
  }

  // The two decoupled diagonal blocks generate symplectic flows of their own.
  const HamiltonianCheck h_check = is_hamiltonian(dec.a_h, j_form(n3), tol);
  const HamiltonianCheck cb_check = is_hamiltonian(dec.a_cbarobar, j_form(n2), tol);
  out.hamiltonian_residual = std::max(h_check.residual, cb_check.residual);
  out.hamiltonian_pass = h_check.hamiltonian && cb_check.hamiltonian;

  // Invariance statements on the original matrices.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd p_cobar = projector(dec.parts.t_cobar, d);
  const Eigen::MatrixXd p_co = projector(dec.parts.t_co, d);
  const Eigen::MatrixXd p_cbarobar = projector(dec.parts.t_cbarobar, d);
  out.invariance_residual = std::max(
      {max_abs((eye - p_cobar) * sys.a * dec.parts.t_cobar),
       max_abs((eye - p_cobar - p_co) * sys.a * dec.parts.t_co),
       max_abs((eye - p_cobar - p_cbarobar) * sys.a * dec.parts.t_cbarobar),
       max_abs((eye - p_cobar - p_co) * sys.b), max_abs(sys.c * dec.parts.t_cobar),
       max_abs(sys.c * dec.parts.t_cbarobar)});

  out.pass = out.structural_zeros <= tol && out.gramian_pattern <= tol &&
             out.invariance_residual <= tol && out.hamiltonian_pass;
  return out;
}

Subsystems extract_subsystems(const KalmanDecomposition& dec,
                              const StructureReport& structure) {
  if (!structure.pass)
    throw std::runtime_error(
        "extract_subsystems: canonical-structure verification did not pass");
  Subsystems out;
  out.a_co = dec.a_co;
  out.b_co = dec.b_co;
  out.c_co = dec.c_co;
  out.a_h = dec.a_h;
  out.b_h = dec.b_h;
  out.c_h = dec.c_h;
  out.a_cbarobar = dec.a_cbarobar;
  return out;
}

TransferInvarianceReport transfer_function_invariance(
    const QuadratureSystem& sys, const KalmanDecomposition& dec,
    const std::vector<std::complex<double>>& sample_points, double tol) {
  if (sample_points.empty())
    throw std::invalid_argument("transfer_function_invariance: no sample points");
  const Eigen::Index d = sys.a.rows();
  const Eigen::Index p = sys.c.rows();
  const Eigen::Index dco = dec.a_co.rows();

  TransferInvarianceReport out;
  for (const auto& s : sample_points) {
    const Eigen::MatrixXcd full_resolvent =
        s * Eigen::MatrixXcd::Identity(d, d) - sys.a.cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(full_resolvent);
    if (!lu.isInvertible())
      throw std::runtime_error("transfer_function_invariance: sample point on spectrum");
    const Eigen::MatrixXcd g_full =
        sys.c.cast<std::complex<double>>() * lu.solve(sys.b.cast<std::complex<double>>());

    Eigen::MatrixXcd g_co = Eigen::MatrixXcd::Zero(p, sys.b.cols());
    if (dco > 0) {
      const Eigen::MatrixXcd co_resolvent =
          s * Eigen::MatrixXcd::Identity(dco, dco) - dec.a_co.cast<std::complex<double>>();
      Eigen::FullPivLU<Eigen::MatrixXcd> lu_co(co_resolvent);
      if (!lu_co.isInvertible())
        throw std::runtime_error(
            "transfer_function_invariance: sample point on reduced spectrum");
      g_co = dec.c_co.cast<std::complex<double>>() *
             lu_co.solve(dec.b_co.cast<std::complex<double>>());
    }
    if (g_full.size() > 0)
      out.max_mismatch = std::max(out.max_mismatch, (g_full - g_co).cwiseAbs().maxCoeff());
  }
  out.pass = out.max_mismatch <= tol;
  return out;
}

std::vector<std::complex<double>> default_sample_points(const Eigen::MatrixXd& a,
                                                        const Eigen::MatrixXd& a_co,
                                                        Eigen::Index count) {
  if (count <= 0) throw std::invalid_argument("default_sample_points: count must be positive");
  std::vector<std::complex<double>> eigs;
  for (const auto* m : {&a, &a_co}) {
    if (m->rows() == 0) continue;
    Eigen::EigenSolver<Eigen::MatrixXd> es(*m, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      eigs.push_back(es.eigenvalues()(i));
  }

  std::vector<std::complex<double>> out;
  double y = 0.3171;
  const double step = 0.6131;
  const Eigen::Index max_attempts = count + static_cast<Eigen::Index>(eigs.size()) + 16;
  for (Eigen::Index attempt = 0;
       attempt < max_attempts && out.size() < static_cast<size_t>(count); ++attempt) {
    const std::complex<double> s(0.0, y);
    bool clear = true;
    for (const auto& ev : eigs) clear = clear && std::abs(s - ev) > 1e-3;
    if (clear) out.push_back(s);
    y += step;
  }
  if (out.size() < static_cast<size_t>(count))
    throw std::runtime_error("default_sample_points: could not avoid the spectrum");
  return out;
}

ChangedBasis change_basis(const KalmanDecomposition& dec, const Eigen::MatrixXd& t_extra,
                          double tol) {
  const Eigen::Index d = dec.a_bar_raw.rows();
  if (t_extra.rows() != d || t_extra.cols() != d)
    throw std::invalid_argument("change_basis: transformation shape mismatch");
  if (max_abs(t_extra.transpose() * t_extra - Eigen::MatrixXd::Identity(d, d)) > tol)
    throw std::invalid_argument("change_basis: transformation must be orthogonal");

  const Eigen::MatrixXd& base =
      dec.ordering == BlockOrdering::Ttilde ? dec.t_tilde : dec.t;
  ChangedBasis out;
  out.t_combined = base * t_extra.transpose();
  out.a = t_extra * dec.a_bar_raw * t_extra.transpose();
  out.b = t_extra * dec.b_bar_raw;
  out.c = dec.c_bar_raw * t_extra.transpose();
  out.h = t_extra * dec.h_bar * t_extra.transpose();
  out.lambda = dec.lambda_bar * t_extra.transpose();
  return out;
}

}  // namespace qkalman
