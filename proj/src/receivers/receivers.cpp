#include "scmimo/receivers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "scmimo/errors.hpp"

namespace scmimo {

std::string to_string(Receiver receiver) {
  switch (receiver) {
    case Receiver::kMrc:
      return "MRC";
    case Receiver::kZf:
      return "ZF";
    case Receiver::kMmse:
      return "MMSE";
  }
  return "?";
}

Receiver receiver_from_string(const std::string& name) {
  if (name == "MRC") return Receiver::kMrc;
  if (name == "ZF") return Receiver::kZf;
  if (name == "MMSE") return Receiver::kMmse;
  throw InvalidArgument("unknown receiver '" + name + "' (expected MRC, ZF or MMSE)");
}

namespace {

void check_snr(double p_u) {
  if (!std::isfinite(p_u) || p_u <= 0.0) throw InvalidArgument("p_u must be finite and > 0");
}

// R factor of a thin QR of G, with a rank check on its diagonal.
Eigen::MatrixXcd checked_r_factor(const Eigen::MatrixXcd& G) {
  if (G.cols() > G.rows()) throw SingularChannel("more users than antennas");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  const Eigen::Index K = G.cols();
  Eigen::MatrixXcd R = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
  const double scale = G.norm();
  const double floor = K * std::numeric_limits<double>::epsilon() * scale;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(std::abs(R(k, k)) > floor)) throw SingularChannel("G^H G is singular to working precision");
  }
  return R;
}

}  // namespace

Eigen::MatrixXcd combiner(const Eigen::MatrixXcd& G, Receiver receiver, double p_u) {
  const Eigen::Index K = G.cols();
  switch (receiver) {
    case Receiver::kMrc:
      return G;
    case Receiver::kZf: {
      const Eigen::MatrixXcd R = checked_r_factor(G);
      const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(K, K);
      const Eigen::MatrixXcd r_inv = R.triangularView<Eigen::Upper>().solve(eye);
      return G * (r_inv * r_inv.adjoint());
    }
    case Receiver::kMmse: {
      check_snr(p_u);
      const Eigen::MatrixXcd regularized =
          G.adjoint() * G + Eigen::MatrixXcd::Identity(K, K) / p_u;
      const Eigen::MatrixXcd t_h = regularized.llt().solve(G.adjoint());
      return t_h.adjoint();
    }
  }
  throw InvalidArgument("unknown receiver");
}

Eigen::MatrixXcd mmse_combiner_right_form(const Eigen::MatrixXcd& G, double p_u) {
  check_snr(p_u);
  const Eigen::Index M = G.rows();
  const Eigen::MatrixXcd regularized = G * G.adjoint() + Eigen::MatrixXcd::Identity(M, M) / p_u;
  // T^H = G^H X^{-1}  <=>  T = X^{-1} G for Hermitian X.
  return regularized.llt().solve(G);
}

Eigen::VectorXd per_user_sinr(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& G, double p_u) {
  if (T.rows() != G.rows() || T.cols() != G.cols()) {
    throw InvalidArgument("per_user_sinr: combiner and channel dimensions differ");
  }
  const Eigen::MatrixXcd C = T.adjoint() * G;  // C(k, l) = t_k^H g_l
  const Eigen::Index K = G.cols();
  Eigen::VectorXd sinr(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double interference = 0.0;
    for (Eigen::Index l = 0; l < K; ++l) {
      if (l != k) interference += std::norm(C(k, l));
    }
    sinr(k) = p_u * std::norm(C(k, k)) / (p_u * interference + T.col(k).squaredNorm());
  }
  return sinr;
}

Eigen::VectorXd mrc_sinr(const Eigen::MatrixXcd& G, double p_u) {
  const Eigen::MatrixXcd W = G.adjoint() * G;
  const Eigen::Index K = G.cols();
  Eigen::VectorXd sinr(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double norm2 = W(k, k).real();
    double interference = 0.0;
    for (Eigen::Index l = 0; l < K; ++l) {
      if (l != k) interference += std::norm(W(k, l));
    }
    sinr(k) = p_u * norm2 * norm2 / (p_u * interference + norm2);
  }
  return sinr;
}

Eigen::VectorXd zf_sinr(const Eigen::MatrixXcd& G, double p_u) {
  const Eigen::MatrixXcd R = checked_r_factor(G);
  const Eigen::Index K = G.cols();
  const Eigen::MatrixXcd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(K, K));
  // (G^H G)^{-1} = R^{-1} R^{-H}, so its k-th diagonal entry is the squared
  // norm of row k of R^{-1}.
  Eigen::VectorXd sinr(K);
  for (Eigen::Index k = 0; k < K; ++k) sinr(k) = p_u / r_inv.row(k).squaredNorm();
  return sinr;
}

Eigen::VectorXd mmse_sinr(const Eigen::MatrixXcd& G, double p_u) {
  check_snr(p_u);
  const Eigen::Index K = G.cols();
  const Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(K, K) + p_u * (G.adjoint() * G);
  const Eigen::LLT<Eigen::MatrixXcd> llt(B);
  const Eigen::MatrixXcd l_inv =
      llt.matrixL().solve(Eigen::MatrixXcd::Identity(K, K));
  // B^{-1} = L^{-H} L^{-1}: diagonal entry k is the squared norm of column k of L^{-1}.
  Eigen::VectorXd sinr(K);
  for (Eigen::Index k = 0; k < K; ++k) sinr(k) = std::max(0.0, 1.0 / l_inv.col(k).squaredNorm() - 1.0);
  return sinr;
}

Eigen::VectorXd closed_form_sinr(const Eigen::MatrixXcd& G, Receiver receiver, double p_u) {
  switch (receiver) {
    case Receiver::kMrc:
      return mrc_sinr(G, p_u);
    case Receiver::kZf:
      return zf_sinr(G, p_u);
    case Receiver::kMmse:
      return mmse_sinr(G, p_u);
  }
  throw InvalidArgument("unknown receiver");
}

namespace {

Eigen::MatrixXcd drop_index(const Eigen::MatrixXcd& W, Eigen::Index k) {
  const Eigen::Index K = W.rows();
  Eigen::MatrixXcd out(K - 1, K - 1);
  for (Eigen::Index i = 0, r = 0; i < K; ++i) {
    if (i == k) continue;
    for (Eigen::Index j = 0, c = 0; j < K; ++j) {
      if (j == k) continue;
      out(r, c++) = W(i, j);
    }
    ++r;
  }
  return out;
}

// ln det of a Hermitian positive definite matrix; empty matrices give 0.
double log_det_hpd(const Eigen::MatrixXcd& X) {
  if (X.rows() == 0) return 0.0;
  const Eigen::LLT<Eigen::MatrixXcd> llt(X);
  if (llt.info() != Eigen::Success) throw SingularChannel("matrix is not positive definite");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) acc += std::log(llt.matrixLLT()(i, i).real());
  return 2.0 * acc;
}

double relative_difference(double a, double b) {
  const double denom = std::max(std::abs(b), std::numeric_limits<double>::min());
  return std::abs(a - b) / denom;
}

}  // namespace

IdentityResidual mmse_det_identity_check(const Eigen::MatrixXcd& G, double p_u) {
  check_snr(p_u);
  const Eigen::Index K = G.cols();
  const Eigen::MatrixXcd W = G.adjoint() * G;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(W, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues()(0);
  const double lambda_max = eig.eigenvalues()(K - 1);
  if (!(lambda_min > K * std::numeric_limits<double>::epsilon() * lambda_max)) {
    throw SingularChannel("mmse_det_identity_check: G^H G is singular");
  }
  IdentityResidual out;
  out.ill_conditioned = lambda_max / lambda_min > 1e10;

  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(K, K);
  const Eigen::MatrixXcd w_inv = W.llt().solve(eye);
  const Eigen::MatrixXcd B = eye + p_u * W;
  const Eigen::MatrixXcd b_inv = B.llt().solve(eye);
  const double log_det_w = log_det_hpd(W);
  const double log_det_b = log_det_hpd(B);

  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::MatrixXcd w_k = drop_index(W, k);
    const double ratio = std::exp(log_det_hpd(w_k) - log_det_w);
    out.max_relative_residual =
        std::max(out.max_relative_residual, relative_difference(w_inv(k, k).real(), ratio));

    const double direct = -std::log2(b_inv(k, k).real());
    const Eigen::MatrixXcd b_k = Eigen::MatrixXcd::Identity(K - 1, K - 1) + p_u * w_k;
    const double via_dets = (log_det_b - log_det_hpd(b_k)) / std::log(2.0);
    out.max_relative_residual =
        std::max(out.max_relative_residual, relative_difference(direct, via_dets));
  }
  return out;
}

}  // namespace scmimo
