#pragma once

#include <Eigen/Dense>

#include <string>

namespace scmimo {

enum class Receiver { kMrc, kZf, kMmse };

std::string to_string(Receiver receiver);  // "MRC" / "ZF" / "MMSE"
Receiver receiver_from_string(const std::string& name);

// Linear combiner T (M x K):
//   MRC  T = G
//   ZF   T = G (G^H G)^{-1}
//   MMSE T^H = (G^H G + I / p_u)^{-1} G^H
// Throws SingularChannel for ZF with rank-deficient G.
Eigen::MatrixXcd combiner(const Eigen::MatrixXcd& G, Receiver receiver, double p_u);

// MMSE combiner from the M x M form T^H = G^H (G G^H + I / p_u)^{-1}.
Eigen::MatrixXcd mmse_combiner_right_form(const Eigen::MatrixXcd& G, double p_u);

// SINR_k = p_u |t_k^H g_k|^2 / (p_u sum_{l!=k} |t_k^H g_l|^2 + ||t_k||^2)
// for an arbitrary combiner.
Eigen::VectorXd per_user_sinr(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& G, double p_u);

// Receiver-specific closed forms, used by the Monte-Carlo estimator.
// MRC: p_u ||g_k||^4 / (p_u sum_{l!=k} |g_k^H g_l|^2 + ||g_k||^2)
Eigen::VectorXd mrc_sinr(const Eigen::MatrixXcd& G, double p_u);
// ZF: p_u / [(G^H G)^{-1}]_{kk}, from a QR factorization of G.
Eigen::VectorXd zf_sinr(const Eigen::MatrixXcd& G, double p_u);
// MMSE: 1 / [(I + p_u G^H G)^{-1}]_{kk} - 1.
Eigen::VectorXd mmse_sinr(const Eigen::MatrixXcd& G, double p_u);

Eigen::VectorXd closed_form_sinr(const Eigen::MatrixXcd& G, Receiver receiver, double p_u);

struct IdentityResidual {
  double max_relative_residual = 0.0;
  // G is close enough to rank deficiency (condition number of G^H G above
  // 1e10) that the residual is not expected to reach 1e-9.
  bool ill_conditioned = false;
};

// Per-realization check of the determinant identities behind the MMSE
// closed form: for every user k,
//   [(G^H G)^{-1}]_{kk} = |G_k^H G_k| / |G^H G|
// and
//   log2 (1 / [(I + p_u G^H G)^{-1}]_{kk})
//     = log2 |I_K + p_u G^H G| - log2 |I_{K-1} + p_u G_k^H G_k|,
// where G_k is G without column k. Returns the largest relative difference
// between the two sides. Throws SingularChannel for singular G^H G.
IdentityResidual mmse_det_identity_check(const Eigen::MatrixXcd& G, double p_u);

}  // namespace scmimo
