#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace replab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Parameters (n, alpha, beta, gamma) of the order-n algebra with relations
///
///   W^2 V = alpha W + sum_k beta_k (VW)^k W + sum_k gamma_k (WV)^k W
///   W V^2 = alpha V + sum_k beta_k V (VW)^k + sum_k gamma_k V (WV)^k
///
/// Coefficients are stored in increasing k, so beta()[0] is beta_1.
class AlgebraParams {
public:
    /// Throws InvalidAlgebraError if the vectors are empty, differ in length,
    /// contain non-finite values, or both top coefficients vanish.
    AlgebraParams(double alpha, std::vector<double> beta, std::vector<double> gamma);

    std::size_t order() const { return beta_.size(); }
    double alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& gamma() const { return gamma_; }

    /// 1-indexed accessors matching the usual notation.
    double beta_k(std::size_t k) const { return beta_.at(k - 1); }
    double gamma_k(std::size_t k) const { return gamma_.at(k - 1); }

    friend bool operator==(const AlgebraParams&, const AlgebraParams&) = default;

private:
    double alpha_;
    std::vector<double> beta_;
    std::vector<double> gamma_;
};

/// Data of the classical surface whose fuzzy counterpart is the algebra.
/// The split of each alpha_k into beta_tilde_k + gamma_tilde_k is chosen by
/// the caller.
struct SurfaceParams {
    double hbar = 1.0;
    double alpha0 = 0.0;
    std::vector<double> beta_tilde;
    std::vector<double> gamma_tilde;
};

struct RelationResidual {
    double primary_norm = 0.0;
    double conjugate_norm = 0.0;
    double commutator_norm = 0.0;

    double max() const;
};

/// alpha = -2 hbar^2 alpha0, beta_1 = -2 hbar^2 bt_1 - 1, gamma_1 = -2 hbar^2 gt_1 + 2,
/// and beta_k, gamma_k = -2 hbar^2 (bt_k, gt_k) for k >= 2.
AlgebraParams from_surface(const SurfaceParams& s);

/// Second-order Henon algebra whose dynamical map is the Henon map
/// (x, y) -> (a - b y - x^2, x) conjugated by the shift (x, y) + (r, r).
AlgebraParams henon_preset(double a, double b, double r);

/// beta = (b, 0, ..., 0) and gamma_n != 0.
bool is_henon(const AlgebraParams& p);

/// Frobenius-norm defects of both defining relations and of [WV, VW],
/// with V = W^dagger. Throws ShapeError for non-square input.
RelationResidual relation_residual(const AlgebraParams& p, const CMatrix& W);

/// Scale 1 + ||W||_F^3 used for relative residual tolerances.
double residual_scale(const CMatrix& W);

} // namespace replab
