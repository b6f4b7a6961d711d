#include "replab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "replab/errors.hpp"

namespace replab {

AlgebraParams::AlgebraParams(double alpha, std::vector<double> beta, std::vector<double> gamma)
    : alpha_(alpha), beta_(std::move(beta)), gamma_(std::move(gamma)) {
    if (beta_.empty())
        throw InvalidAlgebraError("algebra order must be at least 1");
    if (beta_.size() != gamma_.size())
        throw InvalidAlgebraError("beta and gamma must have the same length (got " +
                                  std::to_string(beta_.size()) + " and " +
                                  std::to_string(gamma_.size()) + ")");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::isfinite(alpha_) || !std::all_of(beta_.begin(), beta_.end(), finite) ||
        !std::all_of(gamma_.begin(), gamma_.end(), finite))
        throw InvalidAlgebraError("algebra coefficients must be finite");
    if (beta_.back() == 0.0 && gamma_.back() == 0.0)
        throw InvalidAlgebraError("degree condition violated: beta_n and gamma_n are both zero");
}

double RelationResidual::max() const {
    return std::max({primary_norm, conjugate_norm, commutator_norm});
}

AlgebraParams from_surface(const SurfaceParams& s) {
    if (!(s.hbar > 0.0) || !std::isfinite(s.hbar))
        throw PreconditionError("hbar must be a positive real");
    if (s.beta_tilde.size() != s.gamma_tilde.size())
        throw PreconditionError("beta_tilde and gamma_tilde must have the same length");
    if (s.beta_tilde.empty())
        throw PreconditionError("surface coefficients must have length at least 1");

    const double scale = -2.0 * s.hbar * s.hbar;
    std::vector<double> beta(s.beta_tilde.size());
    std::vector<double> gamma(s.gamma_tilde.size());
    for (std::size_t k = 0; k < beta.size(); ++k) {
        beta[k] = scale * s.beta_tilde[k];
        gamma[k] = scale * s.gamma_tilde[k];
    }
    beta[0] -= 1.0;
    gamma[0] += 2.0;
    return AlgebraParams(scale * s.alpha0, std::move(beta), std::move(gamma));
}

AlgebraParams henon_preset(double a, double b, double r) {
    return AlgebraParams(a + r + b * r - r * r, {-b, 0.0}, {2.0 * r, -1.0});
}

bool is_henon(const AlgebraParams& p) {
    const auto& beta = p.beta();
    if (!std::all_of(beta.begin() + 1, beta.end(), [](double v) { return v == 0.0; }))
        return false;
    return p.gamma().back() != 0.0;
}

double residual_scale(const CMatrix& W) {
    const double f = W.norm();
    return 1.0 + f * f * f;
}

RelationResidual relation_residual(const AlgebraParams& p, const CMatrix& W) {
    if (W.rows() != W.cols())
        throw ShapeError("relation_residual: matrix must be square, got " +
                         std::to_string(W.rows()) + "x" + std::to_string(W.cols()));
    const CMatrix V = W.adjoint();
    const CMatrix WV = W * V;
    const CMatrix VW = V * W;

    // (VW)^k W and (WV)^k W for the W-relation; V (VW)^k and V (WV)^k for the V-relation.
    CMatrix w_rel = W * W * V - p.alpha() * W;
    CMatrix v_rel = W * V * V - p.alpha() * V;
    CMatrix vw_pow = CMatrix::Identity(W.rows(), W.cols());
    CMatrix wv_pow = vw_pow;
    for (std::size_t k = 1; k <= p.order(); ++k) {
        vw_pow = vw_pow * VW;
        wv_pow = wv_pow * WV;
        const double bk = p.beta_k(k);
        const double gk = p.gamma_k(k);
        if (bk != 0.0) {
            w_rel -= bk * (vw_pow * W);
            v_rel -= bk * (V * vw_pow);
        }
        if (gk != 0.0) {
            w_rel -= gk * (wv_pow * W);
            v_rel -= gk * (V * wv_pow);
        }
    }

    RelationResidual res;
    res.primary_norm = w_rel.norm();
    res.conjugate_norm = v_rel.norm();
    res.commutator_norm = (WV * VW - VW * WV).norm();
    return res;
}

} // namespace replab
