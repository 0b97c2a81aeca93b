#pragma once

#include "mdimpute/error.hpp"
#include "mdimpute/log.hpp"
#include "mdimpute/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>

namespace mdi {

/// One draw of linear-model parameters.
template <typename Scalar>
struct BasicRegressionDraw {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
    Scalar sigma{};
    bool ridged = false;  // ridge jitter was needed for a rank-deficient design
};
using RegressionDraw = BasicRegressionDraw<double>;

/// Relative jitter added to the Gram diagonal when the design is rank deficient.
inline constexpr double kRidgeJitter = 1e-8;

namespace detail {

template <typename Scalar>
struct GramSolve {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> inverse;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
    bool ridged = false;
};

template <typename DerivedX, typename DerivedY>
GramSolve<typename DerivedX::Scalar> least_squares(const Eigen::MatrixBase<DerivedX>& design,
                                                   const Eigen::MatrixBase<DerivedY>& response) {
    using Scalar = typename DerivedX::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const auto q = design.cols();
    if (design.rows() != response.size()) throw DataError("design and response lengths differ");
    if (design.rows() < q + 2)
        throw DataError("regression needs at least " + std::to_string(q + 2) + " rows, got " +
                        std::to_string(design.rows()));

    Mat gram = Mat::Zero(q, q);
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
    gram = gram.template selfadjointView<Eigen::Lower>();

    GramSolve<Scalar> out;
    const Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
    const Scalar largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(eig.eigenvalues().minCoeff() > largest * Scalar(1e-12))) {
        for (Eigen::Index j = 0; j < q; ++j) {
            const Scalar d = gram(j, j);
            gram(j, j) += Scalar(kRidgeJitter) * (d > Scalar(0) ? d : Scalar(1));
        }
        out.ridged = true;
        warn("rank-deficient regression design; adding ridge jitter 1e-8");
    }
    const Eigen::LDLT<Mat> ldlt(gram);
    out.inverse = ldlt.solve(Mat::Identity(q, q));
    out.coefficients = ldlt.solve(design.transpose() * response);
    return out;
}

}  // namespace detail

/// Posterior draw under the standard noninformative prior (the usual
/// "norm" imputation model): σ² = RSS / χ²(n − q), then
/// β ~ N(β̂, σ² (XᵀX)⁻¹).
///
/// Needs rows ≥ columns + 2. A rank-deficient design gets a ridge jitter
/// and a warning.
template <typename DerivedX, typename DerivedY>
BasicRegressionDraw<typename DerivedX::Scalar> bayes_linreg_draw(const Eigen::MatrixBase<DerivedX>& design,
                                                                 const Eigen::MatrixBase<DerivedY>& response,
                                                                 Rng& rng) {
    using Scalar = typename DerivedX::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const auto fit = detail::least_squares(design, response);
    const auto q = design.cols();
    const Scalar rss = (response - design * fit.coefficients).squaredNorm();
    const auto df = static_cast<double>(design.rows() - q);

    BasicRegressionDraw<Scalar> out;
    out.sigma = std::sqrt(rss / static_cast<Scalar>(rng.chi_squared(df)));
    const Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> chol(fit.inverse);
    Vec z(q);
    for (Eigen::Index j = 0; j < q; ++j) z[j] = static_cast<Scalar>(rng.normal());
    out.coefficients = fit.coefficients + (chol.matrixL() * z) * out.sigma;
    out.ridged = fit.ridged;
    return out;
}

template <typename DerivedX, typename DerivedY>
BasicRegressionDraw<typename DerivedX::Scalar> bayes_linreg_draw(const Eigen::MatrixBase<DerivedX>& design,
                                                                 const Eigen::MatrixBase<DerivedY>& response,
                                                                 std::uint64_t seed) {
    Rng rng(seed);
    return bayes_linreg_draw(design, response, rng);
}

/// Least-squares point fit with residual sd estimated on n − q degrees of freedom.
template <typename DerivedX, typename DerivedY>
BasicRegressionDraw<typename DerivedX::Scalar> ols_fit(const Eigen::MatrixBase<DerivedX>& design,
                                                       const Eigen::MatrixBase<DerivedY>& response) {
    using Scalar = typename DerivedX::Scalar;
    const auto fit = detail::least_squares(design, response);
    BasicRegressionDraw<Scalar> out;
    out.coefficients = fit.coefficients;
    const Scalar rss = (response - design * fit.coefficients).squaredNorm();
    out.sigma = std::sqrt(rss / static_cast<Scalar>(design.rows() - design.cols()));
    out.ridged = fit.ridged;
    return out;
}

}  // namespace mdi
