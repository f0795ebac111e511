#pragma once

#include <filesystem>
#include <memory>

#include <Eigen/Dense>

#include "graphlasso/graph.hpp"

namespace graphlasso {

/// Graph Fourier basis: orthonormal eigenvectors of the Laplacian (columns of
/// `modes`) with their eigenvalues in ascending order.
///
/// Each column is signed so that its largest-magnitude entry is positive
/// (lowest index wins a tie), which makes the basis reproducible. Eigenvalues
/// in [-1e-8, 0) are clamped to 0. For repeated eigenvalues only the spanned
/// eigenspace is meaningful.
class FourierBasis {
public:
    FourierBasis(Eigen::MatrixXd modes, Eigen::VectorXd spectrum);

    Eigen::Index size() const noexcept { return modes_.rows(); }
    const Eigen::MatrixXd& modes() const noexcept { return modes_; }
    const Eigen::VectorXd& spectrum() const noexcept { return spectrum_; }

    /// Spectral coefficients U^T f.
    Eigen::VectorXd forward(const Eigen::VectorXd& signal) const;
    /// Node-domain signal U x.
    Eigen::VectorXd inverse(const Eigen::VectorXd& coefficients) const;

private:
    Eigen::MatrixXd modes_;
    Eigen::VectorXd spectrum_;
};

using FourierBasisPtr = std::shared_ptr<const FourierBasis>;

/// Full dense symmetric eigendecomposition. Throws SpectralError if the
/// solver does not converge or an eigenvalue is below -1e-8.
FourierBasis eigendecompose(const LaplacianMatrix& laplacian);

Eigen::VectorXd forward_transform(const Eigen::VectorXd& signal, const FourierBasis& basis);
Eigen::VectorXd inverse_transform(const Eigen::VectorXd& coefficients, const FourierBasis& basis);

/// Writes "index,eigenvalue" rows.
void save_spectrum_csv(const FourierBasis& basis, const std::filesystem::path& path);

}  // namespace graphlasso
