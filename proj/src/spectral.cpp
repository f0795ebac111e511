#include "graphlasso/spectral.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "graphlasso/error.hpp"

namespace graphlasso {

namespace {

constexpr double kClampTolerance = 1e-8;

void fix_sign(Eigen::Ref<Eigen::VectorXd> column) {
    const double peak = column.cwiseAbs().maxCoeff();
    // Treat entries within round-off of the peak as tied so the choice is
    // stable across BLAS/ordering differences.
    const double tie = peak * (1.0 - 1e-12);
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        if (std::abs(column[i]) >= tie) {
            if (column[i] < 0.0) column = -column;
            return;
        }
    }
}

}  // namespace

FourierBasis::FourierBasis(Eigen::MatrixXd modes, Eigen::VectorXd spectrum)
    : modes_(std::move(modes)), spectrum_(std::move(spectrum)) {
    if (modes_.rows() != modes_.cols() || modes_.rows() != spectrum_.size()) {
        throw InvalidArgument("Fourier basis dimensions are inconsistent");
    }
}

Eigen::VectorXd FourierBasis::forward(const Eigen::VectorXd& signal) const {
    if (signal.size() != size()) throw InvalidArgument("forward transform: dimension mismatch");
    return modes_.transpose() * signal;
}

Eigen::VectorXd FourierBasis::inverse(const Eigen::VectorXd& coefficients) const {
    if (coefficients.size() != size()) {
        throw InvalidArgument("inverse transform: dimension mismatch");
    }
    return modes_ * coefficients;
}

FourierBasis eigendecompose(const LaplacianMatrix& laplacian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian.entries(),
                                                          Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw SpectralError("symmetric eigensolver did not converge");
    }
    Eigen::VectorXd spectrum = solver.eigenvalues();
    Eigen::MatrixXd modes = solver.eigenvectors();
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (spectrum[i] < 0.0) {
            if (spectrum[i] < -kClampTolerance) {
                throw SpectralError("Laplacian has a negative eigenvalue " +
                                    std::to_string(spectrum[i]));
            }
            spectrum[i] = 0.0;
        }
        fix_sign(modes.col(i));
    }
    return FourierBasis(std::move(modes), std::move(spectrum));
}

Eigen::VectorXd forward_transform(const Eigen::VectorXd& signal, const FourierBasis& basis) {
    return basis.forward(signal);
}

Eigen::VectorXd inverse_transform(const Eigen::VectorXd& coefficients, const FourierBasis& basis) {
    return basis.inverse(coefficients);
}

void save_spectrum_csv(const FourierBasis& basis, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "index,eigenvalue\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        out << i << ',' << basis.spectrum()[i] << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace graphlasso
