#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphlasso/solvers.hpp"

namespace graphlasso::plots {

/// Eigenvalue index vs eigenvalue scatter.
void spectrum_svg(const Eigen::VectorXd& spectrum, const std::filesystem::path& path);

/// Stem plot of the true coefficients overlaid with a recovered vector.
void recovery_svg(const Eigen::VectorXd& truth, const Eigen::VectorXd& recovered,
                  const std::string& title, const std::filesystem::path& path);

/// Total energy per logged iteration. Returns false (and writes nothing) when
/// the trace is empty.
bool energy_svg(const std::vector<TraceRow>& trace, const std::string& title,
                const std::filesystem::path& path);

}  // namespace graphlasso::plots
