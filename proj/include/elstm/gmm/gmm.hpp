#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elstm/datapipe/sensor_frame.hpp"
#include "elstm/error.hpp"
#include "elstm/numkernel/matrix.hpp"

namespace elstm::gmm {

/// Raised by m_step when a component receives (almost) no responsibility.
class DegenerateComponent : public NumericError {
public:
    using NumericError::NumericError;
};

struct EmConfig {
    std::size_t components = 2;
    std::size_t max_iterations = 500;
    /// Convergence once the mean per-point log-likelihood improves by less than this.
    double tolerance = 1e-6;
    double ridge = 1e-6;
    std::size_t restarts = 5;
    std::uint64_t seed = 42;
};

void validate(const EmConfig& cfg);

/// Full-covariance Gaussian mixture.
struct GmmModel {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<num::Matrix> covariances;
    /// Verdict per component; empty until map_clusters has run.
    std::vector<data::Label> labels;

    std::size_t components() const noexcept { return weights.size(); }
    std::size_t dimension() const noexcept { return means.empty() ? 0 : means.front().size(); }
};

/// log N(x | mean, cov); throws NumericError if cov is not positive definite.
double log_gaussian_pdf(std::span<const double> x, std::span<const double> mean, const num::Matrix& cov);
double gaussian_pdf(std::span<const double> x, std::span<const double> mean, const num::Matrix& cov);

struct EStep {
    /// N x K posteriors, rows summing to one.
    num::Matrix responsibilities;
    /// Mean per-point log p(x | model).
    double log_likelihood = 0.0;
};

/// Posteriors computed in log space with the per-row maximum subtracted.
EStep e_step(const num::Matrix& data, const GmmModel& model);

/// Weights, means and covariances (normalized by each component's total
/// responsibility) from the posteriors; ridge * I is added to every covariance.
GmmModel m_step(const num::Matrix& data, const num::Matrix& responsibilities, double ridge);

struct FitResult {
    GmmModel model;
    /// Mean log-likelihood after each E-step of the winning restart.
    std::vector<double> trace;
    std::size_t best_restart = 0;
    std::size_t failed_restarts = 0;
    bool converged = false;
};

/// EM from `restarts` seeded initializations (K distinct data points as
/// means, global covariance, uniform weights); keeps the highest final
/// log-likelihood. Degenerate restarts are skipped; if all fail, NumericError.
FitResult fit(const num::Matrix& data, const EmConfig& cfg);

struct Prediction {
    std::vector<std::size_t> clusters;
    num::Matrix posteriors;
};

/// Most probable component per row, ties to the lower index.
Prediction predict(const GmmModel& model, const num::Matrix& data);

/// K = 2 only: the component whose mean has the larger e_rec coordinate
/// (index `coordinate`) is abnormal.
std::vector<data::Label> map_clusters(const GmmModel& model, std::size_t coordinate = 2);

/// K = 2 only: the component whose assigned points have the larger mean
/// `score` is abnormal. Used when e_rec is not a mixture coordinate.
std::vector<data::Label> map_clusters_by_score(std::span<const std::size_t> clusters, std::span<const double> score,
                                               std::size_t components);

}  // namespace elstm::gmm
