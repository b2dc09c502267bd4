#include "elstm/gmm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "elstm/log.hpp"
#include "elstm/numkernel/linalg.hpp"
#include "elstm/numkernel/rng.hpp"

namespace elstm::gmm {

using num::Matrix;

namespace {

constexpr double kDegenerateMass = 1e-12;

// Cholesky factor and log-normalizer of one component.
struct Component {
    Matrix lower;
    double log_norm = 0.0;
};

Component prepare(const std::vector<double>& mean, const Matrix& cov) {
    const std::size_t d = mean.size();
    if (cov.rows() != d || cov.cols() != d) {
        throw DimensionError("covariance " + cov.shape_string() + " does not match dimension " + std::to_string(d));
    }
    Component c;
    c.lower = num::cholesky(cov);
    c.log_norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                         num::log_det_from_cholesky(c.lower));
    return c;
}

double log_density(const Component& c, std::span<const double> x, std::span<const double> mean,
                   std::vector<double>& scratch) {
    scratch.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) scratch[j] = x[j] - mean[j];
    num::solve_lower_inplace(c.lower, scratch);
    double q = 0.0;
    for (double v : scratch) q += v * v;
    return c.log_norm - 0.5 * q;
}

void check_data(const Matrix& data, std::size_t dim) {
    if (data.rows() == 0) throw DimensionError("GMM: no data points");
    if (data.cols() != dim) {
        throw DimensionError("GMM: points have " + std::to_string(data.cols()) + " coordinates, model has " +
                             std::to_string(dim));
    }
}

Matrix global_covariance(const Matrix& data, double ridge) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += data(i, j);
    }
    for (double& m : mean) m /= static_cast<double>(n);
    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double da = data(i, a) - mean[a];
            for (std::size_t b = 0; b < d; ++b) cov(a, b) += da * (data(i, b) - mean[b]);
        }
    }
    for (double& v : cov.values()) v /= static_cast<double>(n);
    for (std::size_t a = 0; a < d; ++a) cov(a, a) += ridge;
    return cov;
}

GmmModel initial_model(const Matrix& data, const EmConfig& cfg, num::Rng& rng) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    GmmModel m;
    m.weights.assign(cfg.components, 1.0 / static_cast<double>(cfg.components));
    std::vector<std::size_t> chosen;
    const Matrix cov = global_covariance(data, cfg.ridge);
    std::size_t attempts = 0;
    while (chosen.size() < cfg.components) {
        const std::size_t i = rng.index(n);
        bool duplicate = false;
        for (std::size_t c : chosen) {
            bool same = true;
            for (std::size_t j = 0; j < d && same; ++j) same = data(c, j) == data(i, j);
            duplicate = duplicate || same;
        }
        if (duplicate && ++attempts < 100 * n) continue;
        chosen.push_back(i);
        auto row = data.row(i);
        m.means.emplace_back(row.begin(), row.end());
        m.covariances.push_back(cov);
    }
    return m;
}

}  // namespace

void validate(const EmConfig& cfg) {
    if (cfg.components == 0) throw ConfigError("GMM components must be >= 1");
    if (cfg.max_iterations == 0) throw ConfigError("GMM max_iterations must be >= 1");
    if (!(cfg.tolerance > 0.0)) throw ConfigError("GMM tolerance must be > 0");
    if (!(cfg.ridge >= 0.0)) throw ConfigError("GMM ridge must be >= 0");
    if (cfg.restarts == 0) throw ConfigError("GMM restarts must be >= 1");
}

double log_gaussian_pdf(std::span<const double> x, std::span<const double> mean, const Matrix& cov) {
    if (x.size() != mean.size()) throw DimensionError("gaussian_pdf: point and mean sizes differ");
    const std::vector<double> mu(mean.begin(), mean.end());
    const Component c = prepare(mu, cov);
    std::vector<double> scratch;
    return log_density(c, x, mean, scratch);
}

double gaussian_pdf(std::span<const double> x, std::span<const double> mean, const Matrix& cov) {
    return std::exp(log_gaussian_pdf(x, mean, cov));
}

EStep e_step(const Matrix& data, const GmmModel& model) {
    const std::size_t k = model.components();
    if (k == 0) throw ConfigError("e_step: model has no components");
    check_data(data, model.dimension());
    std::vector<Component> comps;
    std::vector<double> log_w(k);
    for (std::size_t c = 0; c < k; ++c) {
        comps.push_back(prepare(model.means[c], model.covariances[c]));
        log_w[c] = std::log(model.weights[c]);
    }
    EStep out;
    out.responsibilities = Matrix(data.rows(), k);
    std::vector<double> scratch;
    std::vector<double> lp(k);
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        auto x = data.row(i);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            lp[c] = log_w[c] + log_density(comps[c], x, model.means[c], scratch);
            top = std::max(top, lp[c]);
        }
        if (!std::isfinite(top)) {
            throw NumericError("e_step: every component density vanishes at point " + std::to_string(i));
        }
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += std::exp(lp[c] - top);
        auto r = out.responsibilities.row(i);
        for (std::size_t c = 0; c < k; ++c) r[c] = std::exp(lp[c] - top) / s;
        total += top + std::log(s);
    }
    out.log_likelihood = total / static_cast<double>(data.rows());
    return out;
}

GmmModel m_step(const Matrix& data, const Matrix& resp, double ridge) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    const std::size_t k = resp.cols();
    if (resp.rows() != n) {
        throw DimensionError("m_step: " + std::to_string(n) + " points but responsibilities " + resp.shape_string());
    }
    GmmModel m;
    for (std::size_t c = 0; c < k; ++c) {
        double mass = 0.0;
        std::vector<double> mean(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resp(i, c);
            mass += r;
            for (std::size_t j = 0; j < d; ++j) mean[j] += r * data(i, j);
        }
        if (mass < kDegenerateMass) {
            throw DegenerateComponent("m_step: component " + std::to_string(c) + " has total responsibility " +
                                      std::to_string(mass));
        }
        for (double& v : mean) v /= mass;
        Matrix cov(d, d);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resp(i, c);
            for (std::size_t a = 0; a < d; ++a) {
                const double da = data(i, a) - mean[a];
                for (std::size_t b = 0; b <= a; ++b) cov(a, b) += r * da * (data(i, b) - mean[b]);
            }
        }
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                cov(a, b) /= mass;
                cov(b, a) = cov(a, b);
            }
            cov(a, a) += ridge;
        }
        m.weights.push_back(mass / static_cast<double>(n));
        m.means.push_back(std::move(mean));
        m.covariances.push_back(std::move(cov));
    }
    return m;
}

FitResult fit(const Matrix& data, const EmConfig& cfg) {
    validate(cfg);
    if (data.rows() == 0 || data.cols() == 0) throw DimensionError("GMM fit: empty data");
    if (data.rows() <= cfg.components * data.cols()) {
        throw ConfigError("GMM fit: need more than K * d = " + std::to_string(cfg.components * data.cols()) +
                          " points, got " + std::to_string(data.rows()));
    }
    if (!num::all_finite(data)) throw DomainError("GMM fit: data contain non-finite values");

    const num::Rng root(cfg.seed);
    FitResult best;
    bool have_best = false;
    std::size_t failed = 0;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        num::Rng rng = root.stream("gmm.restart", r);
        try {
            FitResult run;
            run.model = initial_model(data, cfg, rng);
            EStep e = e_step(data, run.model);
            run.trace.push_back(e.log_likelihood);
            for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
                run.model = m_step(data, e.responsibilities, cfg.ridge);
                e = e_step(data, run.model);
                const double gain = e.log_likelihood - run.trace.back();
                run.trace.push_back(e.log_likelihood);
                if (std::abs(gain) < cfg.tolerance) {
                    run.converged = true;
                    break;
                }
            }
            run.best_restart = r;
            if (!have_best || run.trace.back() > best.trace.back()) {
                best = std::move(run);
                have_best = true;
            }
        } catch (const NumericError& err) {
            ++failed;
            log::warn("GMM restart " + std::to_string(r) + " abandoned: " + err.what());
        }
    }
    if (!have_best) throw NumericError("GMM fit: all " + std::to_string(cfg.restarts) + " restarts degenerated");
    best.failed_restarts = failed;
    return best;
}

Prediction predict(const GmmModel& model, const Matrix& data) {
    Prediction p;
    p.posteriors = e_step(data, model).responsibilities;
    p.clusters.resize(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        auto r = p.posteriors.row(i);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < r.size(); ++c) {
            if (r[c] > r[arg]) arg = c;
        }
        p.clusters[i] = arg;
    }
    return p;
}

std::vector<data::Label> map_clusters(const GmmModel& model, std::size_t coordinate) {
    if (model.components() != 2) {
        throw ConfigError("map_clusters supports K = 2 only, model has " + std::to_string(model.components()));
    }
    if (coordinate >= model.dimension()) {
        throw DimensionError("map_clusters: coordinate " + std::to_string(coordinate) + " outside dimension " +
                             std::to_string(model.dimension()));
    }
    const bool second = model.means[1][coordinate] > model.means[0][coordinate];
    return second ? std::vector{data::Label::normal, data::Label::abnormal}
                  : std::vector{data::Label::abnormal, data::Label::normal};
}

std::vector<data::Label> map_clusters_by_score(std::span<const std::size_t> clusters, std::span<const double> score,
                                               std::size_t components) {
    if (components != 2) {
        throw ConfigError("map_clusters supports K = 2 only, got " + std::to_string(components));
    }
    if (clusters.size() != score.size()) throw DimensionError("map_clusters_by_score: size mismatch");
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (clusters[i] >= 2) throw DimensionError("map_clusters_by_score: cluster index out of range");
        sum[clusters[i]] += score[i];
        ++count[clusters[i]];
    }
    // An empty cluster counts as abnormal, so every point keeps a normal verdict.
    const double inf = std::numeric_limits<double>::infinity();
    const double m0 = count[0] > 0 ? sum[0] / static_cast<double>(count[0]) : inf;
    const double m1 = count[1] > 0 ? sum[1] / static_cast<double>(count[1]) : inf;
    return m1 > m0 ? std::vector{data::Label::normal, data::Label::abnormal}
                   : std::vector{data::Label::abnormal, data::Label::normal};
}

}  // namespace elstm::gmm
