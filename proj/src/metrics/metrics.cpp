#include "elstm/metrics/metrics.hpp"

#include "elstm/error.hpp"

namespace elstm::metrics {

namespace {

double ratio(std::size_t num, std::size_t den, const std::string& name, std::vector<std::string>& flags) {
    if (den == 0) {
        flags.push_back(name);
        return 0.0;
    }
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r, const std::string& name, std::vector<std::string>& flags) {
    if (p + r == 0.0) {
        flags.push_back(name);
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

nlohmann::json class_json(const ClassMetrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

}  // namespace

ConfusionCounts confusion(std::span<const data::Label> predicted, std::span<const data::Label> truth) {
    if (predicted.size() != truth.size()) {
        throw DimensionError("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                             std::to_string(truth.size()) + " labels");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == data::Label::unknown || truth[i] == data::Label::unknown) {
            throw DomainError("confusion: unknown label at position " + std::to_string(i));
        }
        const bool p = predicted[i] == data::Label::abnormal;
        const bool t = truth[i] == data::Label::abnormal;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

MetricReport compute_metrics(const ConfusionCounts& c) {
    const std::size_t n = c.total();
    if (n == 0) throw DomainError("compute_metrics: no samples");
    MetricReport r;
    r.counts = c;
    auto& flags = r.flags;

    r.ac = ratio(c.tp + c.tn, n, "ac", flags);
    r.abnormal.precision = ratio(c.tp, c.tp + c.fp, "pr_abnormal", flags);
    r.abnormal.recall = ratio(c.tp, c.tp + c.fn, "rc_abnormal", flags);
    r.abnormal.f1 = harmonic(r.abnormal.precision, r.abnormal.recall, "f1_abnormal", flags);
    r.abnormal.support = c.tp + c.fn;
    r.normal.precision = ratio(c.tn, c.tn + c.fn, "pr_normal", flags);
    r.normal.recall = ratio(c.tn, c.tn + c.fp, "rc_normal", flags);
    r.normal.f1 = harmonic(r.normal.precision, r.normal.recall, "f1_normal", flags);
    r.normal.support = c.tn + c.fp;
    r.far = ratio(c.fp, c.fp + c.tn, "far", flags);

    const double wa = static_cast<double>(r.abnormal.support) / static_cast<double>(n);
    const double wn = static_cast<double>(r.normal.support) / static_cast<double>(n);
    r.pr = wa * r.abnormal.precision + wn * r.normal.precision;
    r.rc = wa * r.abnormal.recall + wn * r.normal.recall;
    r.f1 = wa * r.abnormal.f1 + wn * r.normal.f1;
    return r;
}

MetricReport compute_metrics(std::span<const data::Label> predicted, std::span<const data::Label> truth) {
    return compute_metrics(confusion(predicted, truth));
}

nlohmann::json to_json(const MetricReport& r) {
    return {{"ac", r.ac},
            {"pr", r.pr},
            {"rc", r.rc},
            {"f1", r.f1},
            {"far", r.far},
            {"per_class", {{"normal", class_json(r.normal)}, {"abnormal", class_json(r.abnormal)}}},
            {"support", {{"normal", r.normal.support}, {"abnormal", r.abnormal.support}}},
            {"confusion", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
            {"flags", r.flags}};
}

}  // namespace elstm::metrics
