#include <random>

#include "doctest.h"
#include "elstm/error.hpp"
#include "elstm/metrics/metrics.hpp"

using namespace elstm;
using data::Label;
using metrics::ConfusionCounts;

namespace {

std::vector<Label> flip(const std::vector<Label>& labels) {
    std::vector<Label> out;
    for (Label l : labels) out.push_back(l == Label::normal ? Label::abnormal : Label::normal);
    return out;
}

}  // namespace

TEST_CASE("confusion counts") {
    const std::vector<Label> truth{Label::normal, Label::abnormal, Label::normal, Label::abnormal};
    const auto perfect = metrics::confusion(truth, truth);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);
    const std::vector<Label> alarm(4, Label::abnormal);
    const auto all = metrics::confusion(alarm, truth);
    CHECK(all.tp == 2);
    CHECK(all.fp == 2);

    std::mt19937_64 gen(3);
    std::bernoulli_distribution coin(0.4);
    std::vector<Label> p, t;
    for (int i = 0; i < 777; ++i) {
        p.push_back(coin(gen) ? Label::abnormal : Label::normal);
        t.push_back(coin(gen) ? Label::abnormal : Label::normal);
    }
    CHECK(metrics::confusion(p, t).total() == 777);

    CHECK_THROWS_AS(metrics::confusion(alarm, std::vector<Label>(3, Label::normal)), DimensionError);
    CHECK_THROWS_AS(metrics::confusion(alarm, std::vector<Label>(4, Label::unknown)), DomainError);
}

TEST_CASE("worked example") {
    const auto r = metrics::compute_metrics(ConfusionCounts{50, 5, 35, 10});
    CHECK(r.ac == doctest::Approx(85.0));
    CHECK(r.abnormal.precision == doctest::Approx(100.0 * 50.0 / 55.0));
    CHECK(r.abnormal.precision == doctest::Approx(90.909).epsilon(1e-5));
    CHECK(r.abnormal.recall == doctest::Approx(83.333).epsilon(1e-5));
    CHECK(r.far == doctest::Approx(12.5));
    CHECK(r.rc == doctest::Approx(r.ac));
    // weighted by the 60 abnormal and 40 normal supports
    const double normal_pr = 100.0 * 35.0 / 45.0;
    CHECK(r.pr == doctest::Approx(0.6 * 100.0 * 50.0 / 55.0 + 0.4 * normal_pr));
    CHECK(r.flags.empty());
}

TEST_CASE("perfect classifier") {
    const auto r = metrics::compute_metrics(ConfusionCounts{30, 0, 70, 0});
    CHECK(r.ac == 100.0);
    CHECK(r.pr == 100.0);
    CHECK(r.rc == 100.0);
    CHECK(r.f1 == 100.0);
    CHECK(r.far == 0.0);
}

TEST_CASE("zero denominators give zero and a flag") {
    const auto r = metrics::compute_metrics(ConfusionCounts{0, 0, 10, 0});
    CHECK(r.abnormal.precision == 0.0);
    CHECK(r.abnormal.recall == 0.0);
    CHECK_FALSE(r.flags.empty());
    CHECK_THROWS_AS(metrics::compute_metrics(ConfusionCounts{}), DomainError);
}

TEST_CASE("identities on random confusion matrices") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::size_t> count(0, 500);
    for (int i = 0; i < 1000; ++i) {
        const ConfusionCounts c{count(gen), count(gen), count(gen) + 1, count(gen)};
        const auto r = metrics::compute_metrics(c);
        CHECK(std::abs(r.rc - r.ac) < 1e-9);
        const double specificity = 100.0 * static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
        CHECK(std::abs(r.far + specificity - 100.0) < 1e-9);
    }
}

TEST_CASE("relabelling both sides keeps the headline metrics") {
    std::mt19937_64 gen(11);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Label> p, t;
        for (int i = 0; i < 200; ++i) {
            t.push_back(coin(gen) ? Label::abnormal : Label::normal);
            p.push_back(coin(gen) ? (t.back() == Label::normal ? Label::abnormal : Label::normal) : t.back());
        }
        const auto a = metrics::compute_metrics(p, t);
        const auto b = metrics::compute_metrics(flip(p), flip(t));
        CHECK(a.ac == doctest::Approx(b.ac));
        CHECK(a.pr == doctest::Approx(b.pr));
        CHECK(a.rc == doctest::Approx(b.rc));
        CHECK(a.f1 == doctest::Approx(b.f1));
        CHECK(a.normal.recall == doctest::Approx(b.abnormal.recall));
    }
}

TEST_CASE("reference report rows show accuracy equal to weighted recall") {
    // AC, PR, RC, F1 of an externally reported results table.
    const double rows[][4] = {
        {94.6, 94.9, 94.6, 94.6}, {80.7, 86.1, 80.7, 80.0}, {81.5, 86.5, 81.5, 80.9}, {80.1, 85.7, 80.1, 79.2},
        {80.2, 85.8, 80.2, 79.4}, {91.9, 92.9, 91.9, 91.9}, {94.3, 94.5, 94.3, 94.3}, {94.0, 94.2, 94.0, 94.0},
        {92.8, 92.9, 92.8, 92.8}, {93.5, 93.8, 93.5, 94.0}, {93.9, 94.2, 93.9, 93.9}, {92.0, 92.1, 92.0, 92.0},
        {74.6, 83.2, 74.6, 72.9}, {92.1, 92.9, 92.1, 92.0},
    };
    for (const auto& row : rows) CHECK(row[0] == row[2]);
}

TEST_CASE("report JSON") {
    const auto j = metrics::to_json(metrics::compute_metrics(ConfusionCounts{50, 5, 35, 10}));
    CHECK(j["ac"] == doctest::Approx(85.0));
    CHECK(j["confusion"]["tp"] == 50);
    CHECK(j["per_class"]["abnormal"]["support"] == 60);
}
