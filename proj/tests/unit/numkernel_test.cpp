#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "elstm/error.hpp"
#include "elstm/numkernel/adam.hpp"
#include "elstm/numkernel/gradcheck.hpp"
#include "elstm/numkernel/linalg.hpp"
#include "elstm/numkernel/ops.hpp"
#include "elstm/numkernel/param_json.hpp"
#include "elstm/numkernel/rng.hpp"
#include "elstm/numkernel/trainer.hpp"
#include "support.hpp"

using namespace elstm;
using num::Matrix;
using num::ParamSet;
using num::Tape;
using num::Var;

TEST_CASE("matmul hand-evaluated products") {
    const Matrix a{{1, 2}, {3, 4}};
    CHECK(num::matmul(Matrix::identity(2), a) == a);
    CHECK(num::matmul(a, Matrix{{5, 6}, {7, 8}}) == Matrix{{19, 22}, {43, 50}});

    std::mt19937_64 gen(1);
    const Matrix z = num::matmul(Matrix::zeros(2, 3), test::random_matrix(3, 4, gen));
    CHECK(z == Matrix::zeros(2, 4));

    CHECK_THROWS_AS(num::matmul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST_CASE("matmul is associative on random triples") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = test::random_matrix(3, 5, gen, -2, 2);
        const Matrix b = test::random_matrix(5, 4, gen, -2, 2);
        const Matrix c = test::random_matrix(4, 6, gen, -2, 2);
        const Matrix left = num::matmul(num::matmul(a, b), c);
        const Matrix right = num::matmul(a, num::matmul(b, c));
        CHECK(num::max_abs_diff(left, right) < 1e-9);
    }
}

TEST_CASE("adjoint kernels agree with explicit transposes") {
    std::mt19937_64 gen(3);
    const Matrix a = test::random_matrix(4, 3, gen);
    const Matrix b = test::random_matrix(5, 3, gen);
    Matrix nt(4, 5);
    num::accumulate_matmul_nt(a, b, nt);
    CHECK(num::max_abs_diff(nt, num::matmul(a, num::transpose(b))) < 1e-12);

    const Matrix c = test::random_matrix(4, 2, gen);
    Matrix tn(3, 2);
    num::accumulate_matmul_tn(a, c, tn);
    CHECK(num::max_abs_diff(tn, num::matmul(num::transpose(a), c)) < 1e-12);
}

TEST_CASE("elementwise activations") {
    CHECK(num::sigmoid(0.0) == 0.5);
    CHECK(num::sigmoid(1.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
    CHECK(num::sigmoid(1.0) == doctest::Approx(0.7310586).epsilon(1e-7));
    const Matrix zero(1, 1);
    CHECK(num::elementwise(num::UnaryOp::tanh, zero)(0, 0) == 0.0);
    // large negative inputs must not overflow exp(-x)
    CHECK(num::sigmoid(-800.0) >= 0.0);
    CHECK(std::isfinite(num::sigmoid(-800.0)));

    CHECK_THROWS_AS(num::elementwise(num::UnaryOp::log, Matrix{{1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(num::elementwise(num::BinaryOp::add, Matrix(2, 2), Matrix(2, 3)), DimensionError);
}

TEST_CASE("backward on closed-form losses") {
    SUBCASE("square") {
        Tape tape;
        Var x = tape.variable(Matrix{{3.0}});
        tape.backward(num::square(x));
        CHECK(tape.grad(x)(0, 0) == doctest::Approx(6.0));
    }
    SUBCASE("sum of hadamard") {
        std::mt19937_64 gen(5);
        const Matrix av = test::random_matrix(3, 4, gen);
        const Matrix bv = test::random_matrix(3, 4, gen);
        Tape tape;
        Var a = tape.variable(av);
        Var b = tape.variable(bv);
        tape.backward(num::sum(num::hadamard(a, b)));
        CHECK(tape.grad(a) == bv);
        CHECK(tape.grad(b) == av);
    }
    SUBCASE("tape is consumed") {
        Tape tape;
        Var x = tape.variable(Matrix{{1.0}});
        Var loss = num::square(x);
        tape.backward(loss);
        CHECK(tape.consumed());
        CHECK_THROWS_AS(tape.backward(loss), Error);
        CHECK_THROWS_AS(tape.constant(Matrix{{1.0}}), Error);
    }
}

namespace {

// Independent central differences over a plain function of the parameters.
template <typename F>
ParamSet numeric_gradient(ParamSet params, F&& f, double h = 1e-5) {
    ParamSet grads = ParamSet::zeros_like(params);
    for (std::size_t p = 0; p < params.size(); ++p) {
        Matrix& value = params.entry(p).value;
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double saved = value[i];
            value[i] = saved + h;
            const double up = f(params);
            value[i] = saved - h;
            const double down = f(params);
            value[i] = saved;
            grads.entry(p).value[i] = (up - down) / (2.0 * h);
        }
    }
    return grads;
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); }

}  // namespace

TEST_CASE("three-layer composition matches central differences") {
    std::mt19937_64 gen(11);
    ParamSet params;
    params.add("W1", test::random_matrix(4, 5, gen, -2, 2));
    params.add("b1", test::random_matrix(1, 5, gen, -2, 2));
    params.add("W2", test::random_matrix(5, 3, gen, -2, 2));
    params.add("W3", test::random_matrix(3, 1, gen, -2, 2));
    const Matrix x = test::random_matrix(6, 4, gen, -2, 2);

    auto build = [&](Tape& tape) {
        Var h1 = num::sigmoid(num::add_row(num::matmul(tape.constant(x), tape.param("W1")), tape.param("b1")));
        Var h2 = num::sigmoid(num::matmul(h1, tape.param("W2")));
        return num::sum(num::matmul(h2 + h2, tape.param("W3")));
    };
    Tape tape(params);
    const ParamSet analytic = tape.backward(build(tape));
    const ParamSet numeric = numeric_gradient(params, [&](const ParamSet& p) {
        Tape t(p, false);
        return build(t).value()(0, 0);
    });
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t i = 0; i < analytic.entry(p).value.size(); ++i) {
            worst = std::max(worst, relative_error(analytic.entry(p).value[i], numeric.entry(p).value[i]));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("every primitive passes the finite-difference check") {
    std::mt19937_64 gen(13);
    ParamSet params;
    params.add("a", test::random_matrix(3, 4, gen, -2, 2));
    params.add("b", test::random_matrix(3, 4, gen, -2, 2));
    params.add("w", test::random_matrix(4, 2, gen, -2, 2));
    params.add("r", test::random_matrix(1, 4, gen, -2, 2));

    const std::vector<std::pair<const char*, num::LossBuilder>> cases = {
        {"matmul", [](Tape& t) { return num::sum(num::matmul(t.param("a"), t.param("w"))); }},
        {"affine", [](Tape& t) {
             return num::sum(num::square(num::affine(t.param("b"), t.param("w"), num::slice_cols(t.param("r"), 0, 2))));
         }},
        {"add_row", [](Tape& t) { return num::sum(num::square(num::add_row(t.param("a"), t.param("r")))); }},
        {"add", [](Tape& t) { return num::sum(num::square(t.param("a") + t.param("b"))); }},
        {"sub", [](Tape& t) { return num::sum(num::square(t.param("a") - t.param("b"))); }},
        {"hadamard", [](Tape& t) { return num::sum(num::hadamard(t.param("a"), t.param("b"))); }},
        {"sigmoid", [](Tape& t) { return num::sum(num::sigmoid(t.param("a"))); }},
        {"tanh", [](Tape& t) { return num::sum(num::tanh(t.param("a"))); }},
        {"exp", [](Tape& t) { return num::sum(num::exp(t.param("a"))); }},
        {"log", [](Tape& t) { return num::sum(num::log(num::add_scalar(num::square(t.param("a")), 0.5))); }},
        {"square", [](Tape& t) { return num::sum(num::square(t.param("a"))); }},
        {"scale", [](Tape& t) { return num::sum(num::square(num::scale(t.param("a"), -1.7))); }},
        {"mean", [](Tape& t) { return num::mean(num::square(t.param("a"))); }},
        {"concat_cols", [](Tape& t) {
             return num::sum(num::square(num::concat_cols(t.param("a"), num::tanh(t.param("b")))));
         }},
        {"slice_cols", [](Tape& t) { return num::sum(num::square(num::slice_cols(t.param("a"), 1, 2))); }},
        {"mse", [](Tape& t) { return num::mse(num::tanh(t.param("a")), t.param("b")); }},
    };
    for (const auto& [name, loss] : cases) {
        CAPTURE(name);
        const auto result = num::finite_difference_check(loss, params);
        CHECK(result.max_relative_error < 1e-4);
        CHECK(result.entries_checked == params.scalar_count());
    }
}

TEST_CASE("finite-difference check on a quadratic and a non-pure loss") {
    ParamSet params;
    params.add("x", Matrix{{0.3, -1.2, 2.0}});
    const auto quad = num::finite_difference_check(
        [](Tape& t) { return num::sum(num::square(num::scale(t.param("x"), 2.0))); }, params);
    CHECK(quad.max_relative_error < 1e-9);

    int calls = 0;
    auto drifting = [&](Tape& t) { return num::add_scalar(num::sum(t.param("x")), 1e-3 * ++calls); };
    CHECK_THROWS_AS(num::finite_difference_check(drifting, params), OracleViolation);
}

namespace {

// Textbook bias-corrected Adam, written out independently of the library.
struct ReferenceAdam {
    double lr, b1, b2, eps;
    std::vector<double> m, v;
    int t = 0;
    void step(std::vector<double>& p, const std::vector<double>& g) {
        ++t;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1 - b1) * g[i];
            v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
            const double mh = m[i] / (1 - std::pow(b1, t));
            const double vh = v[i] / (1 - std::pow(b2, t));
            p[i] -= lr * mh / (std::sqrt(vh) + eps);
        }
    }
};

}  // namespace

TEST_CASE("Adam first step moves by the learning rate") {
    ParamSet params;
    params.add("w", Matrix{{1.0, -2.0, 0.5}});
    num::AdamState state(num::AdamConfig{}, params);
    ParamSet grads;
    grads.add("w", Matrix{{0.7, -3.0, 1e-3}});
    num::adam_step(state, params, grads);
    // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps)
    CHECK(params.at("w")(0, 0) == doctest::Approx(1.0 - 1e-3 * 0.7 / (0.7 + 1e-8)).epsilon(1e-12));
    CHECK(params.at("w")(0, 1) == doctest::Approx(-2.0 + 1e-3).epsilon(1e-9));
    CHECK(params.at("w")(0, 2) == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
    CHECK(state.steps() == 1);
}

TEST_CASE("Adam matches a reference over many steps") {
    std::mt19937_64 gen(17);
    ParamSet params;
    params.add("a", test::random_matrix(2, 3, gen));
    const num::AdamConfig cfg{0.01, 0.8, 0.99, 1e-6};
    num::AdamState state(cfg, params);
    std::vector<double> ref(params.at("a").values().begin(), params.at("a").values().end());
    ReferenceAdam reference{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon, std::vector<double>(6),
                            std::vector<double>(6)};
    for (int step = 0; step < 50; ++step) {
        ParamSet grads;
        grads.add("a", test::random_matrix(2, 3, gen, -5, 5));
        reference.step(ref, std::vector<double>(grads.at("a").values().begin(), grads.at("a").values().end()));
        num::adam_step(state, params, grads);
    }
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(params.at("a")[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("Adam with zero gradients is the identity for any state") {
    std::mt19937_64 gen(19);
    ParamSet params;
    params.add("a", test::random_matrix(3, 3, gen));
    num::AdamState state(num::AdamConfig{}, params);
    for (int i = 0; i < 5; ++i) {
        ParamSet grads;
        grads.add("a", test::random_matrix(3, 3, gen));
        num::adam_step(state, params, grads);
    }
    const ParamSet before = params;
    num::adam_step(state, params, ParamSet::zeros_like(params));
    CHECK(params == before);
}

TEST_CASE("named RNG streams are deterministic and independent") {
    const num::Rng root(42);
    num::Rng a1 = root.stream("alpha");
    num::Rng a2 = num::Rng(42).stream("alpha");
    num::Rng b = root.stream("beta");
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a1.next();
        CHECK(x == a2.next());
        differs = differs || x != b.next();
    }
    CHECK(differs);
    CHECK(root.stream("gmm", 0).next() != root.stream("gmm", 1).next());

    num::Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = r.index(5);
        CHECK(k < 5);
        const double u = r.uniform(-1.0, 2.0);
        CHECK(u >= -1.0);
        CHECK(u < 2.0);
    }
}

TEST_CASE("cholesky factorization") {
    const Matrix a{{4, 2, 0.4}, {2, 5, 1}, {0.4, 1, 3}};
    const Matrix l = num::cholesky(a);
    CHECK(num::max_abs_diff(num::matmul(l, num::transpose(l)), a) < 1e-12);
    CHECK(l(0, 1) == 0.0);
    // log|a| from a direct 3x3 determinant
    const double det = 4 * (5 * 3 - 1 * 1) - 2 * (2 * 3 - 1 * 0.4) + 0.4 * (2 * 1 - 5 * 0.4);
    CHECK(num::log_det_from_cholesky(l) == doctest::Approx(std::log(det)).epsilon(1e-12));

    std::vector<double> rhs{1.0, 2.0, 3.0};
    num::solve_lower_inplace(l, rhs);
    const Matrix y = Matrix::column_vector(rhs);
    CHECK(num::max_abs_diff(num::matmul(l, y), Matrix{{1.0}, {2.0}, {3.0}}) < 1e-12);

    CHECK_THROWS_AS(num::cholesky(Matrix{{1, 2}, {2, 1}}), NumericError);
}

TEST_CASE("early stopping counts stale validations") {
    num::EarlyStopping stop(3, 0.1);
    CHECK(stop.observe(1.0));
    CHECK_FALSE(stop.observe(0.95));  // within min_delta
    CHECK(stop.observe(0.5));
    CHECK_FALSE(stop.observe(0.6));
    CHECK_FALSE(stop.observe(0.6));
    CHECK_FALSE(stop.should_stop());
    CHECK_FALSE(stop.observe(0.45));
    CHECK(stop.should_stop());
    CHECK(stop.best() == 0.5);
}

TEST_CASE("train_minibatch returns the best checkpoint and is reproducible") {
    // Fit y = 2x on a line; validation rewards w near 1.5 so the best epoch is not the last.
    std::vector<double> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(-1.0 + i / 20.0);
    num::TrainingSchedule sched;
    sched.batch_size = 8;
    sched.epoch_limit = 200;
    sched.patience = 10;
    sched.adam.learning_rate = 0.05;

    auto run = [&] {
        ParamSet params;
        params.add("w", Matrix{{0.0}});
        auto batch_loss = [&](Tape& tape, std::span<const std::size_t> batch) {
            Matrix x(batch.size(), 1), y(batch.size(), 1);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                x(i, 0) = xs[batch[i]];
                y(i, 0) = 2.0 * xs[batch[i]];
            }
            return num::mse(num::matmul(tape.constant(x), tape.param("w")), tape.constant(y));
        };
        auto val = [](const ParamSet& p) { return std::abs(p.at("w")(0, 0) - 1.5); };
        auto history = num::train_minibatch(params, xs.size(), sched, num::Rng(9), batch_loss, val, "line");
        return std::make_pair(params, history);
    };
    const auto [p1, h1] = run();
    const auto [p2, h2] = run();
    CHECK(p1 == p2);
    CHECK(h1.stopped_early);
    CHECK(h1.best_epoch < h1.epochs.size() - 1);
    CHECK(std::abs(p1.at("w")(0, 0) - 1.5) == doctest::Approx(h1.best_val_loss));
    CHECK(h1.best_val_loss == doctest::Approx(h1.epochs[h1.best_epoch].val_loss));
}

TEST_CASE("parameter JSON round trip") {
    std::mt19937_64 gen(23);
    ParamSet params;
    params.add("x.W", test::random_matrix(3, 2, gen));
    params.add("x.b", test::random_matrix(1, 2, gen));
    CHECK(num::params_from_json(num::to_json(params)) == params);

    auto bad = num::to_json(params);
    bad[0]["value"]["rows"] = 4;
    CHECK_THROWS_AS(num::params_from_json(bad), ConfigError);
}
