#include "esn/baselines.hpp"
#include "esn/readout.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace esn;

namespace {

double loss_of(const MlpModel& m, const Matrix& x, const Vector& y)
{
    return (mlp_forward(m, x).col(0) - y).squaredNorm() / static_cast<double>(y.size());
}

// Central differences on every parameter; returns the worst relative error
// against the analytic gradient.
double gradient_check(MlpModel model, const Matrix& x, const Vector& y)
{
    const MlpGradients g = mlp_loss_and_gradients(model, x, y);
    const double h = 1e-6;
    double worst = 0.0;
    auto compare = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double up = loss_of(model, x, y);
        param = keep - h;
        const double down = loss_of(model, x, y);
        param = keep;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
        worst = std::max(worst, std::abs(numeric - analytic) / scale);
    };
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < model.weights[l].size(); ++i) {
            compare(model.weights[l].data()[i], g.weights[l].data()[i]);
        }
        for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) {
            compare(model.biases[l](i), g.biases[l](i));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("reference architecture has 87,993 parameters")
{
    const MlpModel m = init_mlp(reference_mlp_dims(10988), 1);
    CHECK(m.layer_dims == std::vector<int>{10988, 8, 8, 1});
    CHECK(m.param_count() == 87993);
    for (const Matrix& w : m.weights) {
        CHECK(w.cwiseAbs().maxCoeff() <= 0.05);
    }
}

TEST_CASE("linear regression recovers an exact linear map")
{
    Rng rng(61);
    const Matrix x = test::random_matrix(rng, 40, 6);
    const Vector w = test::random_vector(rng, 6);
    const Vector y = (x * w).array() + 0.3;
    const LinearModel m = fit_linreg(x, y);
    CHECK(m.train_mse <= 1e-24);
    CHECK(test::max_abs_diff(m.weights, w) <= 1e-10);
    CHECK(m.bias == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(m.predict(x.row(3).transpose()) == doctest::Approx(y(3)).epsilon(1e-10));
}

TEST_CASE("linear regression matches the normal-equations oracle")
{
    Rng rng(62);
    const Matrix x = test::random_matrix(rng, 60, 8);
    const Vector y = test::random_vector(rng, 60);
    Matrix design(60, 9);
    design << x, Matrix::Ones(60, 1);
    const Vector beta = (design.transpose() * design).inverse() * design.transpose() * y;
    const LinearModel m = fit_linreg(x, y);
    CHECK(test::max_abs_diff(m.weights, beta.head(8)) <= 1e-8);
    CHECK(std::abs(m.bias - beta(8)) <= 1e-8);
}

TEST_CASE("backprop matches central differences")
{
    Rng rng(63);
    SUBCASE("five-parameter toy net")
    {
        // 1 -> 2 -> 1 would be 7; 2 -> 1 -> 1 gives 3 + 2 = 5.
        MlpModel m = init_mlp({2, 1, 1}, 5, 1.0);
        CHECK(m.param_count() == 5);
        const Matrix x = test::random_matrix(rng, 4, 2);
        const Vector y = test::random_vector(rng, 4);
        CHECK(gradient_check(m, x, y) <= 1e-5);
    }
    SUBCASE("randomized small nets")
    {
        for (int trial = 0; trial < 10; ++trial) {
            const int in = 1 + static_cast<int>(rng.below(5));
            const int h1 = 1 + static_cast<int>(rng.below(4));
            const int h2 = 1 + static_cast<int>(rng.below(4));
            MlpModel m = init_mlp({in, h1, h2, 1}, static_cast<std::uint64_t>(trial), 1.0);
            const Matrix x = test::random_matrix(rng, 7, in);
            const Vector y = test::random_vector(rng, 7);
            CHECK(gradient_check(m, x, y) <= 1e-5);
        }
    }
}

TEST_CASE("identity MLP collapses to one affine map")
{
    Rng rng(64);
    const MlpModel m = init_mlp({5, 4, 3, 1}, 9, 1.0);
    Matrix a = Matrix::Identity(5, 5);
    Vector b = Vector::Zero(5);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        b = m.weights[l] * b + m.biases[l];
        a = m.weights[l] * a;
    }
    for (int trial = 0; trial < 10; ++trial) {
        const Vector x = test::random_vector(rng, 5);
        CHECK(mlp_predict(m, x) == doctest::Approx((a * x + b)(0)).epsilon(1e-12));
    }
}

TEST_CASE("zero weights and bias c predict c")
{
    MlpModel m = init_mlp({3, 2, 1}, 1);
    for (auto& w : m.weights) w.setZero();
    for (auto& b : m.biases) b.setZero();
    m.biases.back()(0) = 1.75;
    CHECK(mlp_predict(m, Vector::Ones(3)) == 1.75);
    CHECK(binarize(mlp_predict(m, Vector::Ones(3))).label == EnsoClass::ElNino);
    CHECK_THROWS_AS(mlp_predict(m, Vector::Ones(4)), PreconditionError);
}

TEST_CASE("adam with zero gradient leaves parameters unchanged")
{
    MlpModel m = init_mlp({3, 2, 1}, 2);
    const MlpModel before = m;
    AdamState state(m);
    MlpGradients zero;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        zero.weights.push_back(Matrix::Zero(m.weights[l].rows(), m.weights[l].cols()));
        zero.biases.push_back(Vector::Zero(m.biases[l].size()));
        CHECK(state.m_weights[l].rows() == m.weights[l].rows());
        CHECK(state.v_biases[l].size() == m.biases[l].size());
    }
    adam_step(m, state, zero);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        CHECK(m.weights[l] == before.weights[l]);
        CHECK(m.biases[l] == before.biases[l]);
    }
}

TEST_CASE("adam first step moves by the learning rate")
{
    MlpModel m = init_mlp({1, 1}, 3);
    const double w0 = m.weights[0](0, 0);
    AdamState state(m);
    MlpGradients g;
    g.weights.push_back(Matrix::Constant(1, 1, 0.3));
    g.biases.push_back(Vector::Constant(1, -2.0));
    adam_step(m, state, g);
    CHECK(m.weights[0](0, 0) == doctest::Approx(w0 - 0.0005).epsilon(1e-6));
}

TEST_CASE("mlp training learns a linear target and is deterministic")
{
    Rng rng(65);
    const Matrix x = test::random_matrix(rng, 200, 6);
    const Vector w = test::random_vector(rng, 6);
    const Vector y = x * w;
    MlpTrainOptions opts;
    opts.adam.lr = 0.01;
    const MlpTrainResult a = train_mlp(x, y, opts);
    const MlpTrainResult b = train_mlp(x, y, opts);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.loss_history.size() == 30);
    CHECK(a.loss_history.back() < 0.05 * a.loss_history.front());
    for (double l : a.loss_history) {
        CHECK(std::isfinite(l));
    }
    opts.seed = 7;
    CHECK(train_mlp(x, y, opts).loss_history != a.loss_history);
}

TEST_CASE("diverging training aborts with a diagnostic")
{
    Rng rng(66);
    const Matrix x = test::random_matrix(rng, 50, 4, 1e200);
    const Vector y = test::random_vector(rng, 50);
    MlpTrainOptions opts;
    opts.adam.lr = 1e10;
    CHECK_THROWS_WITH_AS(train_mlp(x, y, opts), doctest::Contains("non-finite loss"), NumericError);
}
