#include "esn/reservoir.hpp"
#include "esn/spectral.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace esn;

namespace {

EsnConfig small_config(int n = 40, int d = 6)
{
    EsnConfig c;
    c.n_res = n;
    c.n_in = d;
    return c;
}

EsnModel single_unit(double alpha, double w_in, double w_res)
{
    EsnConfig c = small_config(1, 1);
    c.leak_rate = alpha;
    return EsnModel(c, Matrix::Constant(1, 1, w_in), Vector::Zero(1), Matrix::Constant(1, 1, w_res), Vector::Zero(1));
}

}  // namespace

TEST_CASE("defaults are the reference hyperparameters")
{
    const EsnConfig c;
    CHECK(c.n_res == 300);
    CHECK(c.sparsity == 0.3);
    CHECK(c.spectral_radius == 0.8);
    CHECK(c.leak_rate == 0.01);
    CHECK(c.weight_range == 0.1);
    CHECK(c.activation == Activation::Tanh);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config validation names the broken field")
{
    auto bad = [](auto mutate) {
        EsnConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_WITH_AS(bad([](EsnConfig& c) { c.n_res = 0; }).validate(), "n_res must be positive", ConfigError);
    CHECK_THROWS_AS(bad([](EsnConfig& c) { c.leak_rate = 1.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](EsnConfig& c) { c.leak_rate = -0.1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](EsnConfig& c) { c.sparsity = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](EsnConfig& c) { c.spectral_radius = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](EsnConfig& c) { c.weight_range = -1.0; }).validate(), ConfigError);
    CHECK_NOTHROW(bad([](EsnConfig& c) { c.leak_rate = 0.0; }).validate());
    CHECK_NOTHROW(bad([](EsnConfig& c) { c.leak_rate = 1.0; }).validate());
    CHECK(activation_from_string("sigmoid") == Activation::Sigmoid);
    CHECK_THROWS_AS(activation_from_string("relu"), ConfigError);
}

TEST_CASE("init_reservoir is deterministic per seed")
{
    const EsnModel a = init_reservoir(small_config());
    const EsnModel b = init_reservoir(small_config());
    CHECK(a.w_res() == b.w_res());
    CHECK(a.w_in() == b.w_in());
    CHECK(a.b_in() == b.b_in());
    CHECK(a.b_res() == b.b_res());

    EsnConfig other = small_config();
    other.seed = 43;
    CHECK(init_reservoir(other).w_res() != a.w_res());
}

TEST_CASE("init_reservoir meets the echo-state scaling and density")
{
    for (double sparsity : {0.05, 0.3, 1.0}) {
        EsnConfig c = small_config(60, 4);
        c.sparsity = sparsity;
        const EsnModel m = init_reservoir(c);
        const double rho = spectral_radius(m.w_res());
        CHECK(std::abs(rho - c.spectral_radius) <= 1e-6 * c.spectral_radius);
        const auto nonzero = (m.w_res().array() != 0.0).count();
        CHECK(nonzero == std::llround(sparsity * 60 * 60));
        CHECK(m.w_in().cwiseAbs().maxCoeff() <= c.weight_range);
        CHECK(m.b_in().cwiseAbs().maxCoeff() <= c.weight_range);
        CHECK(m.b_res().cwiseAbs().maxCoeff() <= c.weight_range);
    }
}

TEST_CASE("full density at N=10 gives 100 nonzeros")
{
    EsnConfig c = small_config(10, 2);
    c.sparsity = 1.0;
    CHECK((init_reservoir(c).w_res().array() != 0.0).count() == 100);
}

TEST_CASE("reference size reservoir")
{
    EsnConfig c;
    const EsnModel m = init_reservoir(c);
    CHECK(std::abs(spectral_radius(m.w_res()) - 0.8) <= 0.8e-6);
    CHECK((m.w_res().array() != 0.0).count() == 27000);
}

TEST_CASE("rescale of a diagonal matrix")
{
    Matrix w(2, 2);
    w << 2, 0, 0, 1;
    Matrix want(2, 2);
    want << 0.8, 0, 0, 0.4;
    CHECK(test::max_abs_diff(rescale_to_spectral_radius(w, 0.8), want) <= 1e-12);
    CHECK_THROWS_AS(rescale_to_spectral_radius(Matrix::Zero(3, 3), 0.8), NumericError);
}

TEST_CASE("a near-empty draw asks for a reseed")
{
    EsnConfig c = small_config(30, 2);
    c.sparsity = 1.0 / 900.0;  // one entry: off-diagonal is nilpotent, diagonal is not
    int zero_radius = 0, ok = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        c.seed = seed;
        try {
            init_reservoir(c);
            ++ok;
        } catch (const NumericError& e) {
            CHECK(std::string(e.what()).find("seed") != std::string::npos);
            ++zero_radius;
        }
    }
    CHECK(zero_radius > 0);
}

TEST_CASE("alpha zero collapses every state")
{
    EsnConfig c = small_config();
    c.leak_rate = 0.0;
    const EsnModel m = init_reservoir(c);
    Rng rng(1);
    const StateTrajectory traj = run_reservoir(m, test::random_sample(rng, 6, 12));
    CHECK(traj.states.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single unit first step")
{
    const EsnModel m = single_unit(0.5, 1.0, 0.0);
    const StateTrajectory traj = run_reservoir(m, Matrix::Ones(1, 1));
    CHECK(traj.states(0, 0) == doctest::Approx(0.5 * std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("sigmoid is the logistic function")
{
    CHECK(activate(Activation::Sigmoid, 0.0) == 0.5);
    CHECK(activate(Activation::Sigmoid, 2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
}

TEST_CASE("leak algebra holds exactly")
{
    Rng rng(2);
    for (double alpha : {0.01, 0.3, 1.0}) {
        EsnConfig c = small_config();
        c.leak_rate = alpha;
        const EsnModel m = init_reservoir(c);
        const StateTrajectory traj = run_reservoir(m, test::random_sample(rng, 6, 15));
        for (Eigen::Index j = 0; j < traj.states.rows(); ++j) {
            REQUIRE(traj.states(j, 0) == alpha * traj.act_branch(j, 0));
            for (Eigen::Index t = 1; t < traj.steps(); ++t) {
                const double rebuilt = (1.0 - alpha) * traj.states(j, t - 1) + alpha * traj.act_branch(j, t);
                REQUIRE(traj.states(j, t) - rebuilt == 0.0);
            }
        }
        if (alpha == 1.0) {
            CHECK(traj.states == traj.act_branch);
        }
    }
}

TEST_CASE("act_branch matches an explicit pre-activation")
{
    Rng rng(3);
    const EsnModel m = test::random_model(rng, 5, 3, 0.4, Activation::Sigmoid);
    const Matrix u = test::random_sample(rng, 3, 6);
    const StateTrajectory traj = run_reservoir(m, u);
    for (Eigen::Index t = 0; t < 6; ++t) {
        Vector pre = m.w_in() * u.col(t) + m.b_in();
        if (t > 0) {
            pre += m.w_res() * traj.states.col(t - 1) + m.b_res();
        }
        for (Eigen::Index j = 0; j < 5; ++j) {
            CHECK(traj.act_branch(j, t) == doctest::Approx(1.0 / (1.0 + std::exp(-pre(j)))).epsilon(1e-14));
        }
    }
    CHECK(traj.inputs == u);
}

TEST_CASE("tanh states stay in [-1, 1]")
{
    Rng rng(4);
    const EsnModel m = test::random_model(rng, 20, 4, 0.7, Activation::Tanh, 3.0);
    const StateTrajectory traj = run_reservoir(m, test::random_matrix(rng, 4, 50, 5.0));
    CHECK(traj.act_branch.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(traj.states.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("run_reservoir is pure and resets per sample")
{
    const EsnModel m = init_reservoir(small_config());
    Rng rng(5);
    const Matrix a = test::random_sample(rng, 6, 10);
    const Matrix b = test::random_sample(rng, 6, 10);
    const StateTrajectory first = run_reservoir(m, a);
    run_reservoir(m, b);
    CHECK(run_reservoir(m, a).states == first.states);
}

TEST_CASE("dimension mismatch names the expected D")
{
    const EsnModel m = init_reservoir(small_config());
    CHECK_THROWS_WITH_AS(run_reservoir(m, Matrix::Zero(5, 3)), doctest::Contains("expects D=6"), PreconditionError);
    Matrix bad = Matrix::Zero(6, 3);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(run_reservoir(m, bad), PreconditionError);
}

TEST_CASE("model_output and readout bookkeeping")
{
    EsnConfig c = small_config(2, 1);
    EsnModel m(c, Matrix::Zero(2, 1), Vector::Zero(2), Matrix::Zero(2, 2), Vector::Zero(2));
    StateTrajectory traj;
    traj.states = Matrix(2, 1);
    traj.states << 0.3, 0.7;
    CHECK_THROWS_WITH(model_output(m, traj), "readout not trained");
    CHECK_FALSE(m.trained());

    m.set_readout(Matrix::Ones(1, 2), Vector::Zero(1));
    CHECK(model_output(m, traj)(0) == doctest::Approx(1.0));

    m.set_readout(Matrix::Zero(1, 2), Vector::Constant(1, 2.5));
    CHECK(model_output(m, traj)(0) == 2.5);
    CHECK(m.trained());
}

TEST_CASE("trainable parameters of the reference readout")
{
    EsnModel m = init_reservoir(EsnConfig{});
    m.set_readout(Matrix::Zero(1, 300), Vector::Zero(1));
    CHECK(m.trainable_parameter_count() == 301);
}

TEST_CASE("model constructor checks shapes")
{
    EsnConfig c = small_config(2, 1);
    CHECK_THROWS_AS(EsnModel(c, Matrix::Zero(2, 2), Vector::Zero(2), Matrix::Zero(2, 2), Vector::Zero(2)),
                    PreconditionError);
    CHECK_THROWS_AS(EsnModel(c, Matrix::Zero(2, 1), Vector::Zero(3), Matrix::Zero(2, 2), Vector::Zero(2)),
                    PreconditionError);
}
