#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sgvf/checkpoint.hpp"
#include "sgvf/errors.hpp"
#include "sgvf/mlp.hpp"
#include "sgvf/rng.hpp"
#include "test_util.hpp"

using namespace sgvf;

namespace {

MlpModel zeroed(const std::vector<int>& sizes) {
    MlpModel model = mlp_init(sizes, 0);
    for (Matrix& w : model.weights) std::fill(w.a.begin(), w.a.end(), 0.0);
    return model;
}

Matrix batch_of(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
        }
    }
    return m;
}

} // namespace

TEST_CASE("silu values and bounds") {
    CHECK(silu(0.0) == 0.0);
    CHECK(silu(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));

    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(0.0, 8.0);
        const double b = a + rng.uniform(0.0, 4.0) + 1e-9;
        CHECK(silu(b) >= silu(a)); // monotone on the nonnegative axis
        const double u = rng.uniform(-30.0, 30.0);
        CHECK(silu(u) >= -0.2785);
    }
}

TEST_CASE("mlp_init produces the requested shapes") {
    const MlpModel model = mlp_init({3, 64, 64, 64, 64, 2}, 123);
    REQUIRE(model.num_layers() == 5);
    const int expected[5][2] = {{64, 3}, {64, 64}, {64, 64}, {64, 64}, {2, 64}};
    for (int l = 0; l < 5; ++l) {
        CHECK(model.weights[l].rows == expected[l][0]);
        CHECK(model.weights[l].cols == expected[l][1]);
        CHECK(static_cast<int>(model.biases[l].size()) == expected[l][0]);
        for (double b : model.biases[l]) CHECK(b == 0.0);
    }
}

TEST_CASE("mlp_init is deterministic per seed and validates sizes") {
    const MlpModel a = mlp_init({2, 8, 2}, 99);
    const MlpModel b = mlp_init({2, 8, 2}, 99);
    CHECK(testutil::models_identical(a, b));
    const MlpModel c = mlp_init({2, 8, 2}, 100);
    CHECK_FALSE(testutil::models_identical(a, c));

    CHECK_THROWS_AS(mlp_init({}, 0), ConfigError);
    CHECK_THROWS_AS(mlp_init({2}, 0), ConfigError);
    CHECK_THROWS_AS(mlp_init({2, 0, 2}, 0), ConfigError);
}

TEST_CASE("forward of a zeroed network is zero") {
    const MlpModel model = zeroed({2, 2});
    const Matrix out = mlp_forward(model, batch_of({{3.0, -4.0}, {0.5, 0.25}}));
    for (double v : out.a) CHECK(v == 0.0);

    const MlpModel deep = zeroed({2, 16, 16, 2});
    const Matrix out2 = mlp_forward(deep, batch_of({{1.0, 2.0}}));
    for (double v : out2.a) CHECK(v == 0.0); // silu(0) = 0 propagates
}

TEST_CASE("single affine layer with identity weights passes inputs through") {
    MlpModel model = zeroed({2, 2});
    model.weights[0].at(0, 0) = 1.0;
    model.weights[0].at(1, 1) = 1.0;
    const Matrix out = mlp_forward(model, batch_of({{1.5, -2.0}}));
    CHECK(out.at(0, 0) == 1.5);
    CHECK(out.at(0, 1) == -2.0);
}

TEST_CASE("forward rejects bad inputs") {
    const MlpModel model = mlp_init({3, 4, 2}, 0);
    CHECK_THROWS_AS(mlp_forward(model, Matrix(1, 2)), ShapeError);
    Matrix bad(1, 3);
    bad.at(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(mlp_forward(model, bad), DomainError);
}

TEST_CASE("backward with zero output gradient gives zero parameter gradients") {
    const MlpModel model = mlp_init({2, 8, 2}, 11);
    ForwardCache cache;
    mlp_forward(model, batch_of({{0.3, -1.2}}), &cache);
    const Gradients grads = mlp_backward(model, cache, Matrix(1, 2));
    for (const Matrix& g : grads.weights) {
        for (double v : g.a) CHECK(v == 0.0);
    }
}

TEST_CASE("backward of a linear map recovers the input") {
    MlpModel model = zeroed({2, 1});
    model.weights[0].at(0, 0) = 0.7;
    model.weights[0].at(0, 1) = -0.4;
    ForwardCache cache;
    mlp_forward(model, batch_of({{1.25, -3.5}}), &cache);
    Matrix out_grad(1, 1);
    out_grad.at(0, 0) = 1.0; // loss = network output
    const Gradients grads = mlp_backward(model, cache, out_grad);
    CHECK(grads.weights[0].at(0, 0) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(grads.weights[0].at(0, 1) == doctest::Approx(-3.5).epsilon(1e-15));
    CHECK(grads.biases[0][0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("backward matches central finite differences on a random model") {
    const MlpModel model = mlp_init({2, 8, 2}, 21);
    Rng rng(22);
    Matrix inputs(4, 2);
    Matrix targets(4, 2);
    for (double& v : inputs.a) v = rng.normal();
    for (double& v : targets.a) v = rng.normal();

    auto loss = [&](const MlpModel& m) {
        const Matrix out = mlp_forward(m, inputs);
        double acc = 0.0;
        for (std::size_t i = 0; i < out.a.size(); ++i) {
            const double r = out.a[i] - targets.a[i];
            acc += 0.5 * r * r;
        }
        return acc;
    };

    ForwardCache cache;
    const Matrix out = mlp_forward(model, inputs, &cache);
    Matrix out_grad(4, 2);
    for (std::size_t i = 0; i < out.a.size(); ++i) out_grad.a[i] = out.a[i] - targets.a[i];
    const Gradients analytic = mlp_backward(model, cache, out_grad);
    const Gradients numeric = testutil::finite_difference_grads(model, loss, 1e-4);
    CHECK(testutil::max_relative_grad_error(analytic, numeric) <= 1e-4);
}

TEST_CASE("backward rejects a cache from another model") {
    const MlpModel a = mlp_init({2, 8, 2}, 1);
    const MlpModel b = mlp_init({2, 4, 4, 2}, 1);
    ForwardCache cache;
    mlp_forward(a, batch_of({{0.0, 1.0}}), &cache);
    CHECK_THROWS_AS(mlp_backward(b, cache, Matrix(1, 2)), StateError);
}

TEST_CASE("adam leaves parameters unchanged on zero gradients") {
    MlpModel model = mlp_init({2, 4, 2}, 5);
    const MlpModel before = model;
    AdamState state = adam_init(model, 1e-3);
    Gradients grads;
    for (const Matrix& w : model.weights) grads.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : model.biases) grads.biases.emplace_back(b.size(), 0.0);
    adam_step(model, grads, state);
    CHECK(state.step_count == 1);
    CHECK(testutil::models_identical(model, before));
}

TEST_CASE("first adam step is a signed step of size lr") {
    MlpModel model = zeroed({1, 1});
    model.weights[0].at(0, 0) = 0.5;
    AdamState state = adam_init(model, 1e-3);
    Gradients grads;
    grads.weights.emplace_back(1, 1);
    grads.weights[0].at(0, 0) = 2.0;
    grads.biases.emplace_back(1, 0.0);
    adam_step(model, grads, state);
    // m_hat / sqrt(v_hat) = sign(g) up to eps, so the step is about -lr
    CHECK(model.weights[0].at(0, 0) == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
}

TEST_CASE("two adam steps decrease a quadratic loss") {
    MlpModel model = zeroed({1, 1});
    model.weights[0].at(0, 0) = 1.0;
    AdamState state = adam_init(model, 1e-2);
    auto loss = [&] {
        const double w = model.weights[0].at(0, 0);
        return w * w;
    };
    const double initial = loss();
    for (int step = 0; step < 2; ++step) {
        Gradients grads;
        grads.weights.emplace_back(1, 1);
        grads.weights[0].at(0, 0) = 2.0 * model.weights[0].at(0, 0);
        grads.biases.emplace_back(1, 0.0);
        const double before = loss();
        adam_step(model, grads, state);
        CHECK(loss() < before);
    }
    CHECK(loss() < initial);
}

TEST_CASE("adam rejects non-finite gradients") {
    MlpModel model = mlp_init({1, 1}, 0);
    AdamState state = adam_init(model, 1e-3);
    Gradients grads;
    grads.weights.emplace_back(1, 1);
    grads.weights[0].at(0, 0) = std::numeric_limits<double>::infinity();
    grads.biases.emplace_back(1, 0.0);
    CHECK_THROWS_AS(adam_step(model, grads, state), TrainingError);
}

TEST_CASE("checkpoint round-trip is bit exact") {
    const auto dir = testutil::tmp_dir("checkpoint_roundtrip");
    Checkpoint ckpt;
    ckpt.model = mlp_init({2, 128, 2}, 77);
    ckpt.meta = {0.01, 0.5, 0.2, 1.0, 77, 10000, fnv1a("config body")};
    const std::string path = (dir / "model.ckpt").string();
    save_checkpoint(ckpt, path);

    const Checkpoint loaded = load_checkpoint(path);
    CHECK(testutil::models_identical(ckpt.model, loaded.model));
    CHECK(loaded.meta.sigma_min == ckpt.meta.sigma_min);
    CHECK(loaded.meta.sigma_max == ckpt.meta.sigma_max);
    CHECK(loaded.meta.k_s == ckpt.meta.k_s);
    CHECK(loaded.meta.t_eval == ckpt.meta.t_eval);
    CHECK(loaded.meta.seed == ckpt.meta.seed);
    CHECK(loaded.meta.iterations == ckpt.meta.iterations);
    CHECK(loaded.meta.config_digest == ckpt.meta.config_digest);
}

TEST_CASE("checkpoint loader reports truncation and corruption") {
    const auto dir = testutil::tmp_dir("checkpoint_errors");
    Checkpoint ckpt;
    ckpt.model = mlp_init({2, 8, 2}, 3);
    const std::string path = (dir / "model.ckpt").string();
    save_checkpoint(ckpt, path);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    SUBCASE("truncated payload") {
        std::ofstream out((dir / "trunc.ckpt").string(), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "trunc.ckpt").string()), FormatError);
    }
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        std::ofstream out((dir / "magic.ckpt").string(), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "magic.ckpt").string()), FormatError);
    }
    SUBCASE("layer sizes inconsistent with the stored payload") {
        // shrink a layer width in the header; the byte stream is then short
        const std::size_t sizes_offset = 5 + 4 * 8 + 3 * 8 + 4;
        bytes[sizes_offset + 4] = 2; // hidden width 8 -> 2
        std::ofstream out((dir / "shape.ckpt").string(), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "shape.ckpt").string()), FormatError);
    }
    SUBCASE("length field mismatch") {
        bytes[bytes.size() - 1] ^= 0x5a;
        std::ofstream out((dir / "len.ckpt").string(), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "len.ckpt").string()), FormatError);
    }
}
