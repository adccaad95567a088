#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lets/predictors.hpp"
#include "lets/rng.hpp"

using namespace lets;

namespace {

LabeledSet random_training(Rng& rng, std::size_t m, std::size_t d) {
    LabeledSet set;
    for (std::size_t i = 0; i < m; ++i) {
        FeatureVector f(d);
        for (double& x : f) x = rng.normal();
        set.push_back(std::move(f), rng.coin() ? 1 : 0);
    }
    return set;
}

PredictorConfig partition_config(double lo, double hi, std::size_t cells) {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Partition;
    cfg.grid = PartitionGrid{{lo}, {hi}, cells};
    return cfg;
}

} // namespace

TEST_CASE("fitting once equals folding updates") {
    Rng rng(41);
    for (PredictorKind kind :
         {PredictorKind::Knn, PredictorKind::Kernel, PredictorKind::Partition}) {
        PredictorConfig cfg;
        cfg.kind = kind;
        if (kind == PredictorKind::Partition)
            cfg.grid = PartitionGrid{{-4.0, -4.0}, {4.0, 4.0}, 5};
        LabeledSet train = random_training(rng, 30, 2);

        Predictor fitted = Predictor::fit(cfg, train);
        LabeledSet head;
        head.push_back(train.features[0], train.labels[0]);
        Predictor grown = Predictor::fit(cfg, head);
        for (std::size_t i = 1; i < train.size(); ++i) {
            grown.update(train.features[i], train.labels[i]);
        }

        for (int rep = 0; rep < 20; ++rep) {
            FeatureVector q{rng.normal(), rng.normal()};
            auto a = fitted.predict(q);
            auto b = grown.predict(q);
            CHECK(a.first == b.first);
            CHECK(a.second == b.second);
        }
        CHECK(fitted.training_size() == grown.training_size());
        CHECK(fitted.update_count() == 0);
        CHECK(grown.update_count() == train.size() - 1);
    }
}

TEST_CASE("predictions are clipped and sum to one") {
    Rng rng(43);
    for (PredictorKind kind :
         {PredictorKind::Knn, PredictorKind::Kernel, PredictorKind::Partition}) {
        PredictorConfig cfg;
        cfg.kind = kind;
        cfg.clip_eps = 0.05;
        if (kind == PredictorKind::Partition)
            cfg.grid = PartitionGrid{{-4.0}, {4.0}, 4};
        LabeledSet pure;
        pure.push_back({0.0}, 1);
        pure.push_back({0.5}, 1);
        pure.push_back({1.0}, 1);
        Predictor p = Predictor::fit(cfg, pure);
        auto [q0, q1] = p.predict({0.25});
        CHECK(q1 == doctest::Approx(0.95));
        CHECK(q0 == doctest::Approx(0.05));
        CHECK(q0 + q1 == doctest::Approx(1.0));
    }
}

TEST_CASE("nearest neighbor vote with explicit k") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Knn;
    cfg.k = 3;
    cfg.clip_eps = 1e-3;
    LabeledSet train;
    train.push_back({0.0}, 1);
    train.push_back({1.0}, 1);
    train.push_back({2.0}, 0);
    train.push_back({10.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({0.1}).second == doctest::Approx(2.0 / 3.0));
    CHECK(p.predict({9.0}).second == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("distance ties prefer the earlier training point") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Knn;
    cfg.k = 1;
    LabeledSet train;
    train.push_back({1.0}, 1);
    train.push_back({-1.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({0.0}).second == doctest::Approx(1.0 - 1e-3));
}

TEST_CASE("automatic k grows with the square root of the data") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Knn;
    // With 4 points k = 2, so the two nearest (labels 1 and 0) average to 0.5.
    LabeledSet train;
    train.push_back({0.0}, 1);
    train.push_back({1.0}, 0);
    train.push_back({5.0}, 0);
    train.push_back({6.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({0.4}).second == doctest::Approx(0.5));
    // Growing to 5 points pushes k to 3.
    p.update({7.0}, 0);
    CHECK(p.predict({0.4}).second == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("kernel weights follow the gaussian in the distances") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Kernel;
    cfg.bandwidth = 1.0;
    LabeledSet train;
    train.push_back({0.0}, 1);
    train.push_back({2.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    // Weights exp(0) and exp(-(4-0)/2) after the nearest-distance shift.
    double w1 = 1.0, w0 = std::exp(-2.0);
    CHECK(p.predict({0.0}).second == doctest::Approx(w1 / (w1 + w0)));

    auto mid = p.predict({1.0});
    CHECK(mid.second == doctest::Approx(0.5));
}

TEST_CASE("kernel bandwidth defaults to half the median pairwise distance") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Kernel;
    LabeledSet train;
    train.push_back({0.0}, 1);
    train.push_back({1.0}, 0);
    train.push_back({3.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    // Pairwise distances {1, 2, 3}, median 2, bandwidth 1; at the query the
    // squared distances are {0.25, 0.25, 6.25}.
    double w_near = 1.0, w_far = std::exp(-(6.25 - 0.25) / 2.0);
    double expect = w_near / (2.0 * w_near + w_far);
    CHECK(p.predict({0.5}).second == doctest::Approx(expect));
}

TEST_CASE("degenerate kernel training falls back to unit bandwidth") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Kernel;
    LabeledSet train;
    train.push_back({2.0}, 1);
    train.push_back({2.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({2.0}).second == doctest::Approx(0.5));
}

TEST_CASE("partition cells hold their own counts") {
    PredictorConfig cfg = partition_config(0.0, 4.0, 4);
    LabeledSet train;
    train.push_back({0.5}, 1);
    train.push_back({0.6}, 1);
    train.push_back({0.7}, 0);
    train.push_back({3.5}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({0.2}).second == doctest::Approx(2.0 / 3.0));
    CHECK(p.predict({3.9}).second == doctest::Approx(1e-3));
}

TEST_CASE("empty partition cell answers with the global fraction") {
    PredictorConfig cfg = partition_config(0.0, 4.0, 4);
    LabeledSet train;
    train.push_back({0.5}, 1);
    train.push_back({0.6}, 0);
    train.push_back({0.7}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({2.5}).second == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("points outside the grid clamp into the edge cells") {
    PredictorConfig cfg = partition_config(0.0, 4.0, 4);
    LabeledSet train;
    train.push_back({-10.0}, 1);
    train.push_back({0.5}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK(p.predict({0.2}).second == doctest::Approx(0.5));
    CHECK(p.predict({100.0}).second == doctest::Approx(0.5));
}

TEST_CASE("default grid resolution targets a fixed cell budget") {
    UnlabeledPool pool1({{0.0}, {1.0}}, {0, 1});
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Partition;
    CHECK(resolve_predictor_config(cfg, pool1).grid->cells_per_dim == 8);

    UnlabeledPool pool2({{0.0, 0.0}, {1.0, 1.0}}, {0, 1});
    CHECK(resolve_predictor_config(cfg, pool2).grid->cells_per_dim == 8);

    UnlabeledPool pool3({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, {0, 1});
    CHECK(resolve_predictor_config(cfg, pool3).grid->cells_per_dim == 4);

    cfg.cells_per_dim = 5;
    CHECK(resolve_predictor_config(cfg, pool3).grid->cells_per_dim == 5);
    CHECK(resolve_predictor_config(cfg, pool1).grid->lo == FeatureVector{0.0});
    CHECK(resolve_predictor_config(cfg, pool1).grid->hi == FeatureVector{1.0});
}

TEST_CASE("explicit zero hyperparameters are rejected") {
    LabeledSet train;
    train.push_back({0.0}, 0);
    train.push_back({1.0}, 1);

    PredictorConfig knn;
    knn.kind = PredictorKind::Knn;
    knn.k = 0;
    CHECK_THROWS_AS(Predictor::fit(knn, train), Error);

    PredictorConfig kernel;
    kernel.kind = PredictorKind::Kernel;
    kernel.bandwidth = 0.0;
    CHECK_THROWS_AS(Predictor::fit(kernel, train), Error);

    PredictorConfig part;
    part.kind = PredictorKind::Partition;
    part.grid = PartitionGrid{{0.0}, {1.0}, 0};
    CHECK_THROWS_AS(Predictor::fit(part, train), Error);

    PredictorConfig clip;
    clip.kind = PredictorKind::Knn;
    clip.clip_eps = 0.5;
    CHECK_THROWS_AS(Predictor::fit(clip, train), Error);

    PredictorConfig bare;
    bare.kind = PredictorKind::Partition;
    CHECK_THROWS_AS(Predictor::fit(bare, train), Error);
}

TEST_CASE("training input is validated") {
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Knn;
    CHECK_THROWS_AS(Predictor::fit(cfg, LabeledSet{}), Error);

    LabeledSet train;
    train.push_back({0.0}, 0);
    Predictor p = Predictor::fit(cfg, train);
    CHECK_THROWS_AS(p.update({0.0, 1.0}, 1), Error);
    CHECK_THROWS_AS(p.update({1.0}, 2), Error);
    CHECK_THROWS_AS(p.predict({1.0, 2.0}), Error);
}

TEST_CASE("more data sharpens separable predictions") {
    Rng rng(57);
    PredictorConfig cfg;
    cfg.kind = PredictorKind::Knn;
    LabeledSet train;
    auto add_batch = [&](std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            double z = rng.coin() ? 1.0 : 0.0;
            train.push_back({rng.normal() * 0.3 + 4.0 * z}, static_cast<Label>(z));
        }
    };
    add_batch(10);
    Predictor small = Predictor::fit(cfg, train);
    add_batch(190);
    Predictor big = Predictor::fit(cfg, train);
    double q_small = small.predict({4.0}).second;
    double q_big = big.predict({4.0}).second;
    CHECK(q_big >= q_small);
    CHECK(q_big > 0.95);
}
