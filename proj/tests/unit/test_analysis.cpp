#include <doctest.h>

#include <cmath>

#include "analysis.hpp"
#include "errors.hpp"
#include "masking.hpp"

using namespace bansa;

namespace {

AttentionMap random_map(std::size_t n, RngStream& stream) {
    Matrix logits(n, n);
    for (double& v : logits.data()) v = (stream.next_unit() * 2.0 - 1.0) * 3.0;
    return softmax_rows(logits);
}

TrajectoryRecord make_trajectory(std::size_t steps, std::size_t tokens, std::size_t dim,
                                 double (*value)(std::size_t step, std::size_t coord)) {
    TrajectoryRecord trajectory;
    for (std::size_t s = 0; s < steps; ++s) {
        LatentState state;
        state.tokens = tokens;
        state.dim = dim;
        state.t = steps - 1 - s;
        state.data = Matrix(tokens, dim);
        for (std::size_t c = 0; c < tokens * dim; ++c) {
            state.data.data()[c] = value(s, c);
        }
        trajectory.states.push_back(std::move(state));
    }
    return trajectory;
}

}  // namespace

TEST_CASE("identical maps have zero pairwise distance") {
    const AttentionMap map = AttentionMap::validated(Matrix(4, 4, 0.25));
    CHECK(pairwise_attention_distance(std::vector{map, map, map}) == 0.0);
}

TEST_CASE("identity vs anti-identity distance is 2") {
    const AttentionMap a = AttentionMap::validated(Matrix::from_data(2, 2, {1, 0, 0, 1}));
    const AttentionMap b = AttentionMap::validated(Matrix::from_data(2, 2, {0, 1, 1, 0}));
    CHECK(pairwise_attention_distance(std::vector{a, b}) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("pairwise distance matches a double-loop oracle") {
    RngStream stream = make_stream(1, "pairwise");
    std::vector<AttentionMap> maps;
    for (int i = 0; i < 3; ++i) maps.push_back(random_map(5, stream));
    const double got = pairwise_attention_distance(maps);

    double total = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = 0; j < maps.size(); ++j) {
            if (j <= i) continue;
            long double acc = 0.0L;
            for (std::size_t r = 0; r < 5; ++r) {
                for (std::size_t c = 0; c < 5; ++c) {
                    const long double d = maps[i](r, c) - maps[j](r, c);
                    acc += d * d;
                }
            }
            total += std::sqrt(static_cast<double>(acc));
            pairs += 1;
        }
    }
    CHECK(got == doctest::Approx(total / pairs).epsilon(1e-12));
}

TEST_CASE("pairwise distance is symmetric and zero only for equal maps") {
    RngStream stream = make_stream(2, "symmetry");
    const AttentionMap a = random_map(4, stream);
    const AttentionMap b = random_map(4, stream);
    CHECK(pairwise_attention_distance(std::vector{a, b}) ==
          pairwise_attention_distance(std::vector{b, a}));
    CHECK(pairwise_attention_distance(std::vector{a, b}) > 1e-12);
    CHECK_THROWS_AS(pairwise_attention_distance(std::vector{a}), Error);
}

TEST_CASE("constant trajectories have zero variation") {
    const TrajectoryRecord constant =
        make_trajectory(30, 2, 3, [](std::size_t, std::size_t c) {
            return 1.5 + static_cast<double>(c);
        });
    CHECK(trajectory_variation(constant, 0.25) == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("a linear ramp settles to its squared slope") {
    const double slope = 0.35;
    const TrajectoryRecord ramp = make_trajectory(60, 1, 1, [](std::size_t s, std::size_t) {
        return 0.35 * static_cast<double>(s);
    });
    const double v = trajectory_variation(ramp, 0.25);
    CHECK(std::fabs(v - slope * slope) / (slope * slope) < 0.10);
}

TEST_CASE("high-frequency noise is attenuated by the low-pass filter") {
    // alternating +/- noise on top of a ramp; its naive contribution to the
    // mean squared first difference must be suppressed to < 20%
    const double amp = 0.2;
    const TrajectoryRecord clean = make_trajectory(60, 1, 1, [](std::size_t s, std::size_t) {
        return 0.1 * static_cast<double>(s);
    });
    const TrajectoryRecord noisy = make_trajectory(60, 1, 1, [](std::size_t s, std::size_t) {
        return 0.1 * static_cast<double>(s) + ((s % 2 == 0) ? 0.2 : -0.2);
    });
    const double base = trajectory_variation(clean, 0.25);
    const double with_noise = trajectory_variation(noisy, 0.25);
    // unfiltered, the alternating part alone adds (2*amp)^2 to every step
    const double naive_contribution = 4.0 * amp * amp;
    CHECK(std::fabs(with_noise - base) < 0.20 * naive_contribution);
}

TEST_CASE("trajectory variation is translation invariant") {
    RngStream stream = make_stream(3, "translate");
    TrajectoryRecord trajectory;
    for (int s = 0; s < 25; ++s) {
        LatentState state;
        state.tokens = 3;
        state.dim = 2;
        state.data = random_gaussian(3, 2, stream);
        trajectory.states.push_back(state);
    }
    TrajectoryRecord shifted = trajectory;
    for (auto& state : shifted.states) {
        for (double& v : state.data.data()) v += 7.25;
    }
    CHECK(std::fabs(trajectory_variation(trajectory, 0.25) -
                    trajectory_variation(shifted, 0.25)) < 1e-9);
}

TEST_CASE("trajectory variation validates its inputs") {
    const TrajectoryRecord two = make_trajectory(2, 1, 1, [](std::size_t s, std::size_t) {
        return static_cast<double>(s);
    });
    CHECK_THROWS_AS(trajectory_variation(two, 0.25), Error);
    const TrajectoryRecord ok = make_trajectory(5, 1, 1, [](std::size_t s, std::size_t) {
        return static_cast<double>(s);
    });
    CHECK_THROWS_AS(trajectory_variation(ok, 0.0), Error);
    CHECK_THROWS_AS(trajectory_variation(ok, 0.5), Error);
}

TEST_CASE("intra-frame variance basics") {
    LatentState constant;
    constant.tokens = 3;
    constant.dim = 4;
    constant.data = Matrix(3, 4, 2.5);
    CHECK(intra_frame_variance(constant) == 0.0);

    LatentState rows01;
    rows01.tokens = 2;
    rows01.dim = 4;
    rows01.data = Matrix(2, 4);
    for (std::size_t j = 0; j < 4; ++j) rows01.data(1, j) = 1.0;
    CHECK(intra_frame_variance(rows01) == 0.0);
}

TEST_CASE("intra-frame variance of standard normal entries is about 1") {
    RngStream stream = make_stream(4, "variance");
    double total = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        LatentState state;
        state.tokens = 16;
        state.dim = 8;
        state.data = random_gaussian(16, 8, stream);
        total += intra_frame_variance(state);
    }
    CHECK(std::fabs(total / 100.0 - 1.0) < 0.10);
}

TEST_CASE("group summary of identical clones is all zeros") {
    const AttentionMap map = AttentionMap::validated(Matrix(3, 3, 1.0 / 3.0));
    const std::vector<AttentionMap> group = {map, map};
    const GroupDistanceSummary summary = group_summary(group, group);
    CHECK(summary.intra_low == 0.0);
    CHECK(summary.intra_high == 0.0);
    CHECK(summary.cross == 0.0);
}

TEST_CASE("disjoint tight clusters have larger cross than intra distances") {
    RngStream stream = make_stream(5, "clusters");
    const AttentionMap center_a = random_map(6, stream);
    const AttentionMap center_b = random_map(6, stream);
    auto jitter = [&](const AttentionMap& center, std::uint64_t idx) {
        return apply_mask(center, sample_mask(6, 0.02, stream.split(idx)));
    };
    const std::vector<AttentionMap> low = {jitter(center_a, 1), jitter(center_a, 2),
                                           jitter(center_a, 3)};
    const std::vector<AttentionMap> high = {jitter(center_b, 4), jitter(center_b, 5),
                                            jitter(center_b, 6)};
    const GroupDistanceSummary summary = group_summary(low, high);
    CHECK(summary.cross > summary.intra_low);
    CHECK(summary.cross > summary.intra_high);
}

TEST_CASE("small vs large mask perturbations reproduce the dispersion ordering") {
    RngStream stream = make_stream(6, "dispersion");
    const AttentionMap base = random_map(8, stream);
    auto masked_group = [&](double p, std::uint64_t salt) {
        std::vector<AttentionMap> group;
        for (int i = 0; i < 6; ++i) {
            group.push_back(apply_mask(base, sample_mask(8, p, stream.split(salt + i))));
        }
        return group;
    };
    const auto low = masked_group(0.05, 100);   // small perturbations
    const auto high = masked_group(0.45, 200);  // large perturbations
    const GroupDistanceSummary summary = group_summary(low, high);
    CHECK(summary.intra_low < summary.intra_high);
}

TEST_CASE("group summary is invariant to within-group order") {
    RngStream stream = make_stream(7, "order");
    std::vector<AttentionMap> a = {random_map(4, stream), random_map(4, stream),
                                   random_map(4, stream)};
    std::vector<AttentionMap> b = {random_map(4, stream), random_map(4, stream)};
    const GroupDistanceSummary forward = group_summary(a, b);
    std::swap(a[0], a[2]);
    std::swap(b[0], b[1]);
    const GroupDistanceSummary shuffled = group_summary(a, b);
    CHECK(forward.intra_low == shuffled.intra_low);
    CHECK(forward.intra_high == shuffled.intra_high);
    CHECK(forward.cross == shuffled.cross);
}

TEST_CASE("trajectory distances") {
    const TrajectoryRecord a = make_trajectory(10, 2, 2, [](std::size_t s, std::size_t c) {
        return static_cast<double>(s + c);
    });
    TrajectoryRecord b = a;
    CHECK(trajectory_distance(a, b) == 0.0);
    for (auto& state : b.states) {
        for (double& v : state.data.data()) v += 1.0;
    }
    CHECK(trajectory_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pairwise_trajectory_distance(std::vector{a, a, a}) == 0.0);
}
