#include <doctest.h>

#include <random>

#include "actprompt/core/errors.hpp"
#include "actprompt/keyframe/keyframe.hpp"
#include "fixtures.hpp"

using namespace actprompt;

namespace {

// Episode with the given per-frame velocity norms and gripper bits.
Episode scripted(const std::vector<double>& norms, const std::vector<int>& grip = {}) {
    std::vector<JointVelocities> vels;
    std::vector<Action> acts;
    for (std::size_t t = 0; t < norms.size(); ++t) {
        std::array<double, 7> v{};
        v[0] = norms[t];
        vels.emplace_back(v);
        const int bit = grip.empty() ? 1 : grip[t];
        acts.push_back({Pose6(), gripper_from_bit(bit)});
    }
    return Episode("i", {ObjectObservation("o", Pose6())}, std::move(vels), std::move(acts));
}

std::vector<std::size_t> kf(const Episode& e, double delta) { return extract_keyframes(e, delta).indices(); }

using Idx = std::vector<std::size_t>;

}  // namespace

TEST_CASE("single slow frame") {
    CHECK(kf(scripted({0.5, 0.5, 0.05, 0.5, 0.5}), 0.1) == Idx{2, 4});
}

TEST_CASE("gripper change fires at the frame before the change") {
    const auto e = scripted({0.5, 0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0, 0});
    CHECK(kf(e, 0.1) == Idx{1, 4});
}

TEST_CASE("dwell runs collapse to their last frame") {
    CHECK(kf(scripted({0.05, 0.04, 0.5, 0.03, 0.02, 0.5}), 0.1) == Idx{1, 4, 5});
}

TEST_CASE("co-firing criteria yield one keyframe") {
    const auto e = scripted({0.5, 0.01, 0.5, 0.5}, {1, 1, 0, 0});
    CHECK(kf(e, 0.1) == Idx{1, 3});
}

TEST_CASE("final frame is never duplicated") {
    CHECK(kf(scripted({0.5, 0.5, 0.01}), 0.1) == Idx{2});
    CHECK(kf(scripted({0.5, 0.5, 0.5}), 0.1) == Idx{2});
}

TEST_CASE("frame 0 is kept when it qualifies") {
    CHECK(kf(scripted({0.0, 0.5, 0.5}), 0.1) == Idx{0, 2});
}

TEST_CASE("extract_keyframes rejects a non-positive threshold") {
    const auto e = scripted({0.5, 0.5});
    CHECK_THROWS_AS(extract_keyframes(e, 0.0), ArgumentError);
    CHECK_THROWS_AS(extract_keyframes(e, -1.0), ArgumentError);
}

TEST_CASE("collapsed indices are the maxima of maximal qualifying runs") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const auto e = fixtures::random_episode(rng, 0.1);
        const auto q = qualifying_frames(e, 0.1);
        const auto idx = kf(e, 0.1);
        const std::size_t T = e.length();
        CHECK(idx.size() <= T);
        CHECK(idx.back() == T - 1);
        for (std::size_t k : idx) {
            if (k == T - 1 && !q[k]) continue;
            REQUIRE(q[k]);
            if (k + 1 < T) REQUIRE_FALSE(q[k + 1]);
        }
        // Every run is represented.
        for (std::size_t t = 0; t < T; ++t) {
            if (q[t] && (t + 1 == T || !q[t + 1])) REQUIRE(std::find(idx.begin(), idx.end(), t) != idx.end());
        }
    }
}

TEST_CASE("qualifying set is monotone in delta") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto e = fixtures::random_episode(rng, 0.1);
        const auto lo = qualifying_frames(e, 0.05);
        const auto hi = qualifying_frames(e, 0.2);
        for (std::size_t t = 0; t < lo.size(); ++t) {
            if (lo[t]) REQUIRE(hi[t]);
        }
    }
}

TEST_CASE("sample_uniform") {
    CHECK(sample_uniform(10, 5).indices() == Idx{0, 5, 9});
    CHECK(sample_uniform(10, 20).indices() == Idx{0, 9});
    CHECK(sample_uniform(201, 40).indices() == Idx{0, 40, 80, 120, 160, 200});
    CHECK(sample_uniform(2, 1).indices() == Idx{0, 1});
    CHECK_THROWS_AS(sample_uniform(10, 0), ArgumentError);
    CHECK_THROWS_AS(sample_uniform(1, 3), ArgumentError);

    for (std::size_t T = 2; T < 120; ++T) {
        for (std::size_t k = 1; k < 90; k += 7) {
            const auto idx = sample_uniform(T, k).indices();
            REQUIRE(idx.back() == T - 1);
            REQUIRE(std::adjacent_find(idx.begin(), idx.end(), std::greater_equal<>()) == idx.end());
        }
    }
}

TEST_CASE("KeyframeIndices invariants") {
    CHECK_NOTHROW(KeyframeIndices({0, 3}, 4));
    CHECK_THROWS_AS(KeyframeIndices({}, 4), ValidationError);
    CHECK_THROWS_AS(KeyframeIndices({0, 2}, 4), ValidationError);
    CHECK_THROWS_AS(KeyframeIndices({2, 2, 3}, 4), ValidationError);
    CHECK_THROWS_AS(KeyframeIndices({0, 4}, 4), ValidationError);
}
