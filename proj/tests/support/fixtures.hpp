#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "actprompt/core/types.hpp"

namespace fixtures {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path golden(const std::string& name) { return std::filesystem::path(GOLDEN_DIR) / name; }

inline std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("actprompt_test_" + name);
}

// Random episode whose velocity norms straddle `delta`: each frame is "slow"
// with probability p_slow and the gripper flips with probability p_flip.
inline actprompt::Episode random_episode(std::mt19937_64& rng, double delta, std::size_t min_len = 2,
                                         std::size_t max_len = 60, double p_slow = 0.3, double p_flip = 0.1) {
    using namespace actprompt;
    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coord(-0.5, 0.5);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    const std::size_t T = len_dist(rng);

    std::vector<JointVelocities> vels;
    std::vector<Action> acts;
    GripperState g = unit(rng) < 0.5 ? GripperState::Open : GripperState::Closed;
    for (std::size_t t = 0; t < T; ++t) {
        // Pick a target norm, then a random direction with that norm.
        const double target = unit(rng) < p_slow ? unit(rng) * delta * 0.999 : delta * (1.0 + unit(rng) * 5.0);
        std::array<double, 7> v{};
        double n2 = 0.0;
        for (auto& c : v) {
            c = coord(rng);
            n2 += c * c;
        }
        const double scale = n2 > 0.0 ? target / std::sqrt(n2) : 0.0;
        for (auto& c : v) c *= scale;
        vels.emplace_back(v);
        if (unit(rng) < p_flip) g = g == GripperState::Open ? GripperState::Closed : GripperState::Open;
        acts.push_back({Pose6(coord(rng), coord(rng), coord(rng) + 0.5, angle(rng), angle(rng), angle(rng)), g});
    }
    std::vector<ObjectObservation> objects;
    objects.emplace_back("cube", Pose6(coord(rng), coord(rng), 0.02, 0.0, 0.0, angle(rng)));
    return Episode("do the thing", std::move(objects), std::move(vels), std::move(acts));
}

}  // namespace fixtures
