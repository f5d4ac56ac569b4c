#include "actprompt/keyframe/keyframe.hpp"

#include <cmath>
#include <string>

#include "actprompt/core/errors.hpp"

namespace actprompt {

KeyframeIndices::KeyframeIndices(std::vector<std::size_t> indices, std::size_t episode_length)
    : indices_(std::move(indices)) {
    if (indices_.empty()) throw ValidationError("keyframe list is empty");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] >= episode_length) {
            throw ValidationError("keyframe index " + std::to_string(indices_[i]) + " outside episode of length " +
                                  std::to_string(episode_length));
        }
        if (i > 0 && indices_[i] <= indices_[i - 1]) throw ValidationError("keyframes must be strictly increasing");
    }
    if (indices_.back() != episode_length - 1) throw ValidationError("keyframes must end at the final frame");
}

std::vector<bool> qualifying_frames(const Episode& episode, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("velocity threshold must be positive");
    const auto& vels = episode.velocities();
    const auto& acts = episode.actions();
    const std::size_t n = episode.length();
    std::vector<bool> qualifies(n, false);
    for (std::size_t t = 0; t < n; ++t) {
        const bool still = vels[t].norm() < delta;
        const bool gripper_changes = t + 1 < n && acts[t].gripper != acts[t + 1].gripper;
        qualifies[t] = still || gripper_changes;
    }
    return qualifies;
}

KeyframeIndices extract_keyframes(const Episode& episode, double delta) {
    const auto qualifies = qualifying_frames(episode, delta);
    const std::size_t n = qualifies.size();
    std::vector<std::size_t> keyframes;
    for (std::size_t t = 0; t < n; ++t) {
        const bool run_ends = qualifies[t] && (t + 1 == n || !qualifies[t + 1]);
        if (run_ends) keyframes.push_back(t);
    }
    if (keyframes.empty() || keyframes.back() != n - 1) keyframes.push_back(n - 1);
    return {std::move(keyframes), n};
}

KeyframeIndices sample_uniform(std::size_t episode_length, std::size_t interval) {
    if (interval == 0) throw ArgumentError("sampling interval must be >= 1");
    if (episode_length < 2) throw ArgumentError("episode length must be >= 2");
    std::vector<std::size_t> indices;
    for (std::size_t t = 0; t < episode_length; t += interval) indices.push_back(t);
    if (indices.back() != episode_length - 1) indices.push_back(episode_length - 1);
    return {std::move(indices), episode_length};
}

}  // namespace actprompt
