#pragma once

#include <cstddef>
#include <vector>

#include "actprompt/core/types.hpp"

namespace actprompt {

/// Strictly increasing timestep indices into an episode of length T whose
/// last element is T-1.
class KeyframeIndices {
public:
    KeyframeIndices(std::vector<std::size_t> indices, std::size_t episode_length);

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    std::size_t operator[](std::size_t i) const { return indices_[i]; }
    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }

    friend bool operator==(const KeyframeIndices&, const KeyframeIndices&) = default;

private:
    std::vector<std::size_t> indices_;
};

/// Per-frame keyframe criterion before run collapsing: frame t qualifies when
/// its joint-velocity norm is below `delta` or the gripper state differs
/// between t and t+1.
std::vector<bool> qualifying_frames(const Episode& episode, double delta);

/// Collapses each maximal run of qualifying frames to its last index and
/// appends T-1 if it is missing.
KeyframeIndices extract_keyframes(const Episode& episode, double delta);

/// Frames 0, interval, 2*interval, ... below episode_length, plus the final
/// frame.
KeyframeIndices sample_uniform(std::size_t episode_length, std::size_t interval);

}  // namespace actprompt
