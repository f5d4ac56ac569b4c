#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "actprompt/core/types.hpp"

namespace actprompt {

/// Writes one JSON record per line. Doubles use shortest round-trip form, so
/// load_episodes(save_episodes(e)) reproduces `e` bit for bit.
void save_episodes(const std::vector<Episode>& episodes, const std::filesystem::path& path);

/// Blank lines are skipped. Malformed records raise PersistenceError and
/// invariant violations raise ValidationError; both name the 1-based line.
std::vector<Episode> load_episodes(const std::filesystem::path& path);

std::string episode_to_json_line(const Episode& episode);
Episode episode_from_json_line(const std::string& line);

}  // namespace actprompt
