#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actprompt/core/errors.hpp"
#include "actprompt/core/types.hpp"
#include "actprompt/keyframe/keyframe.hpp"
#include "actprompt/llm/llm_bridge.hpp"
#include "actprompt/promptgen/prompt.hpp"
#include "actprompt/sim/expert.hpp"
#include "actprompt/sim/tasks.hpp"

namespace actprompt::harness {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class KeyframeMode { Keyframes, Uniform };
enum class LoopMode { Open, Closed };

struct NoiseConfig {
    double k = 1.0;
    double sigma_t = sim::kBaseSigmaTranslation;
    double sigma_r = sim::kBaseSigmaRotation;
};

/// Eval reset seeds start at seed + kEvalSeedOffset; demo seeds stay below it.
inline constexpr std::uint64_t kEvalSeedOffset = 1'000'000;

struct RunConfig {
    sim::TaskId task = sim::TaskId::StackCube;
    int n_demos = 10;
    int n_eval = 25;
    double delta = 0.01;
    WorkspaceBounds bounds = WorkspaceBounds::desk_default();
    sim::Geometry geometry;

    llm::Provider provider = llm::Provider::MockNearest;
    std::string endpoint;
    std::string model = "gpt-4-turbo";
    std::string credential_env = "OPENAI_API_KEY";
    int max_tokens = 1024;
    double temperature = 0.0;
    llm::RemoteOptions remote;

    int system_prompt = 0;
    KeyframeMode keyframe_mode = KeyframeMode::Keyframes;
    std::size_t interval = 10;
    LoopMode loop_mode = LoopMode::Open;
    std::optional<NoiseConfig> noise;
    std::uint64_t seed = 0;

    /// Test worlds replicate demo worlds instead of using fresh seeds.
    bool match_demo_seeds = false;
    /// In match mode, eval episode j replicates demo identity j mod this
    /// value (0 means n_demos). Identities beyond the pool are still valid.
    int match_modulus = 0;

    int workers = 1;
    std::string arm = "eval";

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Task whose expert produces the demonstrations. PushMultipleButtons is
/// taught with single-button demos only.
sim::TaskId demo_task(sim::TaskId task);

struct DemoIdentity {
    std::uint64_t seed;
    sim::Variation variation;
};

/// Seed-prefix demo policy with round-robin variations: demo i uses seed
/// `seed + i` and variation i mod |variations|. In match mode for
/// PushMultipleButtons four consecutive demos share one layout, one per color.
DemoIdentity demo_identity(const RunConfig& config, std::size_t index);

struct DemoRecord {
    DemoIdentity identity;
    sim::ExpertRollout rollout;
    KeyframeIndices keyframes;
};

std::vector<DemoRecord> build_demo_pool(const RunConfig& config);

struct EvalEpisode {
    std::uint64_t seed;
    sim::ResetResult reset;
};

std::vector<EvalEpisode> build_eval_episodes(const RunConfig& config);

/// Seed of the noise stream for one observation set. `role` separates demo
/// observations from test observations. Closed-loop blocks of one demo share
/// the demo's stream, so a static object keeps the same noisy pose.
std::uint64_t noise_seed(const RunConfig& config, std::uint64_t episode_seed, std::uint64_t role);

std::vector<ObjectObservation> observe(const RunConfig& config, std::span<const ObjectObservation> truth,
                                       std::uint64_t episode_seed, std::uint64_t role);

/// Prompt plus the structured view handed to mock providers.
struct PreparedQuery {
    PromptBundle prompt;
    std::string test_input;
    llm::CompletionQuery query;
};

struct DemoExamples {
    std::vector<IclExample> examples;
    std::vector<llm::MockDemo> mock_demos;
};

DemoExamples build_examples(const RunConfig& config, std::span<const DemoRecord> demos);

PreparedQuery prepare_query(const RunConfig& config, const DemoExamples& demos, const EvalEpisode& episode);

struct EpisodeRecord {
    std::uint64_t seed = 0;
    bool success = false;
    bool parse_error = false;
    std::size_t n_actions = 0;
    double latency_ms = 0.0;
    std::size_t prompt_chars = 0;
    std::string instruction;
};

struct EvalReport {
    RunConfig config;
    std::vector<EpisodeRecord> episodes;
    std::vector<std::uint64_t> demo_seeds;
    std::vector<std::vector<std::size_t>> demo_keyframes;

    std::size_t successes() const;
    double success_rate() const;
};

/// Runs one episode through prompt, completion, parsing and execution. Parse
/// failures are scored as failures; provider transport errors propagate.
EpisodeRecord run_episode(const RunConfig& config, const DemoExamples& demos, const EvalEpisode& episode,
                          llm::CompletionProvider& provider);

std::unique_ptr<llm::CompletionProvider> make_provider(const RunConfig& config);

EvalReport run_eval(const RunConfig& config);
EvalReport run_eval(const RunConfig& config, llm::CompletionProvider& provider);

inline const std::vector<std::size_t> kDefaultIntervals = {5, 10, 20, 40, 80};
inline const std::vector<int> kDefaultShots = {1, 2, 5, 10};
inline const std::vector<double> kDefaultNoiseScales = {0.5, 1.0, 1.5, 2.0};

/// Keyframe arm first, then one uniform-sampling arm per interval.
std::vector<EvalReport> ablate_sampling(const RunConfig& config,
                                        const std::vector<std::size_t>& intervals = kDefaultIntervals);
std::vector<EvalReport> ablate_shots(const RunConfig& config, const std::vector<int>& shot_counts = kDefaultShots);
std::vector<EvalReport> ablate_noise(const RunConfig& config, const std::vector<double>& ks = kDefaultNoiseScales);
std::vector<EvalReport> ablate_prompts(const RunConfig& config);
std::vector<EvalReport> ablate_loop_mode(const RunConfig& config);

inline constexpr const char* kCsvHeader = "task,provider,arm,seed,success,parse_error,n_actions,latency_ms";

/// Rows ordered by report (arm) then by seed.
std::string csv_text(std::span<const EvalReport> reports);
void emit_csv(std::span<const EvalReport> reports, const std::filesystem::path& path);

}  // namespace actprompt::harness
