#include "actprompt/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "actprompt/discretizer/discretizer.hpp"
#include "actprompt/promptgen/response_parser.hpp"
#include "actprompt/sim/world.hpp"

namespace actprompt::harness {
namespace {

constexpr std::uint64_t kDemoObservationRole = 1;
constexpr std::uint64_t kTestObservationRole = 2;
constexpr std::size_t kColorsPerLayout = 4;

bool is_multi(const RunConfig& c) { return c.task == sim::TaskId::PushMultipleButtons; }

std::size_t match_modulus(const RunConfig& c) {
    return static_cast<std::size_t>(c.match_modulus > 0 ? c.match_modulus : c.n_demos);
}

std::vector<int> observation_bins(std::span<const ObjectObservation> obs, const WorkspaceBounds& bounds) {
    std::vector<int> bins;
    bins.reserve(obs.size() * 6);
    for (const auto& o : obs) {
        const auto b = discretize_pose(o.pose(), bounds).bins();
        bins.insert(bins.end(), b.begin(), b.end());
    }
    return bins;
}

std::string format_scale(double k) {
    std::ostringstream out;
    out << k;
    return out.str();
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& why) { throw ConfigError("invalid run config: " + why); };
    if (n_demos < 1) fail("n_demos must be >= 1");
    if (n_eval < 1) fail("n_eval must be >= 1");
    if (static_cast<std::uint64_t>(n_demos) >= kEvalSeedOffset || static_cast<std::uint64_t>(n_eval) >= kEvalSeedOffset) {
        fail("n_demos and n_eval must stay below the eval seed offset");
    }
    if (!(delta > 0.0)) fail("delta must be > 0");
    if (system_prompt < 0 || system_prompt > 2) fail("system prompt index must be 0, 1 or 2");
    if (keyframe_mode == KeyframeMode::Uniform && interval < 1) fail("uniform interval must be >= 1");
    if (noise && (!(noise->k >= 0.0) || !(noise->sigma_t >= 0.0) || !(noise->sigma_r >= 0.0))) {
        fail("noise scale and sigmas must be >= 0");
    }
    if (match_modulus < 0) fail("match_modulus must be >= 0");
    if (match_demo_seeds && task == sim::TaskId::PushMultipleButtons && harness::match_modulus(*this) < kColorsPerLayout) {
        fail("matched push-multiple-buttons runs need at least 4 demos (one per color)");
    }
    if (workers < 1) fail("workers must be >= 1");
    if (max_tokens < 1) fail("max_tokens must be >= 1");
    if (provider == llm::Provider::Remote && endpoint.empty()) fail("remote provider needs an endpoint");
}

sim::TaskId demo_task(sim::TaskId task) {
    return task == sim::TaskId::PushMultipleButtons ? sim::TaskId::PushButton : task;
}

DemoIdentity demo_identity(const RunConfig& config, std::size_t index) {
    const auto& spec = sim::task_spec(demo_task(config.task));
    const auto variations = sim::enumerate_variations(spec);
    if (config.match_demo_seeds && is_multi(config)) {
        return {config.seed + index / kColorsPerLayout, variations[index % kColorsPerLayout]};
    }
    return {config.seed + index, variations[index % variations.size()]};
}

std::vector<DemoRecord> build_demo_pool(const RunConfig& config) {
    const auto& spec = sim::task_spec(demo_task(config.task));
    std::vector<DemoRecord> pool;
    pool.reserve(static_cast<std::size_t>(config.n_demos));
    for (std::size_t i = 0; i < static_cast<std::size_t>(config.n_demos); ++i) {
        DemoIdentity id = demo_identity(config, i);
        auto start = sim::reset(spec, id.seed, config.bounds, id.variation, config.geometry);
        auto rollout = sim::scripted_rollout(spec, start.world, start.instruction, config.bounds, config.geometry);
        const auto& ep = rollout.episode;
        KeyframeIndices kf = config.keyframe_mode == KeyframeMode::Keyframes
                                 ? extract_keyframes(ep, config.delta)
                                 : sample_uniform(ep.length(), config.interval);
        pool.push_back({std::move(id), std::move(rollout), std::move(kf)});
    }
    return pool;
}

std::vector<EvalEpisode> build_eval_episodes(const RunConfig& config) {
    const auto& spec = sim::task_spec(config.task);
    std::vector<EvalEpisode> episodes;
    for (std::size_t j = 0; j < static_cast<std::size_t>(config.n_eval); ++j) {
        if (!config.match_demo_seeds) {
            const std::uint64_t seed = config.seed + kEvalSeedOffset + j;
            episodes.push_back({seed, sim::reset(spec, seed, config.bounds, config.geometry)});
        } else if (is_multi(config)) {
            const std::size_t layouts = match_modulus(config) / kColorsPerLayout;
            const std::uint64_t seed = config.seed + j % layouts;
            episodes.push_back({seed, sim::reset(spec, seed, config.bounds, config.geometry)});
        } else {
            const DemoIdentity id = demo_identity(config, j % match_modulus(config));
            episodes.push_back({id.seed, sim::reset(spec, id.seed, config.bounds, id.variation, config.geometry)});
        }
    }
    return episodes;
}

std::uint64_t noise_seed(const RunConfig& config, std::uint64_t episode_seed, std::uint64_t role) {
    return sim::mix_seed(sim::mix_seed(config.seed, episode_seed), role);
}

std::vector<ObjectObservation> observe(const RunConfig& config, std::span<const ObjectObservation> truth,
                                       std::uint64_t episode_seed, std::uint64_t role) {
    if (!config.noise || config.noise->k == 0.0) return {truth.begin(), truth.end()};
    const auto& n = *config.noise;
    return sim::add_pose_noise(truth, n.k, n.sigma_t, n.sigma_r, noise_seed(config, episode_seed, role));
}

DemoExamples build_examples(const RunConfig& config, std::span<const DemoRecord> demos) {
    DemoExamples out;
    for (const auto& demo : demos) {
        const Episode& truth = demo.rollout.episode;
        const auto seed = demo.identity.seed;
        Episode observed(truth.instruction(), observe(config, truth.objects(), seed, kDemoObservationRole),
                         truth.velocities(), truth.actions());
        IclExample example;
        if (config.loop_mode == LoopMode::Open) {
            example = build_icl_example(observed, demo.keyframes, config.bounds);
        } else {
            const auto& trace = demo.rollout.object_trace;
            ObjectPoseFn poses = [&](std::size_t t) -> std::optional<std::vector<ObjectObservation>> {
                if (t >= trace.size()) return std::nullopt;
                return observe(config, trace[t], seed, kDemoObservationRole);
            };
            example = build_closed_loop_example(observed, demo.keyframes, config.bounds, poses);
        }
        out.mock_demos.push_back(
            {observation_bins(observed.objects(), config.bounds), observed.instruction(), example.output});
        out.examples.push_back(std::move(example));
    }
    return out;
}

PreparedQuery prepare_query(const RunConfig& config, const DemoExamples& demos, const EvalEpisode& episode) {
    const auto truth = episode.reset.world.observations();
    const auto test_obs = observe(config, truth, episode.seed, kTestObservationRole);
    const std::string& instruction = episode.reset.instruction;

    PreparedQuery prepared;
    prepared.test_input = format_input(test_obs, instruction, config.bounds);
    const auto& system = default_system_prompts().at(static_cast<std::size_t>(config.system_prompt));
    prepared.prompt = assemble_prompt(demos.examples, prepared.test_input, system);

    auto& q = prepared.query;
    q.request.system = prepared.prompt.system;
    q.request.user = prepared.prompt.body;
    q.request.model = config.model;
    q.request.max_tokens = config.max_tokens;
    q.request.temperature = config.temperature;
    q.demos = demos.mock_demos;
    q.test_observation = observation_bins(test_obs, config.bounds);
    q.test_instruction = instruction;
    return prepared;
}

EpisodeRecord run_episode(const RunConfig& config, const DemoExamples& demos, const EvalEpisode& episode,
                          llm::CompletionProvider& provider) {
    const auto& spec = sim::task_spec(config.task);
    EpisodeRecord record;
    record.seed = episode.seed;
    record.instruction = episode.reset.instruction;

    const PreparedQuery prepared = prepare_query(config, demos, episode);
    record.prompt_chars = prepared.prompt.system.size() + prepared.prompt.body.size();
    spdlog::debug("[{}] seed {} prompt {} chars", config.arm, episode.seed, record.prompt_chars);

    llm::CompletionResult completion;
    try {
        completion = provider.complete(prepared.query);
    } catch (const llm::OracleError& e) {
        spdlog::warn("[{}] seed {}: {}", config.arm, episode.seed, e.what());
        return record;
    }
    record.latency_ms = completion.latency_ms;

    std::vector<DiscreteAction> actions;
    try {
        actions = parse_response(completion.text);
    } catch (const ResponseParseError& e) {
        spdlog::debug("[{}] seed {}: {}", config.arm, episode.seed, e.what());
        record.parse_error = true;
        return record;
    }
    record.n_actions = actions.size();

    sim::WorldState world = episode.reset.world;
    for (const auto& action : actions) {
        try {
            world = sim::execute_action(world, dediscretize_action(action, config.bounds), config.bounds,
                                        config.geometry);
        } catch (const sim::ExecutionError& e) {
            spdlog::debug("[{}] seed {}: {}", config.arm, episode.seed, e.what());
            break;
        }
    }
    record.success = sim::check_success(spec, world, episode.reset.variation, config.geometry);
    return record;
}

std::size_t EvalReport::successes() const {
    return static_cast<std::size_t>(
        std::count_if(episodes.begin(), episodes.end(), [](const EpisodeRecord& r) { return r.success; }));
}

double EvalReport::success_rate() const {
    if (episodes.empty()) return 0.0;
    return static_cast<double>(successes()) / static_cast<double>(episodes.size());
}

std::unique_ptr<llm::CompletionProvider> make_provider(const RunConfig& config) {
    switch (config.provider) {
        case llm::Provider::MockNearest: return std::make_unique<llm::MockNearestProvider>();
        case llm::Provider::MockCompositional: return std::make_unique<llm::MockCompositionalProvider>();
        case llm::Provider::Remote: {
            if (config.endpoint.empty()) throw ConfigError("remote provider needs an endpoint");
            const char* credential = std::getenv(config.credential_env.c_str());
            if (credential == nullptr || *credential == '\0') {
                throw ConfigError("environment variable " + config.credential_env + " is not set");
            }
            return std::make_unique<llm::RemoteProvider>(config.endpoint, credential, config.remote);
        }
    }
    throw ConfigError("unknown provider");
}

EvalReport run_eval(const RunConfig& config) {
    config.validate();
    auto provider = make_provider(config);
    return run_eval(config, *provider);
}

EvalReport run_eval(const RunConfig& config, llm::CompletionProvider& provider) {
    config.validate();
    const auto pool = build_demo_pool(config);
    const auto demos = build_examples(config, pool);
    const auto episodes = build_eval_episodes(config);

    EvalReport report;
    report.config = config;
    for (const auto& d : pool) {
        report.demo_seeds.push_back(d.identity.seed);
        report.demo_keyframes.push_back(d.keyframes.indices());
    }
    report.episodes.resize(episodes.size());

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), episodes.size());
    if (workers <= 1) {
        for (std::size_t j = 0; j < episodes.size(); ++j) {
            report.episodes[j] = run_episode(config, demos, episodes[j], provider);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> threads;
            for (std::size_t w = 0; w < workers; ++w) {
                threads.emplace_back([&] {
                    for (std::size_t j = next++; j < episodes.size(); j = next++) {
                        try {
                            report.episodes[j] = run_episode(config, demos, episodes[j], provider);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                            next = episodes.size();
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    spdlog::info("[{}] {}: {}/{} successes", config.arm, sim::to_string(config.task), report.successes(),
                 report.episodes.size());
    return report;
}

std::vector<EvalReport> ablate_sampling(const RunConfig& config, const std::vector<std::size_t>& intervals) {
    std::vector<EvalReport> reports;
    RunConfig arm = config;
    arm.keyframe_mode = KeyframeMode::Keyframes;
    arm.arm = "keyframes";
    reports.push_back(run_eval(arm));
    for (std::size_t interval : intervals) {
        arm.keyframe_mode = KeyframeMode::Uniform;
        arm.interval = interval;
        arm.arm = "uniform-" + std::to_string(interval);
        reports.push_back(run_eval(arm));
    }
    return reports;
}

std::vector<EvalReport> ablate_shots(const RunConfig& config, const std::vector<int>& shot_counts) {
    std::vector<EvalReport> reports;
    RunConfig arm = config;
    if (config.match_demo_seeds && config.match_modulus == 0 && !shot_counts.empty()) {
        // Keep eval worlds identical across arms of different pool sizes.
        arm.match_modulus = *std::max_element(shot_counts.begin(), shot_counts.end());
    }
    for (int n : shot_counts) {
        arm.n_demos = n;
        arm.arm = "shots-" + std::to_string(n);
        reports.push_back(run_eval(arm));
    }
    return reports;
}

std::vector<EvalReport> ablate_noise(const RunConfig& config, const std::vector<double>& ks) {
    std::vector<EvalReport> reports;
    const NoiseConfig base = config.noise.value_or(NoiseConfig{});
    for (double k : ks) {
        RunConfig arm = config;
        arm.noise = NoiseConfig{k, base.sigma_t, base.sigma_r};
        arm.arm = "noise-" + format_scale(k);
        reports.push_back(run_eval(arm));
    }
    return reports;
}

std::vector<EvalReport> ablate_prompts(const RunConfig& config) {
    std::vector<EvalReport> reports;
    for (int idx = 0; idx < 3; ++idx) {
        RunConfig arm = config;
        arm.system_prompt = idx;
        arm.arm = "prompt-" + std::to_string(idx);
        reports.push_back(run_eval(arm));
    }
    return reports;
}

std::vector<EvalReport> ablate_loop_mode(const RunConfig& config) {
    std::vector<EvalReport> reports;
    RunConfig arm = config;
    arm.loop_mode = LoopMode::Open;
    arm.arm = "open-loop";
    reports.push_back(run_eval(arm));
    arm.loop_mode = LoopMode::Closed;
    arm.arm = "closed-loop";
    reports.push_back(run_eval(arm));
    return reports;
}

std::string csv_text(std::span<const EvalReport> reports) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& report : reports) {
        std::vector<const EpisodeRecord*> rows;
        for (const auto& r : report.episodes) rows.push_back(&r);
        std::stable_sort(rows.begin(), rows.end(),
                         [](const EpisodeRecord* a, const EpisodeRecord* b) { return a->seed < b->seed; });
        for (const auto* r : rows) {
            char latency[32];
            std::snprintf(latency, sizeof latency, "%.3f", r->latency_ms);
            out += sim::to_string(report.config.task);
            out += ',';
            out += llm::to_string(report.config.provider);
            out += ',' + report.config.arm + ',' + std::to_string(r->seed) + ',' + (r->success ? "1" : "0") + ',' +
                   (r->parse_error ? "1" : "0") + ',' + std::to_string(r->n_actions) + ',' + latency + '\n';
        }
    }
    return out;
}

void emit_csv(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot open '" + path.string() + "' for writing");
    out << csv_text(reports);
    out.flush();
    if (!out) throw PersistenceError("write to '" + path.string() + "' failed");
}

}  // namespace actprompt::harness
