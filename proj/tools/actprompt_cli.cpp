#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "actprompt/core/episode_io.hpp"
#include "actprompt/harness/harness.hpp"

namespace ap = actprompt;
namespace h = actprompt::harness;

namespace {

// Flat option set shared by every subcommand. Each long flag name doubles as
// a key in the --config file.
struct Options {
    std::string task = "stack-cube";
    int n_demos = 10;
    int n_eval = 25;
    double delta = 0.01;
    std::vector<double> bounds = {-0.5, 0.5, -0.5, 0.5, 0.0, 0.5};
    std::string provider = "mock-nearest";
    std::string endpoint;
    std::string model = "gpt-4-turbo";
    std::string credential_env = "OPENAI_API_KEY";
    int max_tokens = 1024;
    double temperature = 0.0;
    int max_attempts = 3;
    double timeout_s = 60.0;
    double rate = 1.0;
    int system_prompt = 0;
    std::string keyframe_mode = "keyframes";
    std::size_t interval = 10;
    std::string loop_mode = "open";
    std::optional<double> noise_k;
    double sigma_t = ap::sim::kBaseSigmaTranslation;
    double sigma_r = ap::sim::kBaseSigmaRotation;
    std::uint64_t seed = 0;
    bool match_demo_seeds = false;
    int match_modulus = 0;
    int workers = 1;
    std::string arm = "eval";
    std::string log_level = "info";
};

void add_run_options(CLI::App& app, Options& o) {
    app.add_option("--task", o.task, "stack-cube | destack-cube | push-button | push-multiple-buttons | slide-block")
        ->capture_default_str();
    app.add_option("--n-demos", o.n_demos, "demonstrations per prompt")->capture_default_str();
    app.add_option("--n-eval", o.n_eval, "evaluation episodes")->capture_default_str();
    app.add_option("--delta", o.delta, "keyframe velocity threshold")->capture_default_str();
    app.add_option("--bounds", o.bounds, "workspace: xmin xmax ymin ymax zmin zmax (m)")
        ->expected(6)
        ->capture_default_str();
    app.add_option("--provider", o.provider, "remote | mock-nearest | mock-compositional")->capture_default_str();
    app.add_option("--endpoint", o.endpoint, "chat-completions base URL (remote)");
    app.add_option("--model", o.model)->capture_default_str();
    app.add_option("--credential-env", o.credential_env, "environment variable holding the API key")
        ->capture_default_str();
    app.add_option("--max-tokens", o.max_tokens)->capture_default_str();
    app.add_option("--temperature", o.temperature)->capture_default_str();
    app.add_option("--max-attempts", o.max_attempts, "remote attempts per request")->capture_default_str();
    app.add_option("--timeout-s", o.timeout_s, "remote request timeout")->capture_default_str();
    app.add_option("--rate", o.rate, "remote requests per second")->capture_default_str();
    app.add_option("--system-prompt", o.system_prompt, "system prompt index 0..2")->capture_default_str();
    app.add_option("--keyframe-mode", o.keyframe_mode, "keyframes | uniform")->capture_default_str();
    app.add_option("--interval", o.interval, "uniform sampling interval")->capture_default_str();
    app.add_option("--loop-mode", o.loop_mode, "open | closed")->capture_default_str();
    app.add_option("--noise-k", o.noise_k, "pose noise scale (off when absent)");
    app.add_option("--sigma-t", o.sigma_t, "base translation noise std (m)")->capture_default_str();
    app.add_option("--sigma-r", o.sigma_r, "base rotation noise std (rad)")->capture_default_str();
    app.add_option("--seed", o.seed)->capture_default_str();
    app.add_flag("--match-demo-seeds", o.match_demo_seeds, "test worlds replicate demo worlds");
    app.add_option("--match-modulus", o.match_modulus)->capture_default_str();
    app.add_option("--workers", o.workers, "parallel episodes")->capture_default_str();
    app.add_option("--arm", o.arm, "arm label written to the CSV")->capture_default_str();
    app.add_option("--log-level", o.log_level, "trace | debug | info | warn | error | off")->capture_default_str();
}

h::RunConfig to_config(const Options& o) {
    h::RunConfig c;
    c.task = ap::sim::task_from_string(o.task);
    c.n_demos = o.n_demos;
    c.n_eval = o.n_eval;
    c.delta = o.delta;
    c.bounds = ap::WorkspaceBounds({o.bounds[0], o.bounds[1]}, {o.bounds[2], o.bounds[3]}, {o.bounds[4], o.bounds[5]});
    c.provider = ap::llm::provider_from_string(o.provider);
    c.endpoint = o.endpoint;
    c.model = o.model;
    c.credential_env = o.credential_env;
    c.max_tokens = o.max_tokens;
    c.temperature = o.temperature;
    c.remote.max_attempts = o.max_attempts;
    c.remote.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
    c.remote.requests_per_second = o.rate;
    c.system_prompt = o.system_prompt;
    if (o.keyframe_mode == "keyframes") {
        c.keyframe_mode = h::KeyframeMode::Keyframes;
    } else if (o.keyframe_mode == "uniform") {
        c.keyframe_mode = h::KeyframeMode::Uniform;
    } else {
        throw h::ConfigError("unknown keyframe mode '" + o.keyframe_mode + "'");
    }
    c.interval = o.interval;
    if (o.loop_mode == "open") {
        c.loop_mode = h::LoopMode::Open;
    } else if (o.loop_mode == "closed") {
        c.loop_mode = h::LoopMode::Closed;
    } else {
        throw h::ConfigError("unknown loop mode '" + o.loop_mode + "'");
    }
    if (o.noise_k) c.noise = h::NoiseConfig{*o.noise_k, o.sigma_t, o.sigma_r};
    c.seed = o.seed;
    c.match_demo_seeds = o.match_demo_seeds;
    c.match_modulus = o.match_modulus;
    c.workers = o.workers;
    c.arm = o.arm;
    c.validate();
    return c;
}

void write_reports(const std::vector<h::EvalReport>& reports, const std::string& csv_path) {
    if (csv_path.empty() || csv_path == "-") {
        std::cout << h::csv_text(reports);
    } else {
        h::emit_csv(reports, csv_path);
    }
    for (const auto& r : reports) {
        std::fprintf(stderr, "%-14s %zu/%zu  success rate %.3f\n", r.config.arm.c_str(), r.successes(),
                     r.episodes.size(), r.success_rate());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ICL robot-action toolkit: demos, prompts, evaluation and ablations"};
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    add_run_options(app, o);

    std::string out_path;
    auto* gen = app.add_subcommand("generate-demos", "run the scripted expert and write demos as JSON lines");
    gen->add_option("--out", out_path, "output file")->required();

    std::size_t episode_index = 0;
    auto* build = app.add_subcommand("build-prompt", "print the prompt for one evaluation episode");
    build->add_option("--episode", episode_index, "evaluation episode index")->capture_default_str();

    std::string csv_path;
    auto* eval = app.add_subcommand("eval", "run an evaluation and write the CSV report");
    eval->add_option("--csv", csv_path, "CSV output (stdout when absent)");

    std::string kind;
    std::vector<std::size_t> intervals = h::kDefaultIntervals;
    std::vector<int> shots = h::kDefaultShots;
    std::vector<double> ks = h::kDefaultNoiseScales;
    auto* ablate = app.add_subcommand("ablate", "run one ablation sweep");
    ablate->add_option("kind", kind, "sampling | shots | noise | prompts | loop")
        ->required()
        ->check(CLI::IsMember({"sampling", "shots", "noise", "prompts", "loop"}));
    ablate->add_option("--intervals", intervals)->capture_default_str();
    ablate->add_option("--shots", shots)->capture_default_str();
    ablate->add_option("--ks", ks)->capture_default_str();
    ablate->add_option("--csv", csv_path, "CSV output (stdout when absent)");

    CLI11_PARSE(app, argc, argv);

    try {
        spdlog::set_default_logger(spdlog::default_logger()->clone("actprompt"));
        spdlog::set_level(spdlog::level::from_str(o.log_level));
        // Logs go to stderr so the CSV can be piped from stdout.
        spdlog::default_logger()->sinks().clear();
        spdlog::default_logger()->sinks().push_back(std::make_shared<spdlog::sinks::stderr_color_sink_mt>());

        const h::RunConfig config = to_config(o);

        if (*gen) {
            std::vector<ap::Episode> episodes;
            for (auto& d : h::build_demo_pool(config)) episodes.push_back(std::move(d.rollout.episode));
            ap::save_episodes(episodes, out_path);
            std::fprintf(stderr, "wrote %zu episodes to %s\n", episodes.size(), out_path.c_str());
        } else if (*build) {
            const auto pool = h::build_demo_pool(config);
            const auto demos = h::build_examples(config, pool);
            const auto episodes = h::build_eval_episodes(config);
            if (episode_index >= episodes.size()) throw h::ConfigError("--episode must be below --n-eval");
            const auto prepared = h::prepare_query(config, demos, episodes[episode_index]);
            std::cout << "[system]\n" << prepared.prompt.system << "\n\n[body]\n" << prepared.prompt.body << '\n';
        } else if (*eval) {
            write_reports({h::run_eval(config)}, csv_path);
        } else if (*ablate) {
            std::vector<h::EvalReport> reports;
            if (kind == "sampling") reports = h::ablate_sampling(config, intervals);
            if (kind == "shots") reports = h::ablate_shots(config, shots);
            if (kind == "noise") reports = h::ablate_noise(config, ks);
            if (kind == "prompts") reports = h::ablate_prompts(config);
            if (kind == "loop") reports = h::ablate_loop_mode(config);
            write_reports(reports, csv_path);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
