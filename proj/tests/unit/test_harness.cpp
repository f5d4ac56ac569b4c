#include <doctest.h>

#include <cstdlib>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "actprompt/harness/harness.hpp"
#include "actprompt/promptgen/response_parser.hpp"
#include "fixtures.hpp"

using namespace actprompt;
using namespace actprompt::harness;

namespace {

class GarbageProvider final : public llm::CompletionProvider {
public:
    llm::Provider kind() const override { return llm::Provider::MockNearest; }
    llm::CompletionResult complete(const llm::CompletionQuery&) override {
        ++calls;
        return {"I am unable to help with robot control.", 1.0, llm::Provider::MockNearest, 1};
    }
    int calls = 0;
};

RunConfig small(sim::TaskId task, int n_demos = 4, int n_eval = 5) {
    RunConfig c;
    c.task = task;
    c.n_demos = n_demos;
    c.n_eval = n_eval;
    c.seed = 42;
    return c;
}

// CSV rows without the arm column, to compare arms that differ only by label.
std::vector<std::string> rows_without_arm(const EvalReport& r) {
    std::vector<std::string> rows;
    const std::string text = csv_text(std::vector{r});
    std::size_t start = text.find('\n') + 1;
    while (start < text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string row = text.substr(start, end - start);
        const auto a = row.find(',', row.find(',') + 1);
        const auto b = row.find(',', a + 1);
        rows.push_back(row.erase(a, b - a));
        start = end + 1;
    }
    return rows;
}

}  // namespace

TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_demos = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.n_eval = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.delta = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.system_prompt = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.provider = llm::Provider::Remote;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.noise = NoiseConfig{-1.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(run_eval(c), ConfigError);
}

TEST_CASE("remote provider credential comes from the named environment variable") {
    RunConfig c;
    c.provider = llm::Provider::Remote;
    c.endpoint = "http://127.0.0.1:9";
    c.credential_env = "ACTPROMPT_TEST_UNSET_KEY";
    ::unsetenv("ACTPROMPT_TEST_UNSET_KEY");
    CHECK_THROWS_AS(make_provider(c), ConfigError);
    ::setenv("ACTPROMPT_TEST_UNSET_KEY", "secret-value", 1);
    CHECK(make_provider(c)->kind() == llm::Provider::Remote);
    ::unsetenv("ACTPROMPT_TEST_UNSET_KEY");
}

TEST_CASE("demo and eval seeds are disjoint by default") {
    for (sim::TaskId id : sim::all_tasks()) {
        const RunConfig c = small(id, 10, 25);
        std::set<std::uint64_t> demo;
        for (const auto& d : build_demo_pool(c)) demo.insert(d.identity.seed);
        for (const auto& e : build_eval_episodes(c)) CHECK(demo.count(e.seed) == 0);
    }
}

TEST_CASE("demo variations are stratified round-robin") {
    const RunConfig c = small(sim::TaskId::PushButton, 8);
    const auto pool = build_demo_pool(c);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        CHECK(pool[i].identity.seed == c.seed + i);
        CHECK(pool[i].identity.variation == pool[i % 4].identity.variation);
    }
    std::set<std::string> colors;
    for (std::size_t i = 0; i < 4; ++i) colors.insert(pool[i].identity.variation.targets[0]);
    CHECK(colors.size() == 4);
}

TEST_CASE("matched seeds with the nearest oracle succeed every time") {
    for (sim::TaskId id : {sim::TaskId::StackCube, sim::TaskId::DestackCube, sim::TaskId::PushButton,
                           sim::TaskId::SlideBlock}) {
        RunConfig c = small(id, 10, 10);
        c.match_demo_seeds = true;
        const auto report = run_eval(c);
        CHECK(report.episodes.size() == 10);
        CHECK(report.success_rate() == 1.0);
    }
}

TEST_CASE("parse failures are scored, never fatal") {
    GarbageProvider garbage;
    const auto report = run_eval(small(sim::TaskId::StackCube, 3, 5), garbage);
    CHECK(garbage.calls == 5);
    REQUIRE(report.episodes.size() == 5);
    CHECK(report.success_rate() == 0.0);
    for (const auto& e : report.episodes) {
        CHECK(e.parse_error);
        CHECK_FALSE(e.success);
        CHECK(e.n_actions == 0);
    }
}

TEST_CASE("report accounting") {
    RunConfig c = small(sim::TaskId::PushButton, 4, 7);
    const auto report = run_eval(c);
    CHECK(report.episodes.size() == 7);
    CHECK(report.success_rate() == doctest::Approx(static_cast<double>(report.successes()) / 7.0));
    CHECK(report.config.n_eval == 7);
    CHECK(report.demo_seeds.size() == 4);
    for (const auto& e : report.episodes) CHECK(e.prompt_chars > 0);
}

TEST_CASE("assembled prompt survives a parse-then-mock round trip") {
    RunConfig c = small(sim::TaskId::StackCube, 6, 4);
    c.match_demo_seeds = true;
    const auto pool = build_demo_pool(c);
    const auto demos = build_examples(c, pool);
    for (const auto& episode : build_eval_episodes(c)) {
        const auto prepared = prepare_query(c, demos, episode);
        const auto parsed = parse_prompt(prepared.prompt.body);
        REQUIRE(parsed.examples.size() == demos.examples.size());

        std::vector<llm::MockDemo> from_text;
        for (const auto& ex : parsed.examples) {
            const auto in = parse_input(ex.input);
            llm::MockDemo d{{}, in.instruction, ex.output};
            for (const auto& [name, pose] : in.observations) {
                const auto b = pose.bins();
                d.observation.insert(d.observation.end(), b.begin(), b.end());
            }
            from_text.push_back(std::move(d));
        }
        const auto test = parse_input(parsed.test_input);
        std::vector<int> test_bins;
        for (const auto& [name, pose] : test.observations) {
            const auto b = pose.bins();
            test_bins.insert(test_bins.end(), b.begin(), b.end());
        }
        CHECK(test_bins == prepared.query.test_observation);
        CHECK(llm::complete_mock_nearest(from_text, test_bins, test.instruction).text ==
              llm::complete_mock_nearest(prepared.query.demos, prepared.query.test_observation,
                                         prepared.query.test_instruction)
                  .text);
    }
}

TEST_CASE("ablate_sampling") {
    RunConfig c = small(sim::TaskId::StackCube, 3, 3);
    const auto reports = ablate_sampling(c);
    REQUIRE(reports.size() == 6);
    CHECK(reports[0].config.arm == "keyframes");
    CHECK(reports[1].config.arm == "uniform-5");
    CHECK(reports[5].config.arm == "uniform-80");

    const auto pool = build_demo_pool(c);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        CHECK(reports[0].demo_keyframes[i] == extract_keyframes(pool[i].rollout.episode, c.delta).indices());
        CHECK(reports[2].demo_keyframes[i] == sample_uniform(pool[i].rollout.episode.length(), 10).indices());
    }
    for (const auto& r : reports) {
        REQUIRE(r.episodes.size() == 3);
        for (std::size_t j = 0; j < 3; ++j) CHECK(r.episodes[j].seed == reports[0].episodes[j].seed);
        CHECK(r.demo_seeds == reports[0].demo_seeds);
    }
    RunConfig u = c;
    u.keyframe_mode = KeyframeMode::Uniform;
    u.interval = 40;
    const auto a = build_eval_episodes(c);
    const auto b = build_eval_episodes(u);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j].reset.world == b[j].reset.world);
}

TEST_CASE("ablate_shots nests pools and never loses a matched demo") {
    RunConfig c = small(sim::TaskId::PushButton, 10, 10);
    c.match_demo_seeds = true;
    const auto reports = ablate_shots(c, {2, 5, 10});
    REQUIRE(reports.size() == 3);
    for (std::size_t a = 0; a + 1 < reports.size(); ++a) {
        const auto& small_pool = reports[a].demo_seeds;
        const auto& big_pool = reports[a + 1].demo_seeds;
        REQUIRE(small_pool.size() < big_pool.size());
        CHECK(std::equal(small_pool.begin(), small_pool.end(), big_pool.begin()));
        CHECK(reports[a].success_rate() <= reports[a + 1].success_rate());
        for (std::size_t j = 0; j < reports[a].episodes.size(); ++j) {
            CHECK(reports[a].episodes[j].seed == reports[a + 1].episodes[j].seed);
        }
    }
    CHECK(reports.back().success_rate() == 1.0);
}

TEST_CASE("ablate_noise") {
    RunConfig c = small(sim::TaskId::PushButton, 4, 4);
    const auto reports = ablate_noise(c);
    REQUIRE(reports.size() == 4);
    CHECK(reports[0].config.arm == "noise-0.5");
    CHECK(reports[1].config.arm == "noise-1");
    CHECK(reports[2].config.arm == "noise-1.5");
    CHECK(reports[3].config.arm == "noise-2");

    const auto zero = ablate_noise(c, {0.0});
    CHECK(rows_without_arm(zero[0]) == rows_without_arm(run_eval(c)));

    RunConfig noisy = c;
    noisy.noise = NoiseConfig{1.0};
    const auto eps = build_eval_episodes(noisy);
    const auto truth0 = eps[0].reset.world.observations();
    const auto a = observe(noisy, truth0, eps[0].seed, 2);
    const auto b = observe(noisy, truth0, eps[1].seed, 2);
    CHECK(a[0].pose().x() - truth0[0].pose().x() != doctest::Approx(b[0].pose().x() - truth0[0].pose().x()));
    CHECK_FALSE(a == truth0);

    // Demo observations in the prompt are noised as well.
    const auto pool = build_demo_pool(noisy);
    const auto clean = build_examples(c, pool);
    const auto dirty = build_examples(noisy, pool);
    CHECK(clean.examples[0].input != dirty.examples[0].input);
}

TEST_CASE("ablate_prompts: mocks ignore the system text") {
    const auto reports = ablate_prompts(small(sim::TaskId::StackCube, 3, 3));
    REQUIRE(reports.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(reports[static_cast<std::size_t>(i)].config.system_prompt == i);
    CHECK(rows_without_arm(reports[0]) == rows_without_arm(reports[1]));
    CHECK(rows_without_arm(reports[0]) == rows_without_arm(reports[2]));
}

TEST_CASE("ablate_loop_mode: closed-loop prompts are longer") {
    RunConfig c = small(sim::TaskId::PushButton, 3, 3);
    c.match_demo_seeds = true;
    const auto reports = ablate_loop_mode(c);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].config.arm == "open-loop");
    CHECK(reports[1].config.arm == "closed-loop");
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(reports[1].episodes[j].seed == reports[0].episodes[j].seed);
        CHECK(reports[1].episodes[j].prompt_chars > reports[0].episodes[j].prompt_chars);
    }
    CHECK(reports[1].success_rate() == 1.0);
}

TEST_CASE("CSV output") {
    CHECK(csv_text(std::vector<EvalReport>{}) == std::string(kCsvHeader) + "\n");
    const auto empty_path = fixtures::temp_path("empty.csv");
    emit_csv(std::vector<EvalReport>{}, empty_path);
    CHECK(fixtures::read_file(empty_path) == std::string(kCsvHeader) + "\n");

    RunConfig c = small(sim::TaskId::StackCube, 3, 6);
    const auto reports = ablate_prompts(c);
    const auto path = fixtures::temp_path("prompts.csv");
    emit_csv(reports, path);
    const std::string first = fixtures::read_file(path);
    CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 3 * 6);

    emit_csv(ablate_prompts(c), path);
    CHECK(fixtures::read_file(path) == first);

    c.workers = 4;
    CHECK(csv_text(ablate_prompts(c)) == first);
    CHECK(first.find("stack-cube,mock-nearest,prompt-0,1000042,") != std::string::npos);
}

TEST_CASE("remote runs abort when the endpoint is unreachable") {
    // Nothing listens on port 1 of the loopback interface.
    const int port = 1;
    RunConfig c = small(sim::TaskId::PushButton, 2, 2);
    c.provider = llm::Provider::Remote;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port);
    c.remote.initial_backoff = std::chrono::milliseconds(5);
    c.remote.requests_per_second = 1000.0;
    llm::RemoteProvider provider(c.endpoint, "k", c.remote);
    CHECK_THROWS_AS(run_eval(c, provider), llm::TransportError);
}

TEST_CASE("remote runs go through the chat-completions stub") {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        const std::string user = body["messages"][1]["content"];
        // Echo the first demo output back, as a model copying its examples would.
        const auto start = user.find(" > ") + 3;
        const auto end = user.find("}, {", start) + 1;
        res.set_content(
            nlohmann::json{{"choices", {{{"message", {{"content", user.substr(start, end - start)}}}}}}}.dump(),
            "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    RunConfig c = small(sim::TaskId::PushButton, 1, 1);
    c.match_demo_seeds = true;
    c.provider = llm::Provider::Remote;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port);
    c.remote.requests_per_second = 1000.0;
    llm::RemoteProvider provider(c.endpoint, "k", c.remote);
    const auto report = run_eval(c, provider);
    server.stop();
    t.join();
    REQUIRE(report.episodes.size() == 1);
    CHECK_FALSE(report.episodes[0].parse_error);
    CHECK(report.episodes[0].success);
    CHECK(csv_text(std::vector{report}).find("push-button,remote,eval,") != std::string::npos);
}
