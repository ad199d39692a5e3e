#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "madlab/config_io.hpp"
#include "madlab/errors.hpp"
#include "madlab/experiment.hpp"

using namespace madlab;
using testutil::Grid;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("madlab_test_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Task task_of(const char* id, const char* truth) {
    Task t;
    t.id = id;
    t.question = "q";
    t.ground_truth = NormalizedAnswer(truth);
    t.kind = TaskKind::FreeText;
    return t;
}

// The minority-correct scenario as a scripted 4-agent debate.
ExperimentSpec minority_scenario_spec() {
    ExperimentSpec spec;
    spec.config.n_agents = 4;
    spec.config.n_rounds = 1;
    spec.config.seed = 9;
    const char* round1[] = {"C", "A", "A", "A"};
    for (const char* second : round1) {
        ScriptedSpec script;
        ScriptStepSpec first;
        first.answer = NormalizedAnswer("C");
        ScriptStepSpec then;
        then.answer = NormalizedAnswer(second);
        script.steps = {first, then};
        spec.config.backends.push_back(BackendSpec{script});
    }
    spec.tasks = {task_of("fig2", "C")};
    return spec;
}

ExperimentSpec synthetic_spec(int n_agents, int n_rounds, double beta, int trials,
                              std::uint64_t seed) {
    ExperimentSpec spec;
    spec.config.n_agents = n_agents;
    spec.config.n_rounds = n_rounds;
    spec.config.seed = seed;
    SyntheticSpec synth;
    synth.answer_space = {"A", "B", "C", "D"};
    synth.p_in = {0.4, 0.2, 0.2, 0.2};
    synth.beta = beta;
    spec.config.backends = {BackendSpec{synth}};
    spec.trials = trials;
    spec.tasks = {task_of("sim", "A")};
    return spec;
}

}  // namespace

TEST_CASE("accuracy is the mean of the correctness flags") {
    std::vector<RunResult> results(4);
    for (std::size_t i = 0; i < results.size(); ++i) {
        results[i].task_id = "t";
        results[i].trial = static_cast<int>(i);
        results[i].correct[Mechanism::Score] = i < 3;
    }
    CHECK(accuracy(results, Mechanism::Score) == 0.75);

    for (auto& r : results) r.correct[Mechanism::Score] = true;
    CHECK(accuracy(results, Mechanism::Score) == 1.0);

    CHECK_THROWS_AS(accuracy({}, Mechanism::Score), EmptyResultSet);

    // order invariance
    std::swap(results[0], results[3]);
    CHECK(accuracy(results, Mechanism::Score) == 1.0);
}

TEST_CASE("token_cost is the exact double sum") {
    SUBCASE("crafted 2x2 grid") {
        const Grid grid = {{{"A"}, {"A"}}, {{"B"}, {"B"}}};
        const std::vector<std::vector<std::size_t>> tokens = {{3, 5}, {4, 6}};
        const Transcript t = testutil::transcript_from_grid(grid, &tokens);
        CHECK(token_cost(t) == 18);
    }

    SUBCASE("all zero") {
        const Grid grid = {{std::nullopt}, {std::nullopt}};
        const Transcript t = testutil::transcript_from_grid(grid);
        CHECK(token_cost(t) == 0);
    }

    SUBCASE("single cell") {
        const Grid grid = {{{"A"}}};
        const std::vector<std::vector<std::size_t>> tokens = {{7}};
        const Transcript t = testutil::transcript_from_grid(grid, &tokens);
        CHECK(token_cost(t) == 7);
    }

    SUBCASE("random transcripts against a brute-force sum") {
        SplitMix64 rng(31);
        for (int iter = 0; iter < 100; ++iter) {
            const Grid grid = testutil::random_grid(rng);
            std::vector<std::vector<std::size_t>> tokens(grid.size());
            std::size_t expected = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (std::size_t k = 0; k < grid[i].size(); ++k) {
                    const std::size_t c = rng.below(500);
                    tokens[i].push_back(c);
                    expected += c;
                }
            }
            const Transcript t = testutil::transcript_from_grid(grid, &tokens);
            CHECK(token_cost(t) == expected);
        }
    }
}

TEST_CASE("the minority-correct scenario separates the mechanisms") {
    ExperimentSpec spec = minority_scenario_spec();
    const auto results = run_experiment(spec, Execution::Serial);
    REQUIRE(results.size() == 1);
    CHECK(accuracy(results, Mechanism::Score) == 1.0);
    CHECK(accuracy(results, Mechanism::MajorityFinalRound) == 0.0);

    const auto& d = results[0].decisions.at(Mechanism::Score);
    REQUIRE(d.has_value());
    CHECK(d->scores.at(NormalizedAnswer("C")) == 52.5);
    CHECK(d->scores.at(NormalizedAnswer("A")) == 45.0);
}

TEST_CASE("mechanisms are evaluated on the same transcript") {
    ExperimentSpec both = minority_scenario_spec();
    ExperimentSpec score_only = minority_scenario_spec();
    score_only.mechanisms = {Mechanism::Score};

    const auto r_both = run_experiment(both, Execution::Serial);
    const auto r_single = run_experiment(score_only, Execution::Serial);
    REQUIRE(r_both.size() == 1);
    REQUIRE(r_single.size() == 1);
    // adding a mechanism never changes another mechanism's decision
    CHECK(r_both[0].decisions.at(Mechanism::Score) ==
          r_single[0].decisions.at(Mechanism::Score));
    CHECK(r_both[0].answers == r_single[0].answers);
}

TEST_CASE("parallel and serial execution give identical results") {
    ExperimentSpec spec = synthetic_spec(4, 2, 1.5, 40, 123);
    spec.tasks.push_back(task_of("sim2", "B"));
    const auto serial = run_experiment(spec, Execution::Serial);
    const auto parallel = run_experiment(spec, Execution::Parallel);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("attack fraction samples exactly floor(f*N) agents per trial") {
    ExperimentSpec spec = synthetic_spec(4, 1, 1.0, 25, 7);
    spec.attack_fraction = 0.5;
    const auto results = run_experiment(spec, Execution::Serial);
    REQUIRE(results.size() == 25);
    bool varied = false;
    for (const auto& r : results) {
        CHECK(r.attacked.size() == 2);
        for (const int a : r.attacked) {
            CHECK(a >= 1);
            CHECK(a <= 4);
        }
        if (r.attacked != results[0].attacked) varied = true;
    }
    CHECK(varied);  // resampled per trial
}

TEST_CASE("sample_attacked is uniform-ish and seeded") {
    CHECK(sample_attacked(4, 0.5, 1) == sample_attacked(4, 0.5, 1));
    CHECK(sample_attacked(4, 0.0, 1).empty());
    CHECK(sample_attacked(4, 1.0, 1).size() == 4);

    std::map<int, int> membership;
    for (std::uint64_t s = 0; s < 4000; ++s)
        for (const int a : sample_attacked(4, 0.5, s)) membership[a]++;
    for (const auto& [agent, count] : membership)
        CHECK(std::abs(count - 2000) < 200);  // each agent in about half the draws
}

TEST_CASE("consensus rate counts unanimous non-None columns") {
    std::vector<RunResult> results(3);
    const char* grids[3][3] = {{"A", "A", "A"}, {"A", "A", "B"}, {"B", "B", "B"}};
    for (int g = 0; g < 3; ++g) {
        results[g].answers.resize(3);
        for (int i = 0; i < 3; ++i)
            results[g].answers[i] = {NormalizedAnswer(grids[g][i])};
    }
    CHECK(consensus_rate(results, 0) == doctest::Approx(2.0 / 3.0));

    // None cells don't break consensus, but all-None is no consensus
    results[1].answers[2][0] = NormalizedAnswer::none();
    CHECK(consensus_rate(results, 0) == doctest::Approx(1.0));
    for (auto& row : results[2].answers) row[0] = NormalizedAnswer::none();
    CHECK(consensus_rate(results, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("positive beta reaches consensus more often than negative beta") {
    const int trials = 600;
    auto run = [&](double beta) {
        const ExperimentSpec spec = synthetic_spec(4, 3, beta, trials, 2025);
        return consensus_rate(run_experiment(spec), 3);
    };
    const double high = run(2.0);
    const double low = run(-2.0);
    CHECK(high > low + 0.05);
}

TEST_CASE("report round-trips and degrades gracefully when empty") {
    const fs::path dir = temp_dir("report");

    SUBCASE("empty results still write valid files") {
        ExperimentSpec spec = synthetic_spec(2, 1, 0.0, 1, 1);
        spec.tasks.clear();
        const std::vector<RunResult> none;
        write_report(spec, none, dir);
        CHECK(fs::exists(dir / "results.json"));
        std::ifstream csv(dir / "summary.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header ==
              "mechanism,accuracy,mean_token_cost,n_agents,n_rounds,mode,attack_fraction,tie_rate");
        std::string rest;
        CHECK_FALSE(std::getline(csv, rest));  // zero data rows
        CHECK(load_results(dir / "results.json").empty());
    }

    SUBCASE("written results reload equal") {
        ExperimentSpec spec = minority_scenario_spec();
        const auto results = run_experiment(spec, Execution::Serial);
        write_report(spec, results, dir);
        const auto reloaded = load_results(dir / "results.json");
        REQUIRE(reloaded.size() == results.size());
        for (std::size_t i = 0; i < results.size(); ++i) CHECK(reloaded[i] == results[i]);

        // one CSV row per mechanism
        std::ifstream csv(dir / "summary.csv");
        std::string line;
        int rows = -1;  // discount header
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 2);
    }
}

TEST_CASE("experiment validation catches bad specs") {
    ExperimentSpec spec = synthetic_spec(2, 1, 0.0, 1, 1);
    spec.trials = 0;
    CHECK_THROWS_AS(run_experiment(spec), ConfigError);

    ExperimentSpec bad_fraction = synthetic_spec(2, 1, 0.0, 1, 1);
    bad_fraction.attack_fraction = 1.5;
    CHECK_THROWS_AS(run_experiment(bad_fraction), ConfigError);
}

TEST_CASE("all-None debates count as incorrect, never abort") {
    ExperimentSpec spec;
    spec.config.n_agents = 1;
    spec.config.n_rounds = 0;
    ScriptedSpec script;
    ScriptStepSpec none_step;  // Fixed None
    script.steps = {none_step};
    spec.config.backends = {BackendSpec{script}};
    Task hopeless = task_of("hopeless", "1");
    hopeless.kind = TaskKind::Numeric;  // "I cannot decide." has no number
    hopeless.ground_truth = NormalizedAnswer("1");
    spec.tasks = {hopeless};

    const auto results = run_experiment(spec, Execution::Serial);
    REQUIRE(results.size() == 1);
    CHECK_FALSE(results[0].decisions.at(Mechanism::Score).has_value());
    CHECK_FALSE(results[0].correct.at(Mechanism::Score));
    CHECK(accuracy(results, Mechanism::Score) == 0.0);
}

TEST_CASE("transcripts can be persisted during runs") {
    const fs::path dir = temp_dir("transcripts");
    ExperimentSpec spec = minority_scenario_spec();
    spec.transcript_dir = dir.string();
    run_experiment(spec, Execution::Serial);

    Task task;
    const Transcript t = read_transcript(dir / "fig2_t0.json", &task);
    CHECK(t.n_agents() == 4);
    CHECK(t.n_rounds() == 1);
    CHECK(task.ground_truth == NormalizedAnswer("C"));
    CHECK(t.cell(1, 1).answer == NormalizedAnswer("C"));
}
