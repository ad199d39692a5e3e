#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "madlab/config_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kCli = MADLAB_CLI_PATH;

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "madlab_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(kCli) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// scripted two-agent config that always answers A / B
std::string scripted_config() {
    return R"({
        "n_agents": 2,
        "n_rounds": 1,
        "seed": 5,
        "backends": [
            {"kind": "scripted", "steps": [{"answer": "A"}, {"answer": "A"}]},
            {"kind": "scripted", "steps": [{"answer": "A"}, {"answer": "B"}]}
        ]
    })";
}

std::string small_corpus() {
    return R"({"id":"q1","question":"first?","answer":"A","kind":"multiple_choice"})"
           "\n"
           R"({"id":"q2","question":"second?","answer":"B","kind":"multiple_choice"})"
           "\n";
}

}  // namespace

TEST_CASE("run command writes reports on scripted fixtures") {
    const fs::path dir = work_dir();
    write_file(dir / "config.json", scripted_config());
    write_file(dir / "corpus.jsonl", small_corpus());

    const int code = run_cli("run --config " + (dir / "config.json").string() + " --corpus " +
                                 (dir / "corpus.jsonl").string() + " --out " +
                                 (dir / "out").string(),
                             dir / "run.log");
    CHECK(code == 0);
    CHECK(fs::exists(dir / "out" / "summary.csv"));
    CHECK(fs::exists(dir / "out" / "results.json"));
    const std::string log = slurp(dir / "run.log");
    CHECK(log.find("score") != std::string::npos);
    CHECK(log.find("accuracy") != std::string::npos);
}

TEST_CASE("missing corpus exits 2 with a diagnostic") {
    const fs::path dir = work_dir();
    write_file(dir / "config.json", scripted_config());
    const int code = run_cli("run --config " + (dir / "config.json").string() +
                                 " --corpus " + (dir / "nope.jsonl").string() + " --out " +
                                 (dir / "out").string(),
                             dir / "run.log");
    CHECK(code == 2);
    CHECK(slurp(dir / "run.log").find("not readable") != std::string::npos);
}

TEST_CASE("overrides are honored and recorded in results metadata") {
    const fs::path dir = work_dir();
    write_file(dir / "config.json", scripted_config());
    write_file(dir / "corpus.jsonl", small_corpus());

    const int code = run_cli("run --config " + (dir / "config.json").string() + " --corpus " +
                                 (dir / "corpus.jsonl").string() + " --out " +
                                 (dir / "out").string() + " --override n_rounds=0",
                             dir / "run.log");
    CHECK(code == 0);
    const json results = json::parse(slurp(dir / "out" / "results.json"));
    CHECK(results["spec"]["n_rounds"] == 0);
    // one answer column per agent now
    CHECK(results["results"][0]["answers"][0].size() == 1);
}

TEST_CASE("unknown override keys exit 1") {
    const fs::path dir = work_dir();
    write_file(dir / "config.json", scripted_config());
    write_file(dir / "corpus.jsonl", small_corpus());
    const int code = run_cli("run --config " + (dir / "config.json").string() + " --corpus " +
                                 (dir / "corpus.jsonl").string() + " --override bogus=1",
                             dir / "run.log");
    CHECK(code == 1);
}

TEST_CASE("unknown flags fail fast") {
    const fs::path dir = work_dir();
    const int code = run_cli("run --config x --corpus y --frobnicate", dir / "run.log");
    CHECK(code == 1);
}

TEST_CASE("help lists every subcommand") {
    const fs::path dir = work_dir();
    const int code = run_cli("--help", dir / "help.log");
    CHECK(code == 0);
    const std::string help = slurp(dir / "help.log");
    for (const char* cmd : {"run", "simulate", "attack", "decide", "report"})
        CHECK(help.find(cmd) != std::string::npos);
}

TEST_CASE("per-command help documents all flags") {
    const fs::path dir = work_dir();
    CHECK(run_cli("run --help", dir / "h.log") == 0);
    const std::string run_help = slurp(dir / "h.log");
    for (const char* flag :
         {"--config", "--corpus", "--out", "--override", "--seed", "--mechanisms",
          "--save-transcripts"})
        CHECK(run_help.find(flag) != std::string::npos);

    CHECK(run_cli("decide --help", dir / "h2.log") == 0);
    CHECK(slurp(dir / "h2.log").find("--transcript") != std::string::npos);

    CHECK(run_cli("attack --help", dir / "h3.log") == 0);
    CHECK(slurp(dir / "h3.log").find("--attack-fraction") != std::string::npos);
}

TEST_CASE("simulate sweeps betas and is seed-reproducible") {
    const fs::path dir = work_dir();
    write_file(dir / "sim.json", R"({
        "n_agents": 3,
        "n_rounds": 2,
        "seed": 11,
        "trials": 50,
        "betas": [-2.0, 0.0, 2.0],
        "true_answer": "A",
        "backend": {"kind": "synthetic", "answer_space": ["A","B","C"],
                     "p_in": [0.34, 0.33, 0.33]}
    })");

    const int code = run_cli("simulate --config " + (dir / "sim.json").string() + " --out " +
                                 (dir / "out1").string(),
                             dir / "sim.log");
    CHECK(code == 0);

    const std::string summary = slurp(dir / "out1" / "simulate_summary.csv");
    // header + one row per beta (score mechanism only by default)
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
    CHECK(fs::exists(dir / "out1" / "consensus.csv"));

    const int code2 = run_cli("simulate --config " + (dir / "sim.json").string() + " --out " +
                                  (dir / "out2").string(),
                              dir / "sim2.log");
    CHECK(code2 == 0);
    CHECK(slurp(dir / "out1" / "simulate_summary.csv") ==
          slurp(dir / "out2" / "simulate_summary.csv"));
    CHECK(slurp(dir / "out1" / "consensus.csv") == slurp(dir / "out2" / "consensus.csv"));
}

TEST_CASE("simulate rejects trials=0") {
    const fs::path dir = work_dir();
    write_file(dir / "sim.json", R"({
        "n_agents": 2, "trials": 0,
        "backend": {"kind": "synthetic", "answer_space": ["A","B"], "p_in": [0.5, 0.5]}
    })");
    const int code = run_cli("simulate --config " + (dir / "sim.json").string() + " --out " +
                                 (dir / "out").string(),
                             dir / "sim.log");
    CHECK(code == 1);
    CHECK(slurp(dir / "sim.log").find("trials must be >= 1") != std::string::npos);
}

TEST_CASE("decide prints the score table for a recorded transcript") {
    using namespace madlab;
    const fs::path dir = work_dir();

    Transcript t(4, 1);
    const char* round0[] = {"C", "C", "C", "C"};
    const char* round1[] = {"C", "A", "A", "A"};
    for (int i = 1; i <= 4; ++i) {
        for (int k = 0; k <= 1; ++k) {
            Response r;
            r.agent_index = i;
            r.round = k;
            const char* a = k == 0 ? round0[i - 1] : round1[i - 1];
            r.raw_text = std::string("My answer is \\boxed{") + a + "}.";
            r.answer = NormalizedAnswer(a);
            r.token_count = 3;
            t.set(r);
        }
    }
    Task task;
    task.id = "fig";
    task.question = "?";
    task.ground_truth = NormalizedAnswer("C");
    task.kind = TaskKind::MultipleChoice;
    write_transcript(t, task, dir / "transcript.json");

    const int code =
        run_cli("decide --transcript " + (dir / "transcript.json").string(), dir / "decide.log");
    CHECK(code == 0);
    const json out = json::parse(slurp(dir / "decide.log"));
    CHECK(out["score"]["final_answer"] == "C");
    CHECK(out["score"]["scores"]["C"] == 52.5);
    CHECK(out["score"]["scores"]["A"] == 45.0);
    CHECK(out["majority_final_round"]["final_answer"] == "A");
}

TEST_CASE("decide handles single-cell transcripts") {
    using namespace madlab;
    const fs::path dir = work_dir();
    Transcript t(1, 0);
    Response r;
    r.agent_index = 1;
    r.round = 0;
    r.raw_text = "My answer is \\boxed{7}.";
    r.answer = NormalizedAnswer("7");
    r.token_count = 4;
    t.set(r);
    Task task;
    task.id = "single";
    task.kind = TaskKind::Numeric;
    task.ground_truth = NormalizedAnswer("7");
    write_transcript(t, task, dir / "single.json");

    const int code = run_cli("decide --transcript " + (dir / "single.json").string(),
                             dir / "decide.log");
    CHECK(code == 0);
    const json out = json::parse(slurp(dir / "decide.log"));
    CHECK(out["score"]["final_answer"] == "7");
    CHECK(out["majority_final_round"]["final_answer"] == "7");
}

TEST_CASE("decide reports undecidable transcripts without failing") {
    using namespace madlab;
    const fs::path dir = work_dir();
    Transcript t(1, 0);
    Response r;
    r.agent_index = 1;
    r.round = 0;
    t.set(r);
    Task task;
    task.id = "none";
    task.kind = TaskKind::Numeric;
    task.ground_truth = NormalizedAnswer("1");
    write_transcript(t, task, dir / "none.json");

    const int code = run_cli("decide --transcript " + (dir / "none.json").string(),
                             dir / "decide.log");
    CHECK(code == 0);
    CHECK(slurp(dir / "decide.log").find("no decidable answer") != std::string::npos);
}

TEST_CASE("decide exits 2 on malformed transcripts") {
    const fs::path dir = work_dir();
    write_file(dir / "broken.json", "{\"n_agents\": 2}");
    const int code =
        run_cli("decide --transcript " + (dir / "broken.json").string(), dir / "decide.log");
    CHECK(code == 2);
}

TEST_CASE("report regenerates the summary from results.json") {
    const fs::path dir = work_dir();
    write_file(dir / "config.json", scripted_config());
    write_file(dir / "corpus.jsonl", small_corpus());
    REQUIRE(run_cli("run --config " + (dir / "config.json").string() + " --corpus " +
                        (dir / "corpus.jsonl").string() + " --out " + (dir / "out").string(),
                    dir / "run.log") == 0);

    const int code = run_cli("report --results " + (dir / "out" / "results.json").string() +
                                 " --out " + (dir / "rep").string(),
                             dir / "report.log");
    CHECK(code == 0);
    CHECK(slurp(dir / "rep" / "summary.csv") == slurp(dir / "out" / "summary.csv"));
}

TEST_CASE("attack command emits the comparison table") {
    const fs::path dir = work_dir();
    write_file(dir / "config.json", R"({
        "n_agents": 4,
        "n_rounds": 1,
        "seed": 3,
        "trials": 20,
        "backend": {"kind": "synthetic", "answer_space": ["A","B"], "p_in": [0.7, 0.3],
                     "beta": 1.5}
    })");
    write_file(dir / "corpus.jsonl",
               R"({"id":"q1","question":"?","answer":"A","kind":"multiple_choice"})" "\n");

    const int code = run_cli("attack --config " + (dir / "config.json").string() + " --corpus " +
                                 (dir / "corpus.jsonl").string() + " --out " +
                                 (dir / "out").string() + " --attack-fraction 0.5",
                             dir / "attack.log");
    CHECK(code == 0);
    CHECK(fs::exists(dir / "out" / "attack_summary.csv"));
    CHECK(fs::exists(dir / "out" / "clean" / "results.json"));
    CHECK(fs::exists(dir / "out" / "attacked" / "results.json"));
    const std::string csv = slurp(dir / "out" / "attack_summary.csv");
    CHECK(csv.find("mechanism,clean_accuracy,attacked_accuracy,drop") == 0);
}
