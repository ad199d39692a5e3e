// Compares the serial reference runner against the OpenMP runner on a
// synthetic Monte Carlo workload and verifies they produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "madlab/config_io.hpp"
#include "madlab/experiment.hpp"

using namespace madlab;

namespace {

ExperimentSpec workload(int n_agents, int n_rounds, int trials) {
    ExperimentSpec spec;
    spec.config.n_agents = n_agents;
    spec.config.n_rounds = n_rounds;
    spec.config.seed = 20250808;
    SyntheticSpec synth;
    synth.answer_space = {"A", "B", "C", "D"};
    synth.p_in = {0.4, 0.3, 0.2, 0.1};
    synth.beta = 1.5;
    spec.config.backends = {BackendSpec{synth}};
    spec.trials = trials;
    Task task;
    task.id = "bench";
    task.question = "benchmark task";
    task.ground_truth = NormalizedAnswer("A");
    task.kind = TaskKind::FreeText;
    spec.tasks = {task};
    return spec;
}

double run_timed(const ExperimentSpec& spec, Execution exec, std::vector<RunResult>& out) {
    const auto start = std::chrono::steady_clock::now();
    out = run_experiment(spec, exec);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    int trials = 20000;
    int n_agents = 4;
    int n_rounds = 2;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const int value = std::atoi(argv[i + 1]);
        if (flag == "--trials") trials = value;
        else if (flag == "--agents") n_agents = value;
        else if (flag == "--rounds") n_rounds = value;
        else {
            std::fprintf(stderr, "usage: bench_debate [--trials N] [--agents N] [--rounds N]\n");
            return 1;
        }
    }

    const ExperimentSpec spec = workload(n_agents, n_rounds, trials);
    std::printf("workload: N=%d R=%d trials=%d, threads=%d\n", n_agents, n_rounds, trials,
                omp_get_max_threads());

    std::vector<RunResult> serial_results;
    std::vector<RunResult> parallel_results;
    const double warm = run_timed(spec, Execution::Parallel, parallel_results);
    (void)warm;
    const double t_serial = run_timed(spec, Execution::Serial, serial_results);
    const double t_parallel = run_timed(spec, Execution::Parallel, parallel_results);

    std::printf("%-10s %10s %16s\n", "runner", "time (s)", "debates/s");
    std::printf("%-10s %10.3f %16.0f\n", "serial", t_serial, trials / t_serial);
    std::printf("%-10s %10.3f %16.0f\n", "openmp", t_parallel, trials / t_parallel);
    std::printf("speedup: %.2fx\n", t_serial / t_parallel);

    if (serial_results.size() != parallel_results.size()) {
        std::fprintf(stderr, "FAIL: result count differs\n");
        return 1;
    }
    for (std::size_t i = 0; i < serial_results.size(); ++i) {
        if (!(serial_results[i] == parallel_results[i])) {
            std::fprintf(stderr, "FAIL: result %zu differs between runners\n", i);
            return 1;
        }
    }
    std::printf("runners agree on all %zu results\n", serial_results.size());
    return 0;
}
