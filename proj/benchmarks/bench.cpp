// Serial vs OpenMP timing for the parallel kernels: Monte-Carlo bound
// validity, the Lipschitz-lemma harness, and full experiment cells. The
// parallel path must produce the same numbers, so each section also checks
// agreement before reporting the speedup.

#include <chrono>
#include <cstdio>
#include <string>

#include "pacbayes/experiment.hpp"
#include "pacbayes/parallel.hpp"
#include "pacbayes/verify.hpp"

using namespace pacbayes;

namespace {

template <class F>
double time_seconds(F&& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s %9.3fs %9.3fs %7.2fx  %s\n", name, serial, parallel,
              serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", hardware_threads());
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial", "openmp", "speedup");

  {
    const auto scenario = verify::default_finite_class_scenario();
    const RandomSource rng(1);
    verify::ValidityReport serial_report, parallel_report;
    const double serial = time_seconds([&] {
      serial_report = verify::bound_validity_mc(rng, scenario, verify::BoundSelector::TVPB,
                                                20000, 50, 0.05, 1);
    });
    const double parallel = time_seconds([&] {
      parallel_report = verify::bound_validity_mc(rng, scenario, verify::BoundSelector::TVPB,
                                                  20000, 50, 0.05, 0);
    });
    print_row("bound_validity_mc (20k)", serial, parallel,
              serial_report.violations == parallel_report.violations);
  }

  {
    const auto scenario = verify::default_finite_class_scenario();
    const RandomSource rng(2);
    verify::ValidityReport serial_report, parallel_report;
    const double serial = time_seconds([&] {
      serial_report = verify::lemma_lipschitz_validity(rng, scenario, 20000, 50, 0.05, 1);
    });
    const double parallel = time_seconds([&] {
      parallel_report = verify::lemma_lipschitz_validity(rng, scenario, 20000, 50, 0.05, 0);
    });
    print_row("lipschitz lemma (20k)", serial, parallel,
              serial_report.violations == parallel_report.violations);
  }

  {
    ExperimentConfig config;
    config.repetitions = 6;
    config.m_values = {100, 200};
    config.n_test = 5000;
    config.master_seed = 3;
    std::string serial_csv, parallel_csv;
    config.threads = 1;
    const double serial = time_seconds([&] { serial_csv = results_csv(run_experiment(config)); });
    config.threads = 0;
    const double parallel =
        time_seconds([&] { parallel_csv = results_csv(run_experiment(config)); });
    print_row("experiment cells (2x6)", serial, parallel, serial_csv == parallel_csv);
  }

  return 0;
}
