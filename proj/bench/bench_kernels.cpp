// Times the serial reference kernels against the OpenMP ones on a synthetic
// batch and reports the largest deviation from the serial result.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "CLI11.hpp"
#include "accent/encoder.hpp"
#include "accent/nn/batch.hpp"
#include "accent/synthetic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace accent;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

float max_diff(std::span<const float> a, std::span<const float> b) {
  float d = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  int hidden = 64;
  std::size_t batch_size = 512;
  int reps = 5;
  int threads = 0;
  CLI::App app("Serial vs OpenMP kernel timings");
  app.add_option("--hidden", hidden)->capture_default_str();
  app.add_option("--batch", batch_size)->capture_default_str();
  app.add_option("--reps", reps)->capture_default_str();
  app.add_option("--threads", threads, "0 keeps the OpenMP default")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif

  nn::Architecture arch;
  arch.hidden = hidden;
  const auto params = nn::init_params<float>(arch, 1);
  const auto words = synthetic::random_stressed_words(batch_size, 2, 6, 2);
  std::vector<nn::Example> batch;
  std::vector<std::vector<int>> inputs;
  for (std::size_t i = 0; i < words.size(); ++i) {
    inputs.push_back(channel_sequence(words[i].chars(), arch.encoding));
    batch.push_back({inputs.back(), words[i].stress(), i});
  }
  const nn::ParamLayout layout(arch);
  nn::Gradients<float> serial(layout), tree(layout), per_thread(layout);
  nn::GradientWorkspace<float> workspace(layout);
  const std::span<const nn::Example> ex(batch);

  const double t_serial = best_of(reps, [&] { nn::batch_gradients_serial(params, ex, serial); });
  const double t_tree = best_of(reps, [&] {
    nn::batch_gradients(params, ex, tree, nn::Reduction::FixedTree, workspace);
  });
  const double t_thread = best_of(reps, [&] {
    nn::batch_gradients(params, ex, per_thread, nn::Reduction::PerThread, workspace);
  });

  nn::RowMatrix<float> p_serial, p_parallel;
  const std::span<const std::vector<int>> in(inputs);
  const double t_pred_serial = best_of(reps, [&] { p_serial = nn::predict_batch_serial(params, in); });
  const double t_pred = best_of(reps, [&] { p_parallel = nn::predict_batch(params, in); });

  std::printf("hidden %d, batch %zu, best of %d\n", hidden, batch_size, reps);
  std::printf("%-26s %10s %9s %12s\n", "kernel", "ms", "speedup", "max |diff|");
  auto row = [&](const char* name, double t, float diff) {
    std::printf("%-26s %10.2f %8.2fx %12.3e\n", name, t * 1e3, t_serial / t, static_cast<double>(diff));
  };
  row("gradients serial", t_serial, 0.0f);
  row("gradients omp fixed-tree", t_tree, max_diff(serial.flat(), tree.flat()));
  row("gradients omp per-thread", t_thread, max_diff(serial.flat(), per_thread.flat()));
  std::printf("%-26s %10.2f %8.2fx %12s\n", "predict serial", t_pred_serial * 1e3, 1.0, "-");
  std::printf("%-26s %10.2f %8.2fx %12.3e\n", "predict omp", t_pred * 1e3, t_pred_serial / t_pred,
              static_cast<double>((p_serial - p_parallel).cwiseAbs().maxCoeff()));
  return 0;
}
