#include "tomo/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tomo/data.hpp"
#include "tomo/error.hpp"
#include "tomo/kernels.hpp"
#include "tomo/landscapes.hpp"
#include "tomo/linalg.hpp"
#include "tomo/linearize.hpp"
#include "tomo/neural.hpp"
#include "tomo/pruning.hpp"
#include "tomo/svg.hpp"

namespace tomo {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct RunRow {
  std::string kind;
  int t = 0;
  std::size_t d = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double best_loss = 0.0;
  double best_acc = 0.0;
  bool has_acc = false;
};

void write_file(const fs::path& path, const std::string& content,
                std::vector<std::string>& files) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Error::Kind::io, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f.good()) throw Error(Error::Kind::io, "write failed: " + path.string());
  files.push_back(path.string());
}

std::string runs_csv(const std::string& experiment, const std::vector<RunRow>& rows) {
  std::ostringstream out;
  out << "experiment,kind,t,d,run,seed,best_loss,best_acc\n";
  for (const RunRow& r : rows) {
    out << experiment << ',' << r.kind << ',' << r.t << ',' << r.d << ',' << r.run
        << ',' << r.seed << ',' << format_double(r.best_loss) << ',';
    if (r.has_acc) out << format_double(r.best_acc);
    out << '\n';
  }
  return out.str();
}

std::string grid_csv(const SuccessGrid& grid) {
  std::ostringstream out;
  out << "t,d,threshold,metric_kind,successes,runs,p_success\n";
  for (int t : grid.t_values()) {
    for (std::size_t d : grid.d_values()) {
      for (Metric m : {Metric::loss, Metric::accuracy}) {
        for (double thr : grid.thresholds(m)) {
          const std::size_t succ = grid.cell_successes(t, d, m, thr);
          const std::size_t runs = grid.cell_runs(t, d);
          out << t << ',' << d << ',' << format_double(thr) << ',' << metric_name(m)
              << ',' << succ << ',' << runs << ','
              << format_double(static_cast<double>(succ) / static_cast<double>(runs))
              << '\n';
        }
      }
    }
  }
  return out.str();
}

std::string thresholds_csv(const std::vector<LabeledCurve>& curves) {
  std::ostringstream out;
  out << "t,threshold,metric_kind,delta,d_star\n";
  for (const LabeledCurve& lc : curves) {
    for (const ThresholdPoint& pt : lc.curve.points) {
      out << lc.t << ',' << format_double(pt.threshold) << ','
          << metric_name(lc.curve.metric) << ',' << format_double(lc.curve.delta) << ',';
      if (pt.d_star) out << *pt.d_star;  // unreached stays empty, never a sentinel
      out << '\n';
    }
  }
  return out.str();
}

std::string comparison_report_text(const ComparisonReport& report) {
  std::ostringstream out;
  for (const ComparisonRow& row : report.rows) {
    out << "threshold " << format_double(row.threshold) << ": ";
    bool first = true;
    for (const auto& [label, d_star] : row.ranking) {
      if (!first) out << " <= ";
      first = false;
      out << label << " (d*=";
      if (d_star) {
        out << *d_star;
      } else {
        out << "unreached";
      }
      out << ")";
    }
    out << '\n';
  }
  if (!report.burn_in_violations.empty()) {
    out << "burn-in ordering violations:\n";
    for (const std::string& v : report.burn_in_violations) out << "  " << v << '\n';
  }
  return out.str();
}

Spectrum build_spectrum(const SpectrumConfig& sc, std::size_t dim) {
  if (sc.type == SpectrumConfig::Type::bimodal) {
    return make_bimodal_spectrum(dim, sc.num_small, sc.lambda_small, sc.lambda_large);
  }
  RngStream rng(sc.spectrum_seed,
                RngStream::derive_stream_id("bulk-spectrum", {dim}));
  return make_bulk_spectrum(dim, sc.lambda_min, sc.lambda_max, rng);
}

Dataset build_dataset(const DataConfig& dc) {
  if (dc.type == DataConfig::Type::blobs) {
    RngStream rng(dc.data_seed, RngStream::derive_stream_id(
                                    "blobs", {dc.classes, dc.per_class, dc.dim}));
    return make_blobs(dc.classes, dc.per_class, dc.dim, dc.separation, rng);
  }
  return load_idx(dc.images, dc.labels, dc.limit);
}

MlpArchitecture build_arch(const std::vector<std::size_t>& hidden, const Dataset& data) {
  MlpArchitecture arch;
  arch.input_dim = data.inputs.cols();
  arch.hidden = hidden;
  arch.num_classes = data.num_classes;
  arch.validate();
  return arch;
}

void write_block_files(const ExperimentConfig& cfg, const fs::path& dir,
                       const SweepBlock& block, const std::vector<RunRow>& rows,
                       std::vector<std::string>& files) {
  fs::create_directories(dir);
  write_file(dir / "runs.csv", runs_csv(cfg.experiment, rows), files);
  write_file(dir / "grid.csv", grid_csv(block.grid), files);
  write_file(dir / "thresholds.csv", thresholds_csv(block.curves), files);
  if (cfg.svg) {
    for (const LabeledCurve& lc : block.curves) {
      const std::string name = "phase_t" + std::to_string(lc.t) + "_" +
                               metric_name(lc.curve.metric) + ".svg";
      write_file(dir / name, render_phase_svg(block.grid, lc.curve), files);
    }
  }
}

std::vector<LabeledCurve> extract_all_curves(const SuccessGrid& grid, double delta,
                                             const std::string& kind_label) {
  std::vector<LabeledCurve> curves;
  for (int t : grid.t_values()) {
    for (Metric m : {Metric::loss, Metric::accuracy}) {
      if (grid.thresholds(m).empty()) continue;
      LabeledCurve lc;
      lc.t = t;
      lc.label = kind_label + (t > 0 ? " t=" + std::to_string(t) : "");
      lc.curve = extract_threshold(grid, delta, t, m);
      curves.push_back(std::move(lc));
    }
  }
  return curves;
}

// ---------------------------------------------------------------------------
// quadratic-sweep
// ---------------------------------------------------------------------------

SweepResult run_quadratic(const ExperimentConfig& cfg) {
  const auto& qc = cfg.quadratic;
  const QuadraticWell well{build_spectrum(qc.spectrum, qc.dim)};

  std::vector<std::size_t> dims = qc.dims;
  std::sort(dims.begin(), dims.end());

  struct Job {
    double radius;
    std::size_t d;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (double r : qc.radii) {
    for (std::size_t d : dims) {
      for (std::size_t run = 0; run < cfg.runs; ++run) jobs.push_back({r, d, run});
    }
  }

  std::vector<RunResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::uint64_t sid = RngStream::derive_stream_id(
        "quadratic", {0, job.d, job.run,
                      static_cast<std::uint64_t>(std::llround(job.radius * 1e6))});
    results[i] = quadratic_cell_run(well, job.radius, job.d,
                                    RngStream(cfg.master_seed, sid));
  });

  SweepResult out;
  std::size_t cursor = 0;
  for (double r : qc.radii) {
    SweepBlock block;
    block.label = qc.radii.size() > 1 ? "R_" + format_double(r) : "";
    block.grid = SuccessGrid({0}, dims, qc.epsilons, {});
    std::vector<RunRow> rows;
    for (std::size_t d : dims) {
      std::vector<RunResult> cell;
      for (std::size_t run = 0; run < cfg.runs; ++run, ++cursor) {
        const RunResult& rr = results[cursor];
        cell.push_back(rr);
        rows.push_back({"random", 0, d, run, rr.stream_id, rr.best_loss, 0.0, false});
      }
      block.grid.set_cell(0, d, std::move(cell));
    }
    block.curves = extract_all_curves(block.grid, cfg.delta, "random");

    const fs::path dir = block.label.empty() ? fs::path(cfg.out_dir)
                                             : fs::path(cfg.out_dir) / block.label;
    write_block_files(cfg, dir, block, rows, out.files_written);
    out.blocks.push_back(std::move(block));
  }
  return out;
}

// ---------------------------------------------------------------------------
// nn-sweep
// ---------------------------------------------------------------------------

SweepResult run_nn_sweep(const ExperimentConfig& cfg) {
  const NnConfig& nc = cfg.nn;
  const Dataset data = build_dataset(nc.data);
  const MlpArchitecture arch = build_arch(nc.hidden, data);

  std::vector<std::size_t> dims = nc.dims;
  std::sort(dims.begin(), dims.end());
  std::vector<int> ts = nc.linearized ? std::vector<int>{0} : nc.burn_in_steps;
  std::sort(ts.begin(), ts.end());

  TrainOptions options;
  options.eval_every = nc.eval_every;
  options.snapshot_every = 0;

  struct Job {
    int t;
    std::size_t d;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (int t : ts) {
    for (std::size_t d : dims) {
      for (std::size_t run = 0; run < cfg.runs; ++run) jobs.push_back({t, d, run});
    }
  }

  std::vector<RunResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const char* tag = nc.linearized ? "nn-linearized" : "nn";
    RngStream stream(cfg.master_seed,
                     RngStream::derive_stream_id(
                         tag, {static_cast<std::uint64_t>(job.t), job.d, job.run}));
    const FlatParams w0 = init_params(arch, stream);

    TrainRecord rec;
    if (nc.linearized) {
      // Train to an optimum in the full space, linearize there, then train
      // the linear model in a random chart offset at the original init.
      const FullTrainResult full =
          train_full(arch, w0, data, nc.optimizer, stream,
                     TrainOptions{.eval_every = 0, .snapshot_every = 0});
      const LinearizedModel model =
          linearize(arch, full.final_params, data, nc.linearize_max_bytes);
      auto objective = make_linearized_objective(model, data);
      const SubspaceBasis basis =
          sample_subspace_basis(arch.param_count(), job.d, w0.w, stream);
      rec = train_objective_in_subspace(*objective, basis, nc.optimizer, stream,
                                        options, SubspaceKind::linearized, 0);
    } else {
      const FlatParams offset =
          job.t == 0 ? w0
                     : burn_in_offset(arch, w0, data,
                                      static_cast<std::size_t>(job.t), nc.optimizer,
                                      stream);
      const SubspaceBasis basis =
          sample_subspace_basis(arch.param_count(), job.d, offset.w, stream);
      rec = train_in_subspace(
          arch, basis, data, nc.optimizer, stream, options,
          job.t == 0 ? SubspaceKind::random : SubspaceKind::burn_in, job.t);
    }
    results[i] = RunResult{rec.stream_id, rec.best_loss, rec.best_acc, true};
  });

  SweepResult out;
  SweepBlock block;
  block.grid = SuccessGrid(ts, dims, nc.loss_thresholds, nc.accuracy_thresholds);
  std::vector<RunRow> rows;
  std::size_t cursor = 0;
  for (int t : ts) {
    for (std::size_t d : dims) {
      std::vector<RunResult> cell;
      for (std::size_t run = 0; run < cfg.runs; ++run, ++cursor) {
        const RunResult& rr = results[cursor];
        cell.push_back(rr);
        const std::string kind = nc.linearized    ? "linearized"
                                 : (t == 0)       ? "random"
                                                  : "burn-in";
        rows.push_back({kind, t, d, run, rr.stream_id, rr.best_loss, rr.best_acc, true});
      }
      block.grid.set_cell(t, d, std::move(cell));
    }
  }
  const std::string kind_label = nc.linearized ? "linearized" : "random";
  for (int t : ts) {
    for (Metric m : {Metric::loss, Metric::accuracy}) {
      if (block.grid.thresholds(m).empty()) continue;
      LabeledCurve lc;
      lc.t = t;
      lc.label = t == 0 ? kind_label : "burn-in t=" + std::to_string(t);
      lc.curve = extract_threshold(block.grid, cfg.delta, t, m);
      block.curves.push_back(std::move(lc));
    }
  }

  write_block_files(cfg, cfg.out_dir, block, rows, out.files_written);

  // Method comparison across burn-in times, per metric.
  for (Metric m : {Metric::loss, Metric::accuracy}) {
    std::vector<LabeledCurve> same_metric;
    for (const LabeledCurve& lc : block.curves) {
      if (lc.curve.metric == m) same_metric.push_back(lc);
    }
    if (same_metric.size() > 1) {
      const ComparisonReport report = compare_methods(same_metric);
      write_file(fs::path(cfg.out_dir) / ("comparison_" + metric_name(m) + ".txt"),
                 comparison_report_text(report), out.files_written);
    }
  }

  out.blocks.push_back(std::move(block));
  return out;
}

// ---------------------------------------------------------------------------
// lottery
// ---------------------------------------------------------------------------

SweepResult run_lottery(const ExperimentConfig& cfg) {
  const LotteryConfig& lc = cfg.lottery;
  const Dataset data = build_dataset(lc.data);
  const MlpArchitecture arch = build_arch(lc.hidden, data);
  const std::size_t D = arch.param_count();

  std::vector<std::size_t> dims = lc.dims;
  std::sort(dims.begin(), dims.end());

  TrainOptions eval_options;
  eval_options.eval_every = lc.eval_every;
  eval_options.snapshot_every = 0;

  // Phase 1: one full training per seed; keep the lottery chart and rewind.
  struct SeedState {
    FlatParams w0;
    FlatParams rewind;
    LotterySubspace subspace;  // built at the largest requested d
    RunResult full_run;
  };
  std::vector<SeedState> seeds(lc.seeds);
  parallel_for(lc.seeds, cfg.workers, [&](std::size_t s) {
    RngStream init_stream(cfg.master_seed,
                          RngStream::derive_stream_id("lottery-init", {s}));
    SeedState& st = seeds[s];
    st.w0 = init_params(arch, init_stream);
    RngStream train_stream(cfg.master_seed,
                           RngStream::derive_stream_id("lottery-full", {s}));
    TrainOptions full_options;
    full_options.eval_every = lc.eval_every;
    full_options.snapshot_every = 1;
    FullTrainResult full =
        train_full(arch, st.w0, data, lc.optimizer, train_stream, full_options);
    st.full_run = RunResult{full.record.stream_id, full.record.best_loss,
                            full.record.best_acc, true};

    const std::size_t t_idx = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(lc.rewind_t, 0)), full.trajectory.size() - 1);
    st.rewind = full.trajectory[t_idx];

    const TrajectoryMatrix traj =
        trajectory_from_snapshots(full.trajectory, lc.use_deltas);
    const std::size_t d_max = std::min(dims.back(), traj.steps());
    st.subspace = build_lottery_subspace(traj, d_max, st.rewind);
  });

  // Phase 2: subspace training per (seed, d), lottery and random baseline.
  struct Job {
    std::size_t seed;
    std::size_t d;
    bool random_baseline;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < lc.seeds; ++s) {
    for (std::size_t d : dims) {
      jobs.push_back({s, d, false});
      if (lc.include_random_baseline) jobs.push_back({s, d, true});
    }
  }
  std::vector<RunResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const SeedState& st = seeds[job.seed];
    if (job.random_baseline) {
      RngStream stream(cfg.master_seed,
                       RngStream::derive_stream_id("lottery-rand", {job.seed, job.d}));
      const SubspaceBasis basis = sample_subspace_basis(D, job.d, st.w0.w, stream);
      const TrainRecord rec =
          train_in_subspace(arch, basis, data, lc.optimizer, stream, eval_options,
                            SubspaceKind::random, 0);
      results[i] = RunResult{rec.stream_id, rec.best_loss, rec.best_acc, true};
    } else {
      RngStream stream(cfg.master_seed,
                       RngStream::derive_stream_id("lottery-sub", {job.seed, job.d}));
      const std::size_t d_avail = std::min(job.d, st.subspace.u.cols());
      // Nested chart: the first d columns of the largest decomposition.
      SubspaceBasis basis;
      basis.offset = st.rewind.w;
      basis.a = Matrix(D, d_avail);
      for (std::size_t r = 0; r < D; ++r) {
        for (std::size_t c = 0; c < d_avail; ++c) basis.a(r, c) = st.subspace.u(r, c);
      }
      const TrainRecord rec =
          train_in_subspace(arch, basis, data, lc.optimizer, stream, eval_options,
                            SubspaceKind::lottery, lc.rewind_t);
      results[i] = RunResult{rec.stream_id, rec.best_loss, rec.best_acc, true};
    }
  });

  SweepResult out;
  fs::create_directories(cfg.out_dir);

  // Collect per-block rows and grids.
  auto collect = [&](bool random_baseline, const std::string& label,
                     int t) -> std::pair<SweepBlock, std::vector<RunRow>> {
    SweepBlock block;
    block.label = label;
    block.grid = SuccessGrid({t}, dims, lc.loss_thresholds, lc.accuracy_thresholds);
    std::vector<RunRow> rows;
    for (std::size_t d : dims) {
      std::vector<RunResult> cell;
      for (std::size_t s = 0; s < lc.seeds; ++s) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          if (jobs[i].seed == s && jobs[i].d == d &&
              jobs[i].random_baseline == random_baseline) {
            cell.push_back(results[i]);
            rows.push_back({random_baseline ? "random" : "lottery", t, d, s,
                            results[i].stream_id, results[i].best_loss,
                            results[i].best_acc, true});
          }
        }
      }
      block.grid.set_cell(t, d, std::move(cell));
    }
    block.curves =
        extract_all_curves(block.grid, cfg.delta, random_baseline ? "random" : "lottery");
    return {std::move(block), std::move(rows)};
  };

  auto [lottery_block, lottery_rows] = collect(false, "lottery", lc.rewind_t);
  // Full-training rows ride along with the lottery block.
  for (std::size_t s = 0; s < lc.seeds; ++s) {
    lottery_rows.push_back({"full", 0, D, s, seeds[s].full_run.stream_id,
                            seeds[s].full_run.best_loss, seeds[s].full_run.best_acc,
                            true});
  }
  write_block_files(cfg, fs::path(cfg.out_dir) / "lottery", lottery_block, lottery_rows,
                    out.files_written);
  out.blocks.push_back(std::move(lottery_block));

  if (lc.include_random_baseline) {
    auto [random_block, random_rows] = collect(true, "random", 0);
    write_block_files(cfg, fs::path(cfg.out_dir) / "random", random_block, random_rows,
                      out.files_written);
    out.blocks.push_back(std::move(random_block));
  }

  // Singular-value spectra of the lottery charts.
  std::ostringstream spectra;
  spectra << "seed,index,singular_value\n";
  for (std::size_t s = 0; s < lc.seeds; ++s) {
    for (const auto& [idx, sv] : spectra_report(seeds[s].subspace)) {
      spectra << s << ',' << idx << ',' << format_double(sv) << '\n';
    }
  }
  write_file(fs::path(cfg.out_dir) / "spectra.csv", spectra.str(), out.files_written);
  return out;
}

// ---------------------------------------------------------------------------
// ticket
// ---------------------------------------------------------------------------

SweepResult run_ticket(const ExperimentConfig& cfg) {
  const TicketConfig& tc = cfg.ticket;
  const Dataset data = build_dataset(tc.data);
  const MlpArchitecture arch = build_arch(tc.hidden, data);
  const std::size_t D = arch.param_count();

  std::vector<double> fractions = tc.keep_fractions;
  std::sort(fractions.begin(), fractions.end());

  // Kept counts are deterministic in D, so the d axis is shared by seeds.
  std::vector<std::size_t> kept_counts;
  for (double f : fractions) {
    kept_counts.push_back(std::min<std::size_t>(
        D, static_cast<std::size_t>(std::ceil(f * static_cast<double>(D)))));
  }
  std::vector<std::size_t> d_axis = kept_counts;
  std::sort(d_axis.begin(), d_axis.end());
  d_axis.erase(std::unique(d_axis.begin(), d_axis.end()), d_axis.end());

  struct Cell {
    RunResult result;
    std::size_t kept = 0;
    bool collapsed = false;
  };
  std::vector<Cell> cells(tc.seeds * fractions.size());

  parallel_for(tc.seeds, cfg.workers, [&](std::size_t s) {
    RngStream init_stream(cfg.master_seed,
                          RngStream::derive_stream_id("ticket-init", {s}));
    const FlatParams w0 = init_params(arch, init_stream);

    AdamConfig pre = tc.optimizer;
    pre.epochs = tc.pretrain_epochs;
    RngStream pre_stream(cfg.master_seed,
                         RngStream::derive_stream_id("ticket-pre", {s}));
    TrainOptions pre_options;
    pre_options.eval_every = 0;
    pre_options.snapshot_every = 0;
    const FullTrainResult pre_run =
        train_full(arch, w0, data, pre, pre_stream, pre_options);
    // One-shot magnitude pruning at the end of the short pre-train.
    const FlatParams& trained = pre_run.final_params;

    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      const SparsityMask mask = lottery_ticket_mask(trained, fractions[fi]);
      RngStream train_stream(
          cfg.master_seed,
          RngStream::derive_stream_id(
              "ticket-train",
              {s, static_cast<std::uint64_t>(std::llround(fractions[fi] * 1e9))}));
      TrainOptions options;
      options.eval_every = tc.eval_every;
      options.snapshot_every = 0;
      const FullTrainResult res = train_masked(arch, w0, mask.keep, data, tc.optimizer,
                                               train_stream, options);
      Cell& cell = cells[s * fractions.size() + fi];
      cell.result = RunResult{res.record.stream_id, res.record.best_loss,
                              res.record.best_acc, true};
      cell.kept = mask.kept;
      cell.collapsed = has_layer_collapse(arch, mask);
    }
  });

  SweepResult out;
  SweepBlock block;
  block.grid = SuccessGrid({0}, d_axis, tc.loss_thresholds, tc.accuracy_thresholds);
  std::vector<RunRow> rows;
  std::ostringstream tickets;
  tickets << "seed,keep_fraction,kept,compression_ratio,layer_collapse\n";
  for (std::size_t di = 0; di < d_axis.size(); ++di) {
    std::vector<RunResult> cell_results;
    for (std::size_t s = 0; s < tc.seeds; ++s) {
      for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        const Cell& cell = cells[s * fractions.size() + fi];
        if (cell.kept != d_axis[di]) continue;
        cell_results.push_back(cell.result);
        rows.push_back({"ticket", 0, cell.kept, s, cell.result.stream_id,
                        cell.result.best_loss, cell.result.best_acc, true});
      }
    }
    block.grid.set_cell(0, d_axis[di], std::move(cell_results));
  }
  for (std::size_t s = 0; s < tc.seeds; ++s) {
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      const Cell& cell = cells[s * fractions.size() + fi];
      tickets << s << ',' << format_double(fractions[fi]) << ',' << cell.kept << ','
              << format_double(compression_ratio(D, cell.kept)) << ','
              << (cell.collapsed ? 1 : 0) << '\n';
    }
  }
  block.curves = extract_all_curves(block.grid, cfg.delta, "ticket");

  write_block_files(cfg, cfg.out_dir, block, rows, out.files_written);
  write_file(fs::path(cfg.out_dir) / "tickets.csv", tickets.str(), out.files_written);
  out.blocks.push_back(std::move(block));
  return out;
}

// ---------------------------------------------------------------------------
// width-estimate
// ---------------------------------------------------------------------------

SweepResult run_width(const ExperimentConfig& cfg) {
  const WidthConfig& wc = cfg.width;
  SweepResult out;
  out.width_cases.resize(wc.cases);

  parallel_for(wc.cases, cfg.workers, [&](std::size_t i) {
    RngStream stream(cfg.master_seed, RngStream::derive_stream_id("width", {i}));
    const std::size_t dim = 2 + stream.next_below(std::max<std::size_t>(wc.max_dim, 2) - 1);
    std::vector<double> radii(dim);
    const double lo = std::log(wc.radius_min);
    const double hi = std::log(wc.radius_max);
    for (double& r : radii) r = std::exp(lo + (hi - lo) * stream.next_unit());
    const EllipsoidSpec spec(radii);
    const auto [lower, upper] = ellipsoid_width_sq_bounds(spec);
    const WidthEstimate est = ellipsoid_width_mc(spec, stream, wc.num_gaussians);

    WidthCaseResult& res = out.width_cases[i];
    res.index = i;
    res.dim = dim;
    res.estimate = est;
    res.lower = lower;
    res.upper = upper;
    const double hi_sq = (est.mean + 3.0 * est.std_error) * (est.mean + 3.0 * est.std_error);
    const double lo_mean = std::max(est.mean - 3.0 * est.std_error, 0.0);
    res.within = hi_sq >= lower && lo_mean * lo_mean <= upper;
  });

  fs::create_directories(cfg.out_dir);
  std::ostringstream csv;
  csv << "case,dim,num_gaussians,mean,std_error,mean_sq,lower,upper,within_3se\n";
  for (const WidthCaseResult& r : out.width_cases) {
    csv << r.index << ',' << r.dim << ',' << r.estimate.num_gaussians << ','
        << format_double(r.estimate.mean) << ',' << format_double(r.estimate.std_error)
        << ',' << format_double(r.estimate.mean * r.estimate.mean) << ','
        << format_double(r.lower) << ',' << format_double(r.upper) << ','
        << (r.within ? 1 : 0) << '\n';
  }
  write_file(fs::path(cfg.out_dir) / "widths.csv", csv.str(), out.files_written);
  return out;
}

// ---------------------------------------------------------------------------
// affine-distance
// ---------------------------------------------------------------------------

SweepResult run_affine(const ExperimentConfig& cfg) {
  const AffineConfig& ac = cfg.affine;
  SweepResult out;
  out.affine_cells.resize(ac.pairs.size());

  parallel_for(ac.pairs.size(), cfg.workers, [&](std::size_t pi) {
    const auto [n, d] = ac.pairs[pi];
    if (n == 0 || n >= ac.dim || d == 0 || d >= ac.dim) {
      throw Error(Error::Kind::config, "affine: pair (n, d) must be inside (0, D)");
    }
    double total = 0.0;
    for (std::size_t trial = 0; trial < ac.trials; ++trial) {
      RngStream stream(cfg.master_seed,
                       RngStream::derive_stream_id("affine", {n, d, trial}));
      std::vector<double> w_t(ac.dim);
      for (double& v : w_t) v = stream.next_gaussian();
      const SubspaceBasis basis = sample_subspace_basis(ac.dim, d, std::move(w_t), stream);
      std::vector<double> c(ac.dim);
      for (double& v : c) v = stream.next_gaussian();
      const AffineTarget target = sample_affine_target(ac.dim, n, std::move(c), stream);
      total += affine_target_distance(target, basis);
    }
    AffineCellResult& cell = out.affine_cells[pi];
    cell.n = n;
    cell.d = d;
    cell.trials = ac.trials;
    cell.mean_distance = total / static_cast<double>(ac.trials);
    const double slack = static_cast<double>(ac.dim) - static_cast<double>(n + d);
    cell.predictor = slack > 0.0 ? std::sqrt(slack / static_cast<double>(ac.dim)) : 0.0;
  });

  // Least-squares slope through the origin plus R^2 and ratio spread.
  double sxy = 0.0, sxx = 0.0, sy = 0.0;
  std::size_t m = 0;
  double rmin = 0.0, rmax = 0.0;
  for (const AffineCellResult& c : out.affine_cells) {
    if (c.predictor <= 0.0) continue;
    sxy += c.predictor * c.mean_distance;
    sxx += c.predictor * c.predictor;
    sy += c.mean_distance;
    const double ratio = c.mean_distance / c.predictor;
    if (m == 0) {
      rmin = rmax = ratio;
    } else {
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    ++m;
  }
  if (m > 0 && sxx > 0.0) {
    out.affine_fit.slope = sxy / sxx;
    const double mean_y = sy / static_cast<double>(m);
    double ss_res = 0.0, ss_tot = 0.0;
    for (const AffineCellResult& c : out.affine_cells) {
      if (c.predictor <= 0.0) continue;
      const double fit = out.affine_fit.slope * c.predictor;
      ss_res += (c.mean_distance - fit) * (c.mean_distance - fit);
      ss_tot += (c.mean_distance - mean_y) * (c.mean_distance - mean_y);
    }
    out.affine_fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    out.affine_fit.ratio_spread = rmin > 0.0 ? rmax / rmin - 1.0 : 0.0;
  }

  fs::create_directories(cfg.out_dir);
  std::ostringstream csv;
  csv << "n,d,trials,mean_distance,predictor,ratio\n";
  for (const AffineCellResult& c : out.affine_cells) {
    csv << c.n << ',' << c.d << ',' << c.trials << ','
        << format_double(c.mean_distance) << ',' << format_double(c.predictor) << ',';
    if (c.predictor > 0.0) csv << format_double(c.mean_distance / c.predictor);
    csv << '\n';
  }
  write_file(fs::path(cfg.out_dir) / "distances.csv", csv.str(), out.files_written);
  return out;
}

std::string metadata_json(const ExperimentConfig& cfg, const SweepResult& result) {
  nlohmann::json j = nlohmann::json::parse(config_to_json(cfg, false));
  nlohmann::json notes;
  notes["rng"] = "splitmix64 + box-muller";
  notes["kernel_isa"] = kernels::isa_name(kernels::active_isa());
  switch (cfg.kind) {
    case ExperimentKind::quadratic_sweep:
      notes["solver"] = "exact";
      break;
    case ExperimentKind::nn_sweep:
      notes["linearized_offset"] = "w0";
      notes["burn_in_budget"] = "separate from subspace training";
      break;
    case ExperimentKind::lottery:
      notes["trajectory_columns"] = cfg.lottery.use_deltas ? "step deltas" : "snapshots";
      break;
    case ExperimentKind::ticket:
      notes["rewind"] = "kept coordinates to init, pruned coordinates to zero";
      break;
    case ExperimentKind::affine_distance:
      if (!result.affine_cells.empty()) {
        notes["fit"] = {{"slope", result.affine_fit.slope},
                        {"r_squared", result.affine_fit.r_squared},
                        {"ratio_spread", result.affine_fit.ratio_spread}};
      }
      break;
    case ExperimentKind::width_estimate: {
      std::size_t within = 0;
      for (const auto& c : result.width_cases) within += c.within;
      notes["within_bounds"] = within;
      break;
    }
  }
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

}  // namespace

SweepResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw Error(Error::Kind::io, "cannot create output directory " + cfg.out_dir);
  }

  SweepResult result;
  switch (cfg.kind) {
    case ExperimentKind::quadratic_sweep: result = run_quadratic(cfg); break;
    case ExperimentKind::nn_sweep: result = run_nn_sweep(cfg); break;
    case ExperimentKind::lottery: result = run_lottery(cfg); break;
    case ExperimentKind::ticket: result = run_ticket(cfg); break;
    case ExperimentKind::width_estimate: result = run_width(cfg); break;
    case ExperimentKind::affine_distance: result = run_affine(cfg); break;
  }

  write_file(fs::path(cfg.out_dir) / "metadata.json", metadata_json(cfg, result),
             result.files_written);
  return result;
}

}  // namespace tomo
