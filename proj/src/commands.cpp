#include "ipt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ipt/analysis.hpp"
#include "ipt/dataset.hpp"
#include "ipt/errors.hpp"
#include "ipt/metrics.hpp"
#include "ipt/protocol.hpp"
#include "ipt/random.hpp"
#include "ipt/records.hpp"
#include "ipt/semantic.hpp"
#include "ipt/svg.hpp"

namespace ipt {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any task is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        {
          std::lock_guard lock(error_mutex);
          if (error) return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("I/O failure writing '" + path.string() + "'");
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string index_suffix(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

}  // namespace

// --- generate --------------------------------------------------------------

GenerateSummary generate_dataset(const Config& config, const fs::path& out, std::uint64_t seed, std::size_t jobs) {
  const RenderConfig& rc = config.render;
  if (rc.clips.empty()) throw ConfigError("/render/clips: must not be empty");

  struct Planned {
    VideoEntry entry;
    SceneSpec spec;
  };

  std::vector<std::string> label_names;
  for (const auto& c : rc.clips) {
    if (std::find(label_names.begin(), label_names.end(), c.label) == label_names.end()) label_names.push_back(c.label);
  }
  DatasetManifest manifest;
  manifest.fps = rc.fps;
  manifest.labels = LabelSpace(label_names);

  std::vector<Planned> plan;
  for (const auto& clip_cfg : rc.clips) {
    auto clip = std::make_shared<const MotionClip>([&] {
      auto full = load_bvh_file(clip_cfg.path, clip_cfg.label);
      return full.sub_clip(clip_cfg.first_frame, clip_cfg.max_frames.value_or(full.frame_count()));
    }());
    const double focal =
        rc.focal_length ? *rc.focal_length : auto_focal_length(*clip, rc.height, rc.reference_distance, rc.figure_fraction);
    const int label = *manifest.labels.find(clip_cfg.label);

    for (const auto& appearance : rc.appearances) {
      SceneSpec base;
      base.clip = clip;
      base.factors = rc.base;
      base.factors.appearance_id = appearance;
      base.width = rc.width;
      base.height = rc.height;
      base.focal_length = focal;
      base.style = rc.style;
      const std::string series = clip_cfg.name + "_" + appearance;

      auto add = [&](std::string id, SceneSpec spec, std::optional<Condition> sweep) {
        if (rc.randomize) spec = randomize_nuisance(spec, derive_seed(seed, "nuisance", id), *rc.randomize);
        spec.seed = derive_seed(seed, "render", id);
        VideoEntry e;
        e.id = std::move(id);
        e.label = label;
        e.factors = spec.factors.normalized();
        e.sweep = std::move(sweep);
        plan.push_back({std::move(e), std::move(spec)});
      };

      if (config.sweeps.empty()) {
        add(series, base, std::nullopt);
        continue;
      }
      for (const auto& sc : config.sweeps) {
        FactorSweep sweep{sc.factor, sc.x1, sc.delta, sc.count, base};
        const auto specs = enumerate_sweep(sweep);
        for (std::size_t i = 0; i < specs.size(); ++i) {
          const double value = sc.x1 + static_cast<double>(i) * sc.delta;
          add(series + "_" + factor_name(sc.factor) + "_" + index_suffix(i), specs[i],
              Condition::sweep(factor_name(sc.factor), value, series));
        }
      }
    }
  }

  std::set<std::string> ids;
  for (const auto& p : plan) {
    if (!ids.insert(p.entry.id).second) throw ConfigError("generated video id '" + p.entry.id + "' is not unique");
  }

  DatasetWriter writer(out);
  const std::size_t batch = std::max<std::size_t>(1, jobs) * 4;
  for (std::size_t start = 0; start < plan.size(); start += batch) {
    const std::size_t end = std::min(plan.size(), start + batch);
    std::vector<std::optional<RenderOutput>> rendered(end - start);
    parallel_for(end - start, jobs, [&](std::size_t k) {
      const auto& p = plan[start + k];
      rendered[k] = render(p.spec, p.entry.id, p.entry.label, rc.fps, rc.catalog);
    });
    for (std::size_t k = 0; k < rendered.size(); ++k) {
      writer.write_video(plan[start + k].entry, rendered[k]->video, &rendered[k]->masks);
    }
  }
  for (auto& p : plan) manifest.videos.push_back(std::move(p.entry));
  writer.finish(manifest);
  return {manifest.videos.size()};
}

GenerateSummary cmd_generate(const GenerateOptions& options) {
  return generate_dataset(load_config(options.config), options.out, options.seed, options.jobs);
}

// --- transform -------------------------------------------------------------

namespace {

ImageTransformSpec parse_transform_arg(const std::string& text, std::uint64_t seed) {
  ImageTransformSpec spec;
  if (!text.empty() && text.front() == '{') {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("--transform: not valid JSON");
    try {
      spec = j.get<ImageTransformSpec>();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--transform: ") + e.what());
    }
    if (!j.contains("params") || !j.at("params").contains("seed")) spec.seed = seed;
  } else {
    spec.kind = parse_transform_kind(text);
    spec.seed = seed;
  }
  spec.validate();
  return spec;
}

void image_transform_dataset(const Dataset& in, const ImageTransformSpec& spec, const fs::path& out, std::size_t jobs) {
  DatasetManifest manifest;
  manifest.fps = in.manifest().fps;
  manifest.labels = in.manifest().labels;
  manifest.condition = Condition::transformed(spec.name());
  DatasetWriter writer(out);
  const std::size_t batch = std::max<std::size_t>(1, jobs) * 4;
  for (std::size_t start = 0; start < in.size(); start += batch) {
    const std::size_t end = std::min(in.size(), start + batch);
    std::vector<std::optional<Video>> done(end - start);
    parallel_for(end - start, jobs, [&](std::size_t k) { done[k] = apply_transform(in.load_video(start + k), spec); });
    for (std::size_t k = 0; k < done.size(); ++k) {
      const auto& src = in.manifest().videos[start + k];
      VideoEntry e;
      e.id = src.id;
      e.label = src.label;
      e.factors = src.factors;
      writer.write_video(e, *done[k]);
      manifest.videos.push_back(std::move(e));
    }
  }
  writer.finish(manifest);
}

}  // namespace

TransformSummary cmd_transform(const TransformOptions& options) {
  const Dataset in = load_dataset(options.in);
  TransformSummary summary;

  if (options.transform == "semantic") {
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!in.manifest().videos[i].mask_path) {
        throw DataError("semantic mode needs masks; video '" + in.manifest().videos[i].id + "' has none");
      }
    }
    std::vector<std::optional<SemanticSplit>> splits(in.size());
    parallel_for(in.size(), options.jobs, [&](std::size_t i) {
      splits[i] = split_fg_bg(in.load_video(i), *in.load_masks(i));
    });

    std::vector<std::pair<std::string, double>> fractions;
    for (std::size_t i = 0; i < in.size(); ++i) fractions.emplace_back(in.manifest().videos[i].id, splits[i]->dropped_fraction());
    const auto kept_ids = filter_undetected(fractions, options.drop_threshold);
    const std::set<std::string> kept(kept_ids.begin(), kept_ids.end());

    json report{{"threshold", options.drop_threshold}, {"videos", json::array()}};
    DatasetManifest fg_manifest, bg_manifest;
    fg_manifest.fps = bg_manifest.fps = in.manifest().fps;
    fg_manifest.labels = bg_manifest.labels = in.manifest().labels;
    fg_manifest.condition = Condition::foreground();
    bg_manifest.condition = Condition::background();
    DatasetWriter fg_writer(options.out / "foreground");
    DatasetWriter bg_writer(options.out / "background");
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto& src = in.manifest().videos[i];
      const auto& split = *splits[i];
      const bool retained = kept.contains(src.id) && split.foreground.has_value();
      report["videos"].push_back({{"id", src.id},
                                  {"frames", split.source_frames},
                                  {"dropped_frames", split.dropped_frames},
                                  {"dropped_fraction", split.dropped_fraction()},
                                  {"retained", retained}});
      if (!retained) {
        ++summary.dropped_videos;
        continue;
      }
      VideoEntry fg{split.foreground->video_id(), {}, src.label, std::nullopt, src.factors, std::nullopt};
      VideoEntry bg{split.background->video_id(), {}, src.label, std::nullopt, src.factors, std::nullopt};
      fg_writer.write_video(fg, *split.foreground);
      bg_writer.write_video(bg, *split.background);
      fg_manifest.videos.push_back(std::move(fg));
      bg_manifest.videos.push_back(std::move(bg));
    }
    fg_writer.finish(fg_manifest);
    bg_writer.finish(bg_manifest);
    write_text(options.out / "drop_report.json", report.dump(2) + "\n");
    summary.datasets = {options.out / "foreground", options.out / "background"};
    return summary;
  }

  if (options.transform == "suite") {
    std::vector<ImageTransformSpec> suite = default_suite();
    if (options.config) {
      const auto cfg = load_config(*options.config);
      if (!cfg.transforms.empty()) suite = cfg.transforms;
    }
    std::set<std::string> names;
    for (auto spec : suite) {
      if (spec.seed == 0) spec.seed = options.seed;
      if (!names.insert(spec.name()).second) throw ConfigError("transform suite lists '" + spec.name() + "' twice");
      image_transform_dataset(in, spec, options.out / spec.name(), options.jobs);
      summary.datasets.push_back(options.out / spec.name());
    }
    return summary;
  }

  const auto spec = parse_transform_arg(options.transform, options.seed);
  image_transform_dataset(in, spec, options.out, options.jobs);
  summary.datasets = {options.out};
  return summary;
}

// --- evaluate --------------------------------------------------------------

EvaluateSummary cmd_evaluate(const EvaluateOptions& options) {
  const Dataset dataset = load_dataset(options.dataset);
  const auto endpoint = EndpointSpec::parse(options.model);
  const auto timeout = Timeout(static_cast<std::int64_t>(options.timeout_s * 1000.0));

  // The first connection doubles as the label-space check.
  std::vector<std::optional<ModelClient>> clients(std::max<std::size_t>(1, options.jobs));
  clients[0].emplace(ModelClient::connect(endpoint, timeout));
  const Handshake handshake = clients[0]->handshake();
  std::vector<int> model_label(dataset.manifest().labels.size());
  for (std::size_t i = 0; i < model_label.size(); ++i) {
    const auto& name = dataset.manifest().labels.name(i);
    const auto found = handshake.labels.find(name);
    if (!found) throw EndpointError("label-space mismatch: model does not know dataset label '" + name + "'");
    model_label[i] = *found;
  }
  for (const auto& tag : options.features) {
    if (std::find(handshake.features.begin(), handshake.features.end(), tag) == handshake.features.end()) {
      throw EndpointError("model does not advertise feature '" + tag + "'");
    }
  }

  std::vector<PredictionRecord> existing;
  std::set<std::string> done;
  if (fs::exists(options.out)) {
    for (auto& r : read_records(options.out)) {
      if (!r.ok() || !dataset.manifest().find(r.video_id)) continue;
      done.insert(r.video_id);
      existing.push_back(std::move(r));
    }
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!done.contains(dataset.manifest().videos[i].id)) pending.push_back(i);
  }

  EvaluateSummary summary;
  summary.skipped = done.size();
  std::mutex mutex;
  std::vector<PredictionRecord> fresh;
  {
    std::ofstream journal(options.out, std::ios::binary | std::ios::app);
    if (!journal) throw DataError("cannot write '" + options.out.string() + "'");
    const std::size_t workers = std::min(clients.size(), std::max<std::size_t>(1, pending.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        auto& client = clients[w];
        while (true) {
          const std::size_t slot = next.fetch_add(1);
          if (slot >= pending.size()) return;
          const auto& entry = dataset.manifest().videos[pending[slot]];
          PredictionRecord record;
          record.video_id = entry.id;
          record.true_label = model_label[static_cast<std::size_t>(entry.label)];
          record.label_name = dataset.manifest().labels.name(static_cast<std::size_t>(entry.label));
          record.condition = dataset.manifest().condition_of(entry);
          record.factors = entry.factors;
          record.model = handshake.name;
          try {
            const Video video = dataset.load_video(pending[slot]);
            if (!client) client.emplace(ModelClient::connect(endpoint, timeout));
            auto response = client->infer(InferRequest::from_video(video, options.features, entry.factors));
            record.scores = std::move(response.scores);
            record.features = std::move(response.features);
          } catch (const EndpointError& e) {
            record.error = e.what();
            client.reset();  // reconnect for the next video
          } catch (const DataError& e) {
            record.error = e.what();
          }
          std::lock_guard lock(mutex);
          journal << record_line(record) << '\n' << std::flush;
          if (record.ok()) {
            ++summary.inferred;
          } else {
            ++summary.failed;
            std::cerr << "evaluate: " << record.video_id << ": " << record.error << '\n';
          }
          fresh.push_back(std::move(record));
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  existing.insert(existing.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
  write_records(options.out, std::move(existing));
  return summary;
}

// --- report ----------------------------------------------------------------

ReportMode parse_report_mode(const std::string& name) {
  if (name == "image") return ReportMode::image;
  if (name == "semantic") return ReportMode::semantic;
  if (name == "sweep") return ReportMode::sweep;
  throw ConfigError("unknown report mode '" + name + "'");
}

namespace {

json report_image(const std::vector<PredictionRecord>& records, const fs::path& out) {
  std::map<std::string, std::vector<PredictionRecord>> groups;
  std::size_t failed = 0;
  for (const auto& r : records) {
    const auto k = r.condition.kind == Condition::Kind::sweep ? Condition::Kind::original : r.condition.kind;
    if (k != Condition::Kind::original && k != Condition::Kind::transformed) {
      throw DataError("image report cannot mix in condition '" + r.condition.label() + "' (record '" + r.video_id + "')");
    }
    if (!r.ok()) {
      ++failed;
      continue;
    }
    groups[k == Condition::Kind::original ? "original" : r.condition.name].push_back(r);
  }
  std::string csv = "condition,n,top1,top5\n";
  json rows = json::array();
  std::vector<std::string> order;
  if (groups.contains("original")) order.push_back("original");
  for (const auto& [name, group] : groups)
    if (name != "original") order.push_back(name);
  for (const auto& name : order) {
    const auto& group = groups.at(name);
    const std::size_t k5 = std::min<std::size_t>(5, group.front().scores.size());
    const double t1 = topk_accuracy(group, 1);
    const double t5 = topk_accuracy(group, k5);
    csv += name + "," + std::to_string(group.size()) + "," + fixed(t1) + "," + fixed(t5) + "\n";
    rows.push_back({{"condition", name}, {"n", group.size()}, {"top1", t1}, {"top5", t5}});
  }
  write_text(out / "image_table.csv", csv);
  return {{"mode", "image"}, {"rows", rows}, {"failed_records", failed}};
}

json report_semantic(const std::vector<PredictionRecord>& records, const ReportConfig& settings, const fs::path& out) {
  const auto metrics = per_class_metrics(records);
  std::string csv = "class_id,label,n_videos,acc_o,acc_f,acc_b,cr_f,cr_b,regime\n";
  json classes = json::array();
  std::map<std::string, std::size_t> counts{
      {"foreground_reliant", 0}, {"background_reliant", 0}, {"mixed", 0}};
  std::vector<std::string> names;
  std::vector<double> crf, crb;
  for (const auto& m : metrics.classes) {
    const std::string regime = regime_name(classify_regime(m.cr_f, m.cr_b, settings.thresholds));
    ++counts[regime];
    const std::string label = m.label_name.empty() ? std::to_string(m.class_id) : m.label_name;
    csv += std::to_string(m.class_id) + "," + label + "," + std::to_string(m.n_videos) + "," + fixed(m.acc_o) + "," +
           fixed(m.acc_f) + "," + fixed(m.acc_b) + "," + fixed(m.cr_f) + "," + fixed(m.cr_b) + "," + regime + "\n";
    classes.push_back({{"class_id", m.class_id}, {"label", label},   {"n_videos", m.n_videos}, {"acc_o", m.acc_o},
                       {"acc_f", m.acc_f},       {"acc_b", m.acc_b}, {"cr_f", m.cr_f},         {"cr_b", m.cr_b},
                       {"regime", regime}});
    names.push_back(label);
    crf.push_back(m.cr_f);
    crb.push_back(m.cr_b);
  }
  write_text(out / "class_metrics.csv", csv);
  write_text(out / "cr_bars.svg", svg::bar_plot("Accuracy changing rates (sorted by CR_f)", names, {"CR_f", "CR_b"}, {crf, crb}));
  return {{"mode", "semantic"},
          {"classes", classes},
          {"excluded_classes", metrics.excluded},
          {"regime_counts", counts},
          {"thresholds", {{"tau_lo", settings.thresholds.lo}, {"tau_hi", settings.thresholds.hi}}}};
}

json report_sweep(const std::vector<PredictionRecord>& records, const ReportConfig& settings, const fs::path& out) {
  // (factor, series, true label) -> records
  std::map<std::tuple<std::string, std::string, int>, std::vector<PredictionRecord>> groups;
  for (const auto& r : records) {
    if (r.condition.kind != Condition::Kind::sweep) {
      throw DataError("sweep report cannot mix in condition '" + r.condition.label() + "' (record '" + r.video_id + "')");
    }
    groups[{r.condition.factor, r.condition.series, r.true_label}].push_back(r);
  }
  json curves = json::array();
  json embeddings = json::array();
  std::size_t index = 0;
  for (const auto& [key, group] : groups) {
    const auto& [factor, series, label] = key;
    const SweepCurve curve = build_curve(group, label);
    const std::size_t window = std::min(settings.smoothing_window, curve.xs.size() - (curve.xs.size() % 2 == 0 ? 1 : 0));
    const CurveStats stats = curve_stats(curve, std::max<std::size_t>(1, window));
    const std::string stem = "curve_" + index_suffix(index);
    curves.push_back({{"factor", factor},
                      {"series", series},
                      {"class_id", label},
                      {"label", curve.label_name},
                      {"appearance_id", curve.appearance_id},
                      {"model", curve.model},
                      {"xs", curve.xs},
                      {"ys", curve.ys},
                      {"smoothing_window", window},
                      {"stats",
                       {{"peaks", stats.peaks}, {"valleys", stats.valleys}, {"min", stats.min}, {"max", stats.max},
                        {"mean", stats.mean}}},
                      {"svg", stem + ".svg"}});
    std::vector<double> marks = stats.peaks;
    marks.insert(marks.end(), stats.valleys.begin(), stats.valleys.end());
    write_text(out / (stem + ".svg"),
               svg::line_plot(series + " / " + curve.label_name, factor, "score", {{curve.label_name, curve.xs, curve.ys}},
                              marks));

    // PCA over every feature tag carried by all successful records.
    std::vector<const PredictionRecord*> ok;
    for (const auto& r : group)
      if (r.ok()) ok.push_back(&r);
    std::sort(ok.begin(), ok.end(), [](auto* a, auto* b) { return a->condition.value < b->condition.value; });
    if (ok.size() >= 2) {
      std::set<std::string> tags;
      for (const auto& [tag, t] : ok.front()->features) tags.insert(tag);
      for (const auto& tag : tags) {
        const std::size_t m = ok.front()->features.at(tag).values.size();
        const bool complete = m > 0 && std::all_of(ok.begin(), ok.end(), [&](auto* r) {
          const auto it = r->features.find(tag);
          return it != r->features.end() && it->second.values.size() == m;
        });
        if (!complete) continue;
        Eigen::MatrixXd samples(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < ok.size(); ++i) {
          const auto& v = ok[i]->features.at(tag).values;
          for (std::size_t j = 0; j < m; ++j) samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
        }
        const std::size_t d = std::min({settings.pca_dims, ok.size() - 1, m});
        const PcaEmbedding emb = pca(samples, d);
        json coords = json::array();
        std::vector<double> xs;
        for (Eigen::Index i = 0; i < emb.coords.rows(); ++i) {
          json row = json::array();
          for (Eigen::Index c = 0; c < emb.coords.cols(); ++c) row.push_back(emb.coords(i, c));
          coords.push_back(row);
          xs.push_back(ok[static_cast<std::size_t>(i)]->condition.value);
        }
        json entry{{"factor", factor},
                   {"series", series},
                   {"class_id", label},
                   {"tag", tag},
                   {"xs", xs},
                   {"coords", coords},
                   {"explained_variance", std::vector<double>(emb.explained_variance.data(),
                                                              emb.explained_variance.data() + emb.explained_variance.size())},
                   {"rank_deficient", emb.rank_deficient}};
        if (factor == "azimuth" && emb.coords.rows() >= 3 && emb.coords.cols() > 0) {
          try {
            entry["loop_closure"] = loop_closure(emb);
          } catch (const DataError&) {
            entry["loop_closure"] = nullptr;
          }
        }
        std::vector<std::string> panels;
        const auto k = emb.coords.cols();
        for (Eigen::Index a = 0; a < k; ++a) {
          for (Eigen::Index b = a + 1; b < k; ++b) {
            std::vector<double> pa(static_cast<std::size_t>(emb.coords.rows())), pb(pa.size());
            for (Eigen::Index i = 0; i < emb.coords.rows(); ++i) {
              pa[static_cast<std::size_t>(i)] = emb.coords(i, a);
              pb[static_cast<std::size_t>(i)] = emb.coords(i, b);
            }
            const std::string xa = "PC" + std::to_string(a + 1), yb = "PC" + std::to_string(b + 1);
            panels.push_back(svg::scatter_plot(tag + " " + xa + "-" + yb, xa, yb, pa, pb));
          }
        }
        if (!panels.empty()) {
          const std::string file = "pca_" + index_suffix(index) + "_" + tag + ".svg";
          write_text(out / file, svg::panels(panels));
          entry["svg"] = file;
        }
        embeddings.push_back(std::move(entry));
      }
    }
    ++index;
  }
  write_text(out / "curves.json", curves.dump(2) + "\n");
  if (!embeddings.empty()) write_text(out / "embeddings.json", embeddings.dump(2) + "\n");
  return {{"mode", "sweep"}, {"curves", curves}, {"embeddings", embeddings}};
}

}  // namespace

json cmd_report(const ReportOptions& options) {
  if (options.records.empty()) throw ConfigError("report needs at least one record file");
  std::vector<PredictionRecord> records;
  for (const auto& path : options.records) {
    auto part = read_records(path);
    records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (records.empty()) throw DataError("record files contain no records");
  sort_by_video_id(records);
  std::error_code ec;
  fs::create_directories(options.out, ec);
  if (ec) throw DataError("cannot create '" + options.out.string() + "': " + ec.message());

  json summary;
  switch (options.mode) {
    case ReportMode::image:
      summary = report_image(records, options.out);
      break;
    case ReportMode::semantic:
      summary = report_semantic(records, options.settings, options.out);
      break;
    case ReportMode::sweep:
      summary = report_sweep(records, options.settings, options.out);
      break;
  }
  write_text(options.out / "report.json", summary.dump(2) + "\n");
  return summary;
}

// --- mock ------------------------------------------------------------------

std::vector<std::string> parse_label_list(const std::string& text) {
  if (fs::is_regular_file(text)) {
    std::ifstream in(text, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string body = ss.str();
    if (fs::path(text).extension() == ".json") {
      const json j = json::parse(body, nullptr, false);
      if (j.is_discarded()) throw ConfigError("labels file '" + text + "' is not valid JSON");
      try {
        return j.is_array() ? j.get<std::vector<std::string>>() : j.at("labels").get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw ConfigError("labels file '" + text + "': " + e.what());
      }
    }
    std::vector<std::string> out;
    std::istringstream lines(body);
    for (std::string line; std::getline(lines, line);) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
    return out;
  }
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool cmd_mock(const MockOptions& options) {
  const MockModel model(LabelSpace(options.labels), options.mode, options.seed);
  if (options.tcp_port) {
    serve_tcp(*options.tcp_port, model, 0, [](std::uint16_t port) { std::cerr << "mock listening on " << port << '\n'; });
    return true;
  }
  return serve_stdio(model);
}

}  // namespace ipt
