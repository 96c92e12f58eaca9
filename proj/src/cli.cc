// Copyright 2026 The LidarFuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lidarfuse/cli.h"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "lidarfuse/errors.h"
#include "lidarfuse/evaluation.h"
#include "lidarfuse/fusion.h"
#include "lidarfuse/kernels/kernels.h"
#include "lidarfuse/parallel.h"
#include "lidarfuse/pseudo_supervision.h"
#include "lidarfuse/sampling.h"
#include "lidarfuse/scene_io.h"
#include "lidarfuse/surfel_estimation.h"
#include "lidarfuse/synth.h"

namespace lidarfuse {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Flag errors detected after parsing; reported as usage errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  int threads = 0;
  std::string summary_path;
  std::string kernels = "auto";
};

struct SceneInputs {
  std::string scene_dir;
  std::string config_path;
  std::string surfels_path;
};

const kernels::KernelSet& SelectKernels(const std::string& name) {
  if (name == "auto") return kernels::ActiveKernels();
  for (const kernels::KernelSet* k : kernels::AvailableKernels()) {
    if (k->name == name) return *k;
  }
  throw UsageError("kernel set '" + name + "' is not available on this CPU");
}

struct LoadedScene {
  SceneBundle bundle;
  FusionConfig config;
  std::optional<SpatialIndex> index;
  std::vector<Surfel> surfels;
};

FusionConfig LoadConfig(const std::string& path) {
  if (path.empty()) return FusionConfig();
  FusionConfig config = ReadFusionConfig(path);
  if (!config.taxonomy_path.empty() &&
      fs::path(config.taxonomy_path).is_relative()) {
    config.taxonomy_path =
        (fs::path(path).parent_path() / config.taxonomy_path).string();
  }
  return config;
}

SceneBundle LoadScene(const std::string& dir, const FusionConfig& config) {
  if (!fs::is_directory(dir)) {
    throw IoError("scene directory not found: " + dir);
  }
  SceneBundle bundle = ReadScene(dir);
  if (!config.taxonomy_path.empty()) {
    bundle.taxonomy = ReadTaxonomy(config.taxonomy_path);
    const auto violations = ValidateScene(bundle);
    if (!violations.empty()) {
      throw Error(config.taxonomy_path + ": " + violations[0].message);
    }
  }
  return bundle;
}

LoadedScene Load(const SceneInputs& in, int threads) {
  LoadedScene s;
  s.config = LoadConfig(in.config_path);
  s.bundle = LoadScene(in.scene_dir, s.config);
  s.index.emplace(SpatialIndex::FromPoints(s.bundle.points));
  if (!in.surfels_path.empty()) {
    s.surfels = ReadSurfels(in.surfels_path);
    if (s.surfels.size() != s.bundle.points.size()) {
      throw Error(in.surfels_path + ": " + std::to_string(s.surfels.size()) +
                  " surfels for " + std::to_string(s.bundle.points.size()) +
                  " points");
    }
  } else {
    s.surfels =
        EstimateAllSurfels(s.bundle.points, *s.index, s.config.surfels, threads);
  }
  return s;
}

Json ParamsJson(const FusionParams& p) {
  return Json{{"delta_t_max", p.delta_t_max},
              {"tau", p.tau},
              {"dilation_k", p.dilation_k},
              {"d_max", p.d_max},
              {"delta_t_thresh", p.delta_t_thresh}};
}

void AddSceneOptions(CLI::App* cmd, SceneInputs* in, bool with_surfels) {
  cmd->add_option("--scene", in->scene_dir, "Scene directory")->required();
  cmd->add_option("--config", in->config_path, "Fusion config JSON");
  if (with_surfels) {
    cmd->add_option("--surfels", in->surfels_path,
                    "Precomputed surfel CSV (estimated when omitted)");
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Lidar/camera semantic label fusion", "lidarfuse"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--threads", common.threads,
                 "Worker threads (default: available parallelism)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--summary", common.summary_path,
                 "Write a JSON run summary to this path");
  app.add_option("--kernels", common.kernels,
                 "Kernel set: auto, scalar or avx2");
  Json summary;
  std::function<void()> action;

  // surfels
  SceneInputs surfels_in;
  std::string surfels_out;
  auto* surfels_cmd = app.add_subcommand("surfels", "Estimate surfels");
  AddSceneOptions(surfels_cmd, &surfels_in, false);
  surfels_cmd->add_option("--out", surfels_out, "Surfel CSV")->required();
  surfels_cmd->callback([&] {
    action = [&] {
      const LoadedScene s = Load(surfels_in, common.threads);
      WriteSurfels(surfels_out, s.surfels);
      summary["points"] = s.surfels.size();
      summary["outputs"] = Json{{"surfels", surfels_out}};
    };
  });

  // fuse
  SceneInputs fuse_in;
  std::string fuse_pass = "features", fuse_out, counts_out, weights_out;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse labels into points");
  AddSceneOptions(fuse_cmd, &fuse_in, true);
  fuse_cmd->add_option("--pass", fuse_pass, "supervision or features")
      ->check(CLI::IsMember({"supervision", "features"}));
  fuse_cmd->add_option("--out", fuse_out, "Per-point label file")->required();
  fuse_cmd->add_option("--counts", counts_out,
                       "Per-point correspondence count CSV");
  fuse_cmd->add_option("--weights", weights_out, "Per-point total weight CSV");
  fuse_cmd->callback([&] {
    action = [&] {
      const LoadedScene s = Load(fuse_in, common.threads);
      const bool supervision = fuse_pass == "supervision";
      const FusionParams& params =
          supervision ? s.config.supervision : s.config.features;
      FusionOptions options;
      options.threads = common.threads;
      options.index = &*s.index;
      options.kernel_set = &SelectKernels(common.kernels);
      const PointLabeling labels =
          Fuse(s.bundle, s.surfels, params,
               !supervision && s.config.fill_features, options);
      WriteLabels(fuse_out, labels.categories);
      Json outputs{{"labels", fuse_out}};
      if (!counts_out.empty()) {
        std::string text = "vote_count\n";
        for (std::uint32_t c : labels.vote_count) {
          text += std::to_string(c) + "\n";
        }
        WriteTextFile(counts_out, text);
        outputs["counts"] = counts_out;
      }
      if (!weights_out.empty()) {
        std::string text = "total_weight\n";
        for (double w : labels.total_weight) text += FormatDouble(w) + "\n";
        WriteTextFile(weights_out, text);
        outputs["weights"] = weights_out;
      }
      summary["pass"] = fuse_pass;
      summary["params"] = ParamsJson(params);
      summary["points"] = labels.size();
      summary["labeled"] = labels.CountLabeled();
      summary["direct"] = labels.CountDirect();
      summary["outputs"] = outputs;
    };
  });

  // supervise
  SceneInputs sup_in;
  std::string records_out, audit_out;
  auto* sup_cmd = app.add_subcommand(
      "supervise", "Run both passes and emit training records");
  AddSceneOptions(sup_cmd, &sup_in, true);
  sup_cmd->add_option("--out", records_out, "Records CSV")->required();
  sup_cmd->add_option("--audit", audit_out, "Coupling audit JSON");
  sup_cmd->callback([&] {
    action = [&] {
      const LoadedScene s = Load(sup_in, common.threads);
      FusionOptions options;
      options.threads = common.threads;
      options.index = &*s.index;
      options.kernel_set = &SelectKernels(common.kernels);
      const SupervisionResult result = GenerateTrainingRecords(
          s.bundle, s.surfels, s.config.features, s.config.supervision,
          s.config.fill_features, options);
      for (const std::string& w : result.warnings) err << "warning: " << w
                                                       << "\n";
      WriteRecords(records_out, result.records);
      const CouplingAudit audit = AuditCoupling(result.records);
      Json outputs{{"records", records_out}};
      if (!audit_out.empty()) {
        WriteTextFile(audit_out, AuditToJson(audit));
        outputs["audit"] = audit_out;
      }
      summary["points"] = audit.point_count;
      summary["supervised"] = audit.supervised;
      summary["sparsity"] = audit.sparsity;
      summary["agreement_rate"] =
          audit.agreement_rate ? Json(*audit.agreement_rate) : Json(nullptr);
      summary["warnings"] = result.warnings;
      summary["outputs"] = outputs;
    };
  });

  // sample
  std::string candidates_path, sample_out;
  bool histogram_input = false, no_prefilter = false;
  SamplingParams sampling;
  auto* sample_cmd =
      app.add_subcommand("sample", "Greedy diversity selection of scenes");
  sample_cmd->add_option("--candidates", candidates_path,
                         "CSV of id,bit0,bit1,... (or id,count0,... with "
                         "--histogram)")
      ->required();
  sample_cmd->add_flag("--histogram", histogram_input,
                       "Candidate rows are per-category pixel counts");
  sample_cmd->add_option("--n", sampling.n, "Selection size")
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--p-min", sampling.p_min_fraction,
                         "Presence threshold as a pixel fraction")
      ->check(CLI::Range(0.0, 1.0));
  sample_cmd->add_option("--rarity-percentile", sampling.rarity_percentile,
                         "Rare-category quantile in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  sample_cmd->add_flag("--no-prefilter", no_prefilter,
                       "Skip the rare-category prefilter");
  sample_cmd->add_option("--out", sample_out, "Selection CSV")->required();
  sample_cmd->callback([&] {
    action = [&] {
      try {
        CheckSamplingParams(sampling);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      const auto candidates =
          ReadClassVectors(candidates_path, histogram_input, sampling);
      PrefilterResult pre;
      if (no_prefilter) {
        pre.kept = candidates;
        pre.unfiltered = true;
      } else if (!candidates.empty()) {
        pre = PrefilterRare(candidates, sampling);
      }
      const GreedyResult result = GreedySelect(pre.kept, sampling.n);
      WriteSelection(sample_out, result);
      summary["candidates"] = candidates.size();
      summary["prefiltered"] = pre.kept.size();
      summary["unfiltered"] = pre.unfiltered;
      summary["selected"] = result.selected;
      summary["energy"] =
          result.energies.empty() ? 0.0 : result.energies.back();
      summary["outputs"] = Json{{"selection", sample_out}};
    };
  });

  // eval
  std::vector<std::string> preds, gts;
  std::string taxonomy_path, eval_out, eval_text;
  std::uint64_t min_points = 1000;
  std::size_t min_scenes = 3;
  auto* eval_cmd = app.add_subcommand("eval", "Per-point mIoU evaluation");
  eval_cmd->add_option("--pred", preds, "Predicted label file per scene")
      ->required();
  eval_cmd->add_option("--gt", gts, "Ground-truth label file per scene")
      ->required();
  eval_cmd->add_option("--taxonomy", taxonomy_path, "Taxonomy JSON")
      ->required();
  eval_cmd->add_option("--min-points", min_points,
                       "Inclusion: points per scene");
  eval_cmd->add_option("--min-scenes", min_scenes,
                       "Inclusion: qualifying scenes");
  eval_cmd->add_option("--out", eval_out, "Report JSON");
  eval_cmd->add_option("--text", eval_text,
                       "Report text (printed when omitted)");
  eval_cmd->callback([&] {
    action = [&] {
      if (preds.size() != gts.size()) {
        throw UsageError("--pred and --gt must be given the same number of "
                         "times");
      }
      const ClassTaxonomy taxonomy = ReadTaxonomy(taxonomy_path);
      ConfusionMatrix total(taxonomy.IdBound());
      std::vector<std::vector<std::uint64_t>> per_scene;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto pred = ReadLabels(preds[i]);
        const auto gt = ReadLabels(gts[i], pred.size());
        total += Accumulate(pred, gt, taxonomy);
        per_scene.push_back(CategoryCounts(gt, taxonomy.IdBound()));
      }
      std::set<CategoryId> included =
          IncludedCategories(per_scene, min_points, min_scenes);
      std::erase_if(included, [&](CategoryId c) {
        const TaxonomyEntry* e = taxonomy.Find(c);
        return e == nullptr || e->is_ignore;
      });
      EvaluationReport report;
      try {
        report = Summarize(total, included, taxonomy);
      } catch (const InvalidArgument& e) {
        throw Error(e.what());
      }
      const std::string text = ReportToText(report, taxonomy);
      Json outputs = Json::object();
      if (!eval_out.empty()) {
        WriteTextFile(eval_out, ReportToJson(report, taxonomy));
        outputs["report"] = eval_out;
      }
      if (!eval_text.empty()) {
        WriteTextFile(eval_text, text);
        outputs["text"] = eval_text;
      } else {
        out << text;
      }
      summary["miou"] = report.miou ? Json(*report.miou) : Json(nullptr);
      summary["included"] = included;
      summary["outputs"] = outputs;
    };
  });

  // synth
  std::string scenario_name, synth_out, profile = "fixture";
  std::uint64_t seed = 7;
  std::optional<double> speed, fill_fraction;
  std::optional<int> bleed_width;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic failure-case scene");
  synth_cmd->add_option("--scenario", scenario_name,
                        "mover_aliasing, occlusion_bleed or fence")
      ->required()
      ->check(CLI::IsMember({"mover_aliasing", "occlusion_bleed", "fence"}));
  synth_cmd->add_option("--seed", seed, "RNG seed");
  synth_cmd->add_option("--out", synth_out, "Output scene directory")
      ->required();
  synth_cmd->add_option("--profile", profile,
                        "fixture, or performance (3M points, 60 images)")
      ->check(CLI::IsMember({"fixture", "performance"}));
  synth_cmd->add_option("--object-speed", speed, "Mover speed, m/s");
  synth_cmd->add_option("--bleed-width", bleed_width, "Label bleed, pixels");
  synth_cmd->add_option("--fill-fraction", fill_fraction,
                        "Fence slat fill fraction");
  synth_cmd->callback([&] {
    action = [&] {
      const Scenario scenario = ParseScenario(scenario_name);
      SynthConfig config = SynthConfig::Default(scenario);
      if (profile == "performance") {
        if (scenario != Scenario::kMoverAliasing) {
          throw UsageError("--profile performance needs mover_aliasing");
        }
        config = SynthConfig::Performance();
      }
      config.rng_seed = seed;
      if (speed) config.object_speed = *speed;
      if (bleed_width) config.bleed_width_px = *bleed_width;
      if (fill_fraction) config.fence_fill_fraction = *fill_fraction;
      try {
        CheckSynthConfig(config);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      const SynthScene scene = Generate(config);
      WriteScene(scene.bundle, synth_out);
      const std::string gt_path = (fs::path(synth_out) / "gt_labels.csv")
                                      .string();
      WriteLabels(gt_path, scene.ground_truth);
      summary["scenario"] = scenario_name;
      summary["points"] = scene.bundle.points.size();
      summary["cameras"] = scene.bundle.cameras.size();
      summary["outputs"] = Json{{"scene", synth_out}, {"gt", gt_path}};
    };
  });

  // validate
  std::string validate_dir;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a scene directory");
  validate_cmd->add_option("--scene", validate_dir, "Scene directory")
      ->required();
  validate_cmd->callback([&] {
    action = [&] {
      const SceneBundle bundle = LoadScene(validate_dir, FusionConfig());
      out << "ok: " << bundle.points.size() << " points, "
          << bundle.cameras.size() << " cameras, "
          << bundle.taxonomy.entries().size() << " categories\n";
      summary["points"] = bundle.points.size();
      summary["cameras"] = bundle.cameras.size();
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kExitUsage;
  }

  if (common.threads == 0) common.threads = DefaultThreadCount();
  try {
    SelectKernels(common.kernels);
    summary["command"] = app.get_subcommands().front()->get_name();
    action();
    summary["exit_code"] = kExitOk;
    if (!common.summary_path.empty()) {
      WriteTextFile(common.summary_path, summary.dump(2) + "\n");
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace lidarfuse
