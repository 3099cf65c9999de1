#include "stunmix/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "stunmix/checkpoint.hpp"
#include "stunmix/dataset_csv.hpp"
#include "stunmix/error.hpp"
#include "stunmix/ingest.hpp"
#include "stunmix/io.hpp"
#include "stunmix/spatial_split.hpp"
#include "stunmix/synthgen.hpp"
#include "stunmix/trainer.hpp"

namespace stunmix {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidConfig:
        case ErrorKind::InvalidArgument:
        case ErrorKind::Io:
            return kExitUsage;
        default:
            return kExitData;
    }
}

struct Globals {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::string out_dir = ".";
};

/// Collects what a run read and wrote, for the manifest.
class Run {
public:
    Run(std::string command, const Globals& globals, std::ostream& out, std::ostream& err)
        : command_(std::move(command)), globals_(globals), out(out), err(err),
          start_(std::chrono::steady_clock::now()) {}

    fs::path output_path(const std::string& given) const {
        const fs::path p(given);
        return p.is_absolute() ? p : fs::path(globals_.out_dir) / p;
    }

    void write(const std::string& role, const std::string& given, std::string_view content) {
        const fs::path p = output_path(given);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        io::write_file_atomic(p, content);
        outputs_[role] = p.string();
    }

    std::string read(const std::string& role, const std::string& path) {
        inputs_[role] = path;
        return io::read_file(path);
    }

    void input(const std::string& role, const std::string& path) { inputs_[role] = path; }

    json& config() { return config_; }

    void finish(const std::vector<std::string>& args) {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json manifest = {
            {"command", command_},
            {"args", args},
            {"version", std::string(kVersion)},
            {"seed", globals_.seed},
            {"threads", globals_.threads},
            {"config", config_},
            {"inputs", inputs_},
            {"outputs", outputs_},
            {"duration_seconds", seconds},
        };
        const fs::path p = output_path("manifest_" + command_ + ".json");
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        io::write_file_atomic(p, manifest.dump(2) + "\n");
    }

    const Globals& globals() const { return globals_; }

private:
    std::string command_;
    Globals globals_;

public:
    std::ostream& out;
    std::ostream& err;

private:
    std::chrono::steady_clock::time_point start_;
    json config_ = json::object();
    json inputs_ = json::object();
    json outputs_ = json::object();
};

json config_json(std::string_view text) {
    json j = json::object();
    for (const auto& [k, v] : parse_key_values(text)) j[k] = v;
    return j;
}

std::string overrides_text(const std::vector<std::string>& sets) {
    std::string text;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(ErrorKind::InvalidConfig, "override '" + s + "' is not KEY=VALUE");
        text += s.substr(0, eq) + " = " + s.substr(eq + 1) + "\n";
    }
    return text;
}

std::string config_text(Run& run, const std::string& role, const std::string& path,
                        const std::vector<std::string>& sets) {
    std::string text;
    if (!path.empty()) {
        if (!fs::exists(path)) fail(ErrorKind::Io, role + " file not found: " + path);
        text = run.read(role, path) + "\n";
    }
    return text + overrides_text(sets);
}

Dataset read_dataset(Run& run, const std::string& path) {
    run.input("dataset", path);
    return load_dataset_csv(path);
}

DataSplit read_split(Run& run, const std::string& path, const Dataset& ds) {
    return parse_split_csv(run.read("split", path), ds);
}

ModelConfig model_for_dataset(const Dataset& ds, const std::string& text) {
    ModelConfig base;
    base.steps = ds.steps();
    base.bands = ds.bands();
    base.classes = ds.classes();
    return parse_model_config(text, base);
}

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string fmt(const std::optional<double>& v, int precision = 6) { return v ? fmt(*v, precision) : "NA"; }

void print_epoch(std::ostream& out, const HistoryRow& row, int total) {
    out << "epoch " << row.epoch + 1 << "/" << total << " lr=" << fmt(row.lr) << " train_loss=" << fmt(row.train_loss);
    if (row.test_mae) out << " test_mae=" << fmt(row.test_mae) << " test_cc=" << fmt(row.test_cc);
    out << "\n" << std::flush;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string out = "dataset.csv";
    std::string endmembers;
};

int cmd_synth(Run& run, const SynthArgs& a) {
    SceneConfig cfg = parse_scene_config(config_text(run, "config", a.config, a.sets));
    if (run.globals().seed_set) cfg.seed = run.globals().seed;
    run.config() = config_json(format_scene_config(cfg));
    const synth::Scene scene = synth::gen_scene(cfg);
    run.write("dataset", a.out, format_dataset_csv(scene.dataset));
    std::string em = a.endmembers;
    if (em.empty()) em = fs::path(a.out).replace_extension(".endmembers.txt").string();
    run.write("endmembers", em, synth::format_endmembers(scene.endmembers));
    run.out << "wrote " << scene.dataset.size() << " samples (K=" << cfg.classes << " T=" << cfg.steps
            << " B=" << cfg.bands << ") to " << run.output_path(a.out).string() << "\n";
    return kExitOk;
}

struct SplitArgs {
    std::string dataset;
    int block_w = kDefaultBlockWidth;
    int block_h = kDefaultBlockHeight;
    double ratio = kDefaultTrainRatio;
    std::string out = "split.csv";
};

int cmd_split(Run& run, const SplitArgs& a) {
    const Dataset ds = read_dataset(run, a.dataset);
    run.config() = {{"block_w", a.block_w}, {"block_h", a.block_h}, {"ratio", a.ratio}};
    const BlockAssignment asg = block_split(ds, a.block_w, a.block_h, a.ratio, run.globals().seed);
    run.write("split", a.out, format_split_csv(ds, asg));
    const DataSplit split = asg.split();
    run.out << asg.train_blocks() << "/" << asg.block_labels.size() << " blocks to train; " << split.train.size()
            << " train and " << split.test.size() << " test samples\n";
    return kExitOk;
}

struct TrainArgs {
    std::string dataset;
    std::string split;
    std::string model_config;
    std::vector<std::string> model_sets;
    std::string train_config;
    std::vector<std::string> sets;
    std::string out = "model.ckpt";
    std::string history = "history.csv";
    std::string resume;
    std::string init_from;
    std::optional<int> stop_after;
    bool quiet = false;
};

int cmd_train(Run& run, const TrainArgs& a) {
    const Dataset ds = read_dataset(run, a.dataset);
    const DataSplit split = read_split(run, a.split, ds);

    TrainOptions opt;
    opt.threads = run.globals().threads;
    opt.stop_after_epochs = a.stop_after;

    Checkpoint ckpt;
    if (!a.resume.empty()) {
        if (!a.model_config.empty() || !a.train_config.empty() || !a.model_sets.empty() || !a.sets.empty() ||
            !a.init_from.empty()) {
            fail(ErrorKind::InvalidArgument, "--resume takes its configuration from the checkpoint");
        }
        run.input("resume", a.resume);
        Checkpoint prev = load_checkpoint(a.resume);
        ckpt.train = prev.train;
        if (!a.quiet) opt.on_epoch = [&](const HistoryRow& r) { print_epoch(run.out, r, ckpt.train.epochs); };
        ckpt.state = resume_training(ds, split, ckpt.train, std::move(prev.state), opt);
    } else {
        const ModelConfig model = model_for_dataset(ds, config_text(run, "model_config", a.model_config, a.model_sets));
        ckpt.train = parse_train_config(config_text(run, "train_config", a.train_config, a.sets));
        if (run.globals().seed_set) ckpt.train.seed = run.globals().seed;
        std::optional<Checkpoint> warm;
        if (!a.init_from.empty()) {
            run.input("init_from", a.init_from);
            warm = load_checkpoint(a.init_from);
            if (format_model_config(warm->model()) != format_model_config(model)) {
                fail(ErrorKind::InvalidConfig, "--init-from checkpoint has a different model configuration");
            }
        }
        if (!a.quiet) opt.on_epoch = [&](const HistoryRow& r) { print_epoch(run.out, r, ckpt.train.epochs); };
        ckpt.state = train(ds, split, model, ckpt.train, opt, warm ? &warm->state.params : nullptr);
    }
    run.config() = {{"model", config_json(format_model_config(ckpt.model()))},
                    {"train", config_json(format_train_config(ckpt.train))}};
    run.write("checkpoint", a.out, encode_checkpoint(ckpt));
    run.write("history", a.history, format_history_csv(ckpt.state.history));
    run.out << "trained " << ckpt.state.epochs_done << "/" << ckpt.train.epochs << " epochs; checkpoint "
            << run.output_path(a.out).string() << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string checkpoint;
    std::string dataset;
    std::string split;
    std::string predictor = "model";
    std::string out = "report.csv";
    std::string scatter = "scatter.csv";
};

int cmd_eval(Run& run, const EvalArgs& a) {
    const Dataset ds = read_dataset(run, a.dataset);
    const DataSplit split = read_split(run, a.split, ds);
    if (split.test.empty()) fail(ErrorKind::EmptyTestSet, "split has no test samples");
    run.config() = {{"predictor", a.predictor}};

    Evaluation ev;
    if (a.predictor == "model") {
        if (a.checkpoint.empty()) fail(ErrorKind::InvalidArgument, "--checkpoint is required for the model predictor");
        run.input("checkpoint", a.checkpoint);
        const Checkpoint ckpt = load_checkpoint(a.checkpoint);
        ev = evaluate(ckpt.state.params, ckpt.state.norm, ds, split, run.globals().threads);
    } else if (a.predictor == "oracle") {
        Matrix refs(ds.classes(), static_cast<Eigen::Index>(split.test.size()));
        for (std::size_t j = 0; j < split.test.size(); ++j) {
            refs.col(static_cast<Eigen::Index>(j)) = ds[split.test[j]].reference.values;
        }
        ev = evaluate_predictions(ds, split.test, refs);
    } else if (a.predictor == "train-mean") {
        ev = evaluate_predictions(ds, split.test, mean_abundance_predictions(ds, split));
    } else {
        fail(ErrorKind::InvalidArgument, "unknown predictor '" + a.predictor + "'");
    }
    for (const auto& w : ev.report.warnings) run.err << "warning: " << w << "\n";
    run.write("report", a.out, metrics::format_report_csv(ev.report));
    run.write("scatter", a.scatter, metrics::format_scatter_csv(ev.refs, ev.preds, ds.legend()));
    run.out << metrics::format_report_table(ev.report);
    return kExitOk;
}

struct AnnotateArgs {
    std::string raster;
    int factor = ingest::kDefaultAggregationFactor;
    std::string out = "abundances.csv";
};

int cmd_annotate(Run& run, const AnnotateArgs& a) {
    run.input("raster", a.raster);
    run.config() = {{"factor", a.factor}};
    const ingest::LabelRaster raster = ingest::load_label_raster(a.raster);
    const ingest::AbundanceGrid grid = ingest::aggregate_abundances(raster, a.factor);
    run.write("abundances", a.out, ingest::format_abundance_grid_csv(grid));
    const auto excluded = std::count(grid.excluded.begin(), grid.excluded.end(), true);
    run.out << grid.width << "x" << grid.height << " coarse cells, " << excluded << " excluded as all NO_DATA\n";
    return kExitOk;
}

ModelConfig gradcheck_default_config() {
    ModelConfig c;
    c.steps = 3;
    c.bands = 2;
    c.hidden = 3;
    c.anc_hidden = 2;
    c.classes = 3;
    return c;
}

struct GradCheckArgs {
    std::string model_config;
    std::vector<std::string> model_sets;
    double eps = 1e-5;
    double tol = 1e-4;
    int samples = 2;
    bool corrupt = false;
};

int cmd_gradcheck(Run& run, const GradCheckArgs& a) {
    const ModelConfig model =
        parse_model_config(config_text(run, "model_config", a.model_config, a.model_sets), gradcheck_default_config());
    if (a.samples < 1) fail(ErrorKind::InvalidArgument, "--samples must be at least 1");
    if (!(a.eps > 0.0)) fail(ErrorKind::InvalidArgument, "--eps must be positive");
    run.config() = {{"model", config_json(format_model_config(model))},
                    {"eps", a.eps},
                    {"tol", a.tol},
                    {"samples", a.samples},
                    {"corrupt_backward", a.corrupt}};
    const GradCheckInstance inst = make_gradcheck_instance(model, run.globals().seed, a.samples);
    std::vector<const Sample*> ptrs;
    for (const auto& s : inst.samples) ptrs.push_back(&s);
    GradCheckOptions opt;
    opt.eps = a.eps;
    opt.threads = run.globals().threads;
    opt.corrupt_backward = a.corrupt;
    const GradCheckResult r = grad_check(inst.params, ptrs, opt);
    run.out << "max_rel_error=" << fmt(r.max_rel_error, 6) << " worst=" << r.worst_param << "[" << r.worst_index
            << "] checked=" << r.checked << " eps=" << fmt(a.eps) << "\n";
    if (!(r.max_rel_error < a.tol)) {
        throw VerificationFailed("gradient check failed: max relative error " + fmt(r.max_rel_error) +
                                 " is not below " + fmt(a.tol));
    }
    return kExitOk;
}

struct AblateArgs {
    std::string dataset;
    std::string split;
    std::string model_config;
    std::vector<std::string> model_sets;
    std::string train_config;
    std::vector<std::string> sets;
    std::vector<std::uint64_t> seeds;
    std::string out = "ablation.csv";
    std::string runs = "ablation_runs.csv";
};

int cmd_ablate(Run& run, const AblateArgs& a) {
    const Dataset ds = read_dataset(run, a.dataset);
    const DataSplit split = read_split(run, a.split, ds);
    if (split.test.empty()) fail(ErrorKind::EmptyTestSet, "split has no test samples");
    ModelConfig model = model_for_dataset(ds, config_text(run, "model_config", a.model_config, a.model_sets));
    TrainConfig train_cfg = parse_train_config(config_text(run, "train_config", a.train_config, a.sets));
    std::vector<std::uint64_t> seeds = a.seeds;
    if (seeds.empty()) {
        const std::uint64_t s0 = run.globals().seed_set ? run.globals().seed : train_cfg.seed;
        seeds = {s0, s0 + 1, s0 + 2};
    }
    run.config() = {{"model", config_json(format_model_config(model))},
                    {"train", config_json(format_train_config(train_cfg))},
                    {"seeds", seeds}};

    const std::vector<std::string> names = {"MAE", "RMSE", "RRMSE", "CC", "F1"};
    std::string runs_csv = "ancillary,seed,MAE,RMSE,RRMSE,CC,F1\n";
    std::string table_csv = "ancillary,seeds,MAE,RMSE,RRMSE,CC,F1\n";
    run.out << "ancillary    MAE(%)   RMSE(%)  RRMSE(%) CC       F1\n";
    for (AncillaryUse use : {AncillaryUse::None, AncillaryUse::Geo, AncillaryUse::Clim, AncillaryUse::Both}) {
        model.use_ancillary = use;
        std::vector<std::vector<double>> values(names.size());
        for (std::uint64_t seed : seeds) {
            TrainConfig cfg = train_cfg;
            cfg.seed = seed;
            TrainOptions opt;
            opt.threads = run.globals().threads;
            opt.evaluate_test = false;
            const TrainState st = train(ds, split, model, cfg, opt);
            const Evaluation ev = evaluate(st.params, st.norm, ds, split, run.globals().threads);
            const auto& r = ev.report;
            const std::vector<std::optional<double>> row = {r.macro_mae, r.macro_rmse, r.macro_rrmse, r.macro_cc,
                                                            r.macro_f1};
            runs_csv += std::string(to_string(use)) + "," + std::to_string(seed);
            for (std::size_t i = 0; i < row.size(); ++i) {
                runs_csv += "," + metrics::format_metric(row[i]);
                if (row[i]) values[i].push_back(*row[i]);
            }
            runs_csv += "\n";
            run.err << "ablate " << to_string(use) << " seed " << seed << ": MAE=" << fmt(r.macro_mae) << "\n";
        }
        table_csv += std::string(to_string(use)) + "," + std::to_string(seeds.size());
        char line[160];
        std::vector<std::optional<double>> means;
        for (const auto& v : values) {
            std::optional<double> m;
            if (!v.empty()) {
                double s = 0.0;
                for (double x : v) s += x;
                m = s / static_cast<double>(v.size());
            }
            table_csv += "," + metrics::format_metric(m);
            means.push_back(m);
        }
        table_csv += "\n";
        auto pct = [](const std::optional<double>& v) { return v ? fmt(100.0 * *v, 4) : std::string("NA"); };
        std::snprintf(line, sizeof line, "%-12s %-8s %-8s %-8s %-8s %-8s\n", std::string(to_string(use)).c_str(),
                      pct(means[0]).c_str(), pct(means[1]).c_str(), pct(means[2]).c_str(), fmt(means[3], 4).c_str(),
                      fmt(means[4], 4).c_str());
        run.out << line << std::flush;
    }
    run.write("table", a.out, table_csv);
    run.write("runs", a.runs, runs_csv);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Blind spectral unmixing of class abundances from multispectral time series", "stunmix"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (overrides any seed in config files)");
    app.add_option("--threads", g.threads, "Worker threads; 1 gives bitwise-reproducible runs")
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "Directory for relative output paths and the run manifest");

    SynthArgs synth_a;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic linear-mixing scene");
    synth->add_option("--config", synth_a.config, "Scene config file (key = value)");
    synth->add_option("--set", synth_a.sets, "Config override KEY=VALUE, repeatable");
    synth->add_option("--out", synth_a.out, "Dataset CSV path")->capture_default_str();
    synth->add_option("--endmembers", synth_a.endmembers, "Endmember sidecar path (default: next to --out)");

    SplitArgs split_a;
    auto* split = app.add_subcommand("split", "Spatial block train/test split");
    split->add_option("--dataset", split_a.dataset, "Dataset CSV")->required();
    split->add_option("--block-w", split_a.block_w, "Block width in pixels")->capture_default_str();
    split->add_option("--block-h", split_a.block_h, "Block height in pixels")->capture_default_str();
    split->add_option("--ratio", split_a.ratio, "Fraction of blocks assigned to train")->capture_default_str();
    split->add_option("--out", split_a.out, "Split CSV path")->capture_default_str();

    TrainArgs train_a;
    auto* train_cmd = app.add_subcommand("train", "Train the unmixing network");
    train_cmd->add_option("--dataset", train_a.dataset, "Dataset CSV")->required();
    train_cmd->add_option("--split", train_a.split, "Split CSV")->required();
    train_cmd->add_option("--model-config", train_a.model_config, "Model config file");
    train_cmd->add_option("--model-set", train_a.model_sets, "Model config override KEY=VALUE, repeatable");
    train_cmd->add_option("--train-config", train_a.train_config, "Training config file");
    train_cmd->add_option("--set", train_a.sets, "Training config override KEY=VALUE, repeatable");
    train_cmd->add_option("--out", train_a.out, "Checkpoint path")->capture_default_str();
    train_cmd->add_option("--history", train_a.history, "History CSV path")->capture_default_str();
    train_cmd->add_option("--resume", train_a.resume, "Continue from this checkpoint");
    train_cmd->add_option("--init-from", train_a.init_from, "Initialize weights from this checkpoint");
    train_cmd->add_option("--stop-after-epoch", train_a.stop_after, "Stop once this many epochs are complete")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_flag("--quiet", train_a.quiet, "Do not print per-epoch progress");

    EvalArgs eval_a;
    auto* eval = app.add_subcommand("eval", "Score predictions on the test split");
    eval->add_option("--checkpoint", eval_a.checkpoint, "Checkpoint (model predictor)");
    eval->add_option("--dataset", eval_a.dataset, "Dataset CSV")->required();
    eval->add_option("--split", eval_a.split, "Split CSV")->required();
    eval->add_option("--predictor", eval_a.predictor, "model, oracle or train-mean")
        ->check(CLI::IsMember({"model", "oracle", "train-mean"}))
        ->capture_default_str();
    eval->add_option("--out", eval_a.out, "Metric report CSV path")->capture_default_str();
    eval->add_option("--scatter", eval_a.scatter, "Reference/prediction scatter CSV path")->capture_default_str();

    AnnotateArgs annotate_a;
    auto* annotate = app.add_subcommand("annotate", "Aggregate a fine label raster into class abundances");
    annotate->add_option("--raster", annotate_a.raster, "Label raster file")->required();
    annotate->add_option("--factor", annotate_a.factor, "Fine cells per coarse cell side")->capture_default_str();
    annotate->add_option("--out", annotate_a.out, "Abundance CSV path")->capture_default_str();

    GradCheckArgs gc_a;
    auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
    gradcheck->add_option("--model-config", gc_a.model_config, "Model config (default T=3 B=2 H=3 A=2 K=3)");
    gradcheck->add_option("--model-set", gc_a.model_sets, "Model config override KEY=VALUE, repeatable");
    gradcheck->add_option("--eps", gc_a.eps, "Finite-difference step")->capture_default_str();
    gradcheck->add_option("--tol", gc_a.tol, "Maximum accepted relative error")->capture_default_str();
    gradcheck->add_option("--samples", gc_a.samples, "Random samples in the check batch")->capture_default_str();
    gradcheck->add_flag("--corrupt-backward", gc_a.corrupt, "Test hook: perturb the analytic gradient");

    AblateArgs ablate_a;
    auto* ablate = app.add_subcommand("ablate", "Compare none/geo/clim/both ancillary inputs over seeds");
    ablate->add_option("--dataset", ablate_a.dataset, "Dataset CSV")->required();
    ablate->add_option("--split", ablate_a.split, "Split CSV")->required();
    ablate->add_option("--model-config", ablate_a.model_config, "Model config file");
    ablate->add_option("--model-set", ablate_a.model_sets, "Model config override KEY=VALUE, repeatable");
    ablate->add_option("--train-config", ablate_a.train_config, "Training config file");
    ablate->add_option("--set", ablate_a.sets, "Training config override KEY=VALUE, repeatable");
    ablate->add_option("--seeds", ablate_a.seeds, "Seeds shared by all rows (default: seed, seed+1, seed+2)");
    ablate->add_option("--out", ablate_a.out, "Averaged table CSV path")->capture_default_str();
    ablate->add_option("--runs", ablate_a.runs, "Per-seed results CSV path")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    g.seed_set = seed_opt->count() > 0;

    auto* sub = app.get_subcommands().front();
    Run run(sub->get_name(), g, out, err);
    try {
        int code = kExitOk;
        if (sub == synth) code = cmd_synth(run, synth_a);
        else if (sub == split) code = cmd_split(run, split_a);
        else if (sub == train_cmd) code = cmd_train(run, train_a);
        else if (sub == eval) code = cmd_eval(run, eval_a);
        else if (sub == annotate) code = cmd_annotate(run, annotate_a);
        else if (sub == gradcheck) code = cmd_gradcheck(run, gc_a);
        else if (sub == ablate) code = cmd_ablate(run, ablate_a);
        if (code == kExitOk) run.finish(args);
        return code;
    } catch (const VerificationFailed& e) {
        err << "error: " << e.what() << "\n";
        return kExitVerificationFailed;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error (Io): " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitVerificationFailed;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace stunmix
