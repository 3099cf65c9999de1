// Python bindings. Configs cross the boundary as `key = value` text, arrays as
// NumPy via Eigen, so the surface stays small.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stunmix/checkpoint.hpp"
#include "stunmix/cli.hpp"
#include "stunmix/dataset_csv.hpp"
#include "stunmix/error.hpp"
#include "stunmix/ingest.hpp"
#include "stunmix/metrics.hpp"
#include "stunmix/synthgen.hpp"
#include "stunmix/trainer.hpp"

namespace py = pybind11;
using namespace stunmix;

namespace {

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict report_dict(const metrics::ClassMetricReport& r) {
    py::dict out;
    py::list per_class;
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        py::dict row;
        row["class"] = r.classes[c];
        row["MAE"] = m.mae;
        row["RMSE"] = m.rmse;
        row["RRMSE"] = opt(m.rrmse);
        row["CC"] = opt(m.cc);
        row["F1"] = opt(m.f1);
        per_class.append(row);
    }
    out["per_class"] = per_class;
    out["MAE"] = r.macro_mae;
    out["RMSE"] = r.macro_rmse;
    out["RRMSE"] = opt(r.macro_rrmse);
    out["CC"] = opt(r.macro_cc);
    out["F1"] = opt(r.macro_f1);
    out["samples"] = r.samples;
    out["warnings"] = r.warnings;
    return out;
}

DataSplit make_split(std::vector<std::size_t> train, std::vector<std::size_t> test) {
    return DataSplit{std::move(train), std::move(test)};
}

Matrix references(const Dataset& ds) {
    Matrix m(ds.classes(), static_cast<Eigen::Index>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = ds[i].reference.values;
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Blind spectral unmixing with a bidirectional recurrent-imputation network";
    m.attr("__version__") = std::string(kVersion);

    static py::exception<Error> error(m, "StunmixError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<Dataset>(m, "Dataset")
        .def("__len__", &Dataset::size)
        .def_property_readonly("steps", &Dataset::steps)
        .def_property_readonly("bands", &Dataset::bands)
        .def_property_readonly("classes", &Dataset::classes)
        .def_property_readonly("legend", &Dataset::legend)
        .def_property_readonly("pixel_ids",
                               [](const Dataset& ds) {
                                   std::vector<std::string> ids;
                                   for (const auto& s : ds.samples()) ids.push_back(s.pixel_id);
                                   return ids;
                               })
        .def("references", &references, "K x N reference abundances")
        .def("to_csv", &format_dataset_csv)
        .def("save", [](const Dataset& ds, const std::string& path) { save_dataset_csv(path, ds); });

    m.def("load_dataset", [](const std::string& path) { return load_dataset_csv(path); }, py::arg("path"));
    m.def("parse_dataset", [](const std::string& text) { return parse_dataset_csv(text); }, py::arg("text"));
    m.def(
        "synth",
        [](const std::string& config, std::optional<std::uint64_t> seed) {
            SceneConfig c = parse_scene_config(config);
            if (seed) c.seed = *seed;
            return synth::gen_scene(c).dataset;
        },
        py::arg("config") = "", py::arg("seed") = py::none(), "Synthetic scene from scene-config text");

    m.def(
        "block_split",
        [](const Dataset& ds, int block_w, int block_h, double ratio, std::uint64_t seed) {
            const DataSplit s = block_split(ds, block_w, block_h, ratio, seed).split();
            return py::make_tuple(s.train, s.test);
        },
        py::arg("dataset"), py::arg("block_w") = kDefaultBlockWidth, py::arg("block_h") = kDefaultBlockHeight,
        py::arg("ratio") = kDefaultTrainRatio, py::arg("seed") = 0, "Returns (train_ids, test_ids)");

    py::class_<Checkpoint>(m, "Model")
        .def_property_readonly("model_config", [](const Checkpoint& c) { return format_model_config(c.model()); })
        .def_property_readonly("train_config", [](const Checkpoint& c) { return format_train_config(c.train); })
        .def_property_readonly("epochs_done", [](const Checkpoint& c) { return c.state.epochs_done; })
        .def_property_readonly("history",
                               [](const Checkpoint& c) {
                                   py::list rows;
                                   for (const auto& h : c.state.history) {
                                       py::dict d;
                                       d["epoch"] = h.epoch;
                                       d["lr"] = h.lr;
                                       d["train_loss"] = h.train_loss;
                                       d["test_mae"] = opt(h.test_mae);
                                       d["test_cc"] = opt(h.test_cc);
                                       rows.append(d);
                                   }
                                   return rows;
                               })
        .def(
            "predict",
            [](const Checkpoint& c, const Dataset& ds, int threads) {
                const Dataset norm = apply_normalization(ds, c.state.norm);
                std::vector<const Sample*> ptrs;
                for (const auto& s : norm.samples()) ptrs.push_back(&s);
                py::gil_scoped_release release;
                return predict_abundances(ptrs, c.state.params, threads);
            },
            py::arg("dataset"), py::arg("threads") = 1, "K x N predicted abundances")
        .def("save", [](const Checkpoint& c, const std::string& path) { save_checkpoint(path, c); })
        .def("to_bytes", [](const Checkpoint& c) { return py::bytes(encode_checkpoint(c)); });

    m.def("load_model", [](const std::string& path) { return load_checkpoint(path); }, py::arg("path"));
    m.def(
        "train",
        [](const Dataset& ds, std::vector<std::size_t> train_ids, std::vector<std::size_t> test_ids,
           const std::string& model_config, const std::string& train_config, int threads) {
            ModelConfig base;
            base.steps = ds.steps();
            base.bands = ds.bands();
            base.classes = ds.classes();
            const ModelConfig mc = parse_model_config(model_config, base);
            const TrainConfig tc = parse_train_config(train_config);
            const DataSplit split = make_split(std::move(train_ids), std::move(test_ids));
            TrainOptions options;
            options.threads = threads;
            py::gil_scoped_release release;
            return Checkpoint{tc, train(ds, split, mc, tc, options)};
        },
        py::arg("dataset"), py::arg("train_ids"), py::arg("test_ids"), py::arg("model_config") = "",
        py::arg("train_config") = "", py::arg("threads") = 1);

    m.def(
        "evaluate",
        [](const Checkpoint& c, const Dataset& ds, std::vector<std::size_t> train_ids,
           std::vector<std::size_t> test_ids) {
            const DataSplit split = make_split(std::move(train_ids), std::move(test_ids));
            return report_dict(evaluate(c.state.params, c.state.norm, ds, split).report);
        },
        py::arg("model"), py::arg("dataset"), py::arg("train_ids"), py::arg("test_ids"));

    m.def(
        "metrics",
        [](const Matrix& refs, const Matrix& preds, std::optional<std::vector<std::string>> classes) {
            std::vector<std::string> names = classes ? *classes : ClassLegend::for_classes(static_cast<int>(refs.rows())).names;
            return report_dict(metrics::compute_report(refs, preds, names));
        },
        py::arg("refs"), py::arg("preds"), py::arg("classes") = py::none(), "Metric report for K x N matrices");

    m.def(
        "gradcheck",
        [](const std::string& model_config, std::uint64_t seed, double eps, int samples) {
            ModelConfig base;
            base.steps = 3;
            base.bands = 2;
            base.hidden = 3;
            base.anc_hidden = 2;
            base.classes = 3;
            const ModelConfig mc = parse_model_config(model_config, base);
            const GradCheckInstance inst = make_gradcheck_instance(mc, seed, samples);
            std::vector<const Sample*> ptrs;
            for (const auto& s : inst.samples) ptrs.push_back(&s);
            GradCheckOptions options;
            options.eps = eps;
            const GradCheckResult r = grad_check(inst.params, ptrs, options);
            py::dict d;
            d["max_rel_error"] = r.max_rel_error;
            d["worst_param"] = r.worst_param;
            d["worst_index"] = r.worst_index;
            d["checked"] = r.checked;
            return d;
        },
        py::arg("model_config") = "", py::arg("seed") = 0, py::arg("eps") = 1e-5, py::arg("samples") = 2);

    m.def(
        "aggregate",
        [](const Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& labels, int classes,
           int factor) {
            ingest::LabelRaster r;
            r.height = static_cast<int>(labels.rows());
            r.width = static_cast<int>(labels.cols());
            r.classes = classes;
            r.labels.assign(labels.data(), labels.data() + labels.size());
            const ingest::AbundanceGrid g = ingest::aggregate_abundances(r, factor);
            // (cells, K) in row-major cell order; excluded cells are NaN.
            Matrix out = Matrix::Constant(static_cast<Eigen::Index>(g.abundances.size()), classes,
                                          std::numeric_limits<double>::quiet_NaN());
            for (std::size_t i = 0; i < g.abundances.size(); ++i) {
                if (!g.excluded[i]) out.row(static_cast<Eigen::Index>(i)) = g.abundances[i].transpose();
            }
            return out;
        },
        py::arg("labels"), py::arg("classes"), py::arg("factor"),
        "Fine label grid (H x W, -1 = no data) to per-cell class fractions");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr)");
}
