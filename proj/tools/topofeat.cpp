#include "CLI11.hpp"

#include "topofeat/complex.hpp"
#include "topofeat/eval.hpp"
#include "topofeat/metrics.hpp"
#include "topofeat/pipeline.hpp"
#include "topofeat/pointcloud.hpp"

#include <fstream>
#include <iostream>

namespace {

// exit codes: 0 ok, 1 usage, 2 I/O, 3 degenerate-input-only run
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitDegenerate = 3;

using namespace topofeat;

struct ExtractArgs {
    std::string method = "resize";
    std::string feature = "silhouette";
    std::size_t grid = 64;
    double fraction = 0.05;
    std::size_t resolution = 200;
    std::size_t min_area = 1;
    unsigned workers = 0;
    std::string out;
    std::string dir;
};

TransformerConfig make_config(const ExtractArgs& a) {
    TransformerConfig cfg;
    cfg.cloud_method = a.method == "contour" ? CloudMethod::contour : CloudMethod::resize;
    cfg.feature = a.feature == "signature" ? FeatureKind::signature : FeatureKind::silhouette;
    cfg.grid = a.grid;
    cfg.fraction = a.fraction;
    cfg.resolution = a.resolution;
    cfg.min_area = a.min_area;
    return cfg;
}

int run_extract(const ExtractArgs& a) {
    const BatchResult res = extract_batch(a.dir, make_config(a), a.out, a.workers);
    std::cerr << "processed " << res.processed << " image(s), " << res.degenerate
              << " degenerate, " << res.failed << " failed\n";
    if (res.processed == 0 && res.failed > 0) return kExitIo;
    if (res.processed > 0 && res.degenerate == res.processed) return kExitDegenerate;
    return kExitOk;
}

struct DiagramArgs {
    std::string complex_kind;
    std::string out = "-";
    std::string dump_complex;
    std::string method = "resize";
    std::size_t grid = 64;
    double fraction = 0.05;
    int max_dim = 2;
    double max_value = kInf;
    bool squared = false;
    std::string input;
};

int run_diagram(const DiagramArgs& a) {
    TransformerConfig cfg;
    cfg.cloud_method = a.method == "contour" ? CloudMethod::contour : CloudMethod::resize;
    cfg.grid = a.grid;
    cfg.fraction = a.fraction;

    const PointCloud pc = cloud_for_input(a.input, cfg);
    if (!a.dump_complex.empty()) {
        FilteredComplex fc;
        if (a.complex_kind == "rips") fc = build_rips(pc, a.max_dim, a.max_value);
        else if (a.complex_kind == "cech") fc = build_cech(pc, std::min(a.max_dim, 2), a.max_value);
        else fc = build_alpha(pc);
        std::ofstream dump(a.dump_complex);
        if (!dump) throw std::runtime_error("cannot open for writing: " + a.dump_complex);
        dump_complex(fc, dump);
    }

    PersistenceDiagram dg = diagram_for_cloud(pc, a.complex_kind, a.max_dim, a.max_value);
    if (a.squared && dg.convention != FiltrationConvention::alpha_squared_radius)
        dg = squared_view(dg);

    if (a.out == "-") {
        write_diagram(dg, std::cout);
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + a.out);
        write_diagram(dg, out);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"topofeat: topological feature extraction for images and point clouds"};
    app.require_subcommand(1);

    ExtractArgs ex;
    auto* extract_cmd = app.add_subcommand("extract", "extract features from an image directory");
    extract_cmd->add_option("--method", ex.method, "point cloud method")
        ->check(CLI::IsMember({"resize", "contour"}));
    extract_cmd->add_option("--feature", ex.feature, "feature kind")
        ->check(CLI::IsMember({"silhouette", "signature"}));
    extract_cmd->add_option("--grid", ex.grid, "resize grid (default 64)");
    extract_cmd->add_option("--fraction", ex.fraction, "contour threshold fraction (default 0.05)");
    extract_cmd->add_option("--resolution", ex.resolution, "silhouette resolution (default 200)");
    extract_cmd->add_option("--min-area", ex.min_area, "minimum contour component area");
    extract_cmd->add_option("--workers", ex.workers, "worker threads (default: TOPOFEAT_THREADS)");
    extract_cmd->add_option("--out", ex.out, "output CSV path")->required();
    extract_cmd->add_option("dir", ex.dir, "image directory (optional label subdirectories)")
        ->required();

    DiagramArgs dg;
    auto* diagram_cmd = app.add_subcommand("diagram", "persistence diagram of an input");
    diagram_cmd->add_option("--complex", dg.complex_kind, "complex kind")
        ->check(CLI::IsMember({"rips", "cech", "alpha"}))
        ->required();
    diagram_cmd->add_option("--out", dg.out, "output path or - for stdout");
    diagram_cmd->add_option("--dump-complex", dg.dump_complex, "also dump the filtered complex");
    diagram_cmd->add_option("--method", dg.method, "point cloud method for image inputs")
        ->check(CLI::IsMember({"resize", "contour"}));
    diagram_cmd->add_option("--grid", dg.grid, "resize grid for image inputs");
    diagram_cmd->add_option("--fraction", dg.fraction, "contour fraction for image inputs");
    diagram_cmd->add_option("--max-dim", dg.max_dim, "max simplex dimension (rips 1..3, cech 1..2)");
    diagram_cmd->add_option("--max-value", dg.max_value, "filtration cutoff");
    diagram_cmd->add_flag("--squared", dg.squared, "square rips/cech values on output");
    diagram_cmd->add_option("input", dg.input, "image or point-cloud file")->required();

    auto* synth_cmd = app.add_subcommand("synth", "synthetic data generators");
    synth_cmd->require_subcommand(1);
    std::size_t synth_n = 200;
    std::uint64_t synth_seed = 42;
    double r_in = 0.5, r_out = 1.0;
    std::string synth_out;
    auto* disc_cmd = synth_cmd->add_subcommand("disc", "uniform points on the unit disc");
    disc_cmd->add_option("--n", synth_n, "point count");
    disc_cmd->add_option("--seed", synth_seed, "RNG seed");
    disc_cmd->add_option("--out", synth_out, "output point-cloud file")->required();
    auto* ann_cmd = synth_cmd->add_subcommand("annulus", "uniform points on an annulus");
    ann_cmd->add_option("--n", synth_n, "point count");
    ann_cmd->add_option("--seed", synth_seed, "RNG seed");
    ann_cmd->add_option("--r-in", r_in, "inner radius (default 0.5)");
    ann_cmd->add_option("--r-out", r_out, "outer radius (default 1.0)");
    ann_cmd->add_option("--out", synth_out, "output point-cloud file")->required();
    std::size_t per_class = 10;
    auto* ds_cmd = synth_cmd->add_subcommand("dataset", "3-class blob image dataset");
    ds_cmd->add_option("--per-class", per_class, "images per class");
    ds_cmd->add_option("--seed", synth_seed, "RNG seed");
    ds_cmd->add_option("--out", synth_out, "output directory")->required();

    std::string train_in, train_out;
    std::size_t epochs = 60, batch = 32;
    double eta_max = 0.5, eta_min = 0.01;
    std::uint64_t train_seed = 7;
    auto* train_cmd = app.add_subcommand("train", "train the logistic baseline on a feature CSV");
    train_cmd->add_option("--in", train_in, "training CSV")->required();
    train_cmd->add_option("--epochs", epochs, "epochs (default 60)");
    train_cmd->add_option("--batch", batch, "minibatch size (default 32)");
    train_cmd->add_option("--eta-max", eta_max, "initial learning rate");
    train_cmd->add_option("--eta-min", eta_min, "final learning rate");
    train_cmd->add_option("--seed", train_seed, "shuffle seed");
    train_cmd->add_option("--out", train_out, "model JSON path")->required();

    std::string eval_model, eval_in;
    bool show_confusion = false;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a feature CSV");
    eval_cmd->add_option("--model", eval_model, "model JSON")->required();
    eval_cmd->add_option("--in", eval_in, "evaluation CSV")->required();
    eval_cmd->add_flag("--confusion", show_confusion, "print the confusion matrix");

    std::string iou_pred, iou_truth;
    std::size_t iou_classes = 2;
    auto* iou_cmd = app.add_subcommand("iou", "multi-class IoU between two label masks");
    iou_cmd->add_option("--pred", iou_pred, "predicted mask (PGM/PNG)")->required();
    iou_cmd->add_option("--truth", iou_truth, "ground-truth mask (PGM/PNG)")->required();
    iou_cmd->add_option("--classes", iou_classes, "class count")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (extract_cmd->parsed()) return run_extract(ex);
        if (diagram_cmd->parsed()) return run_diagram(dg);
        if (synth_cmd->parsed()) {
            if (disc_cmd->parsed()) {
                save_pointcloud(sample_disc(synth_n, synth_seed), synth_out);
            } else if (ann_cmd->parsed()) {
                save_pointcloud(sample_annulus(synth_n, r_in, r_out, synth_seed), synth_out);
            } else {
                const std::size_t n = synth_dataset(per_class, synth_seed, synth_out);
                std::cerr << "wrote " << n << " images under " << synth_out << '\n';
            }
            return kExitOk;
        }
        if (train_cmd->parsed()) {
            const LabeledFeatures data = read_features_csv(train_in);
            const LogisticModel model =
                train_logistic(data, epochs, batch, eta_max, eta_min, train_seed);
            save_model(model, train_out);
            std::cout << "final training loss "
                      << (model.loss_trace.empty() ? 0.0 : model.loss_trace.back()) << '\n';
            return kExitOk;
        }
        if (eval_cmd->parsed()) {
            const LogisticModel model = load_model(eval_model);
            const LabeledFeatures data = read_features_csv(eval_in);
            const EvalResult res = evaluate(model, data);
            std::cout << "accuracy " << format_double(res.accuracy) << '\n';
            if (show_confusion) {
                for (std::size_t t = 0; t < res.n_classes; ++t) {
                    for (std::size_t p = 0; p < res.n_classes; ++p)
                        std::cout << (p ? " " : "") << res.at(t, p);
                    std::cout << '\n';
                }
            }
            return kExitOk;
        }
        if (iou_cmd->parsed()) {
            const LabelMask pred = load_label_mask(iou_pred, iou_classes);
            const LabelMask truth = load_label_mask(iou_truth, iou_classes);
            const IouReport rep = iou_scores(pred, truth, iou_classes);
            for (std::size_t c = 0; c < iou_classes; ++c) {
                const auto& pc = rep.per_class[c];
                std::cout << "class " << c << " iou " << format_double(pc.iou) << " ("
                          << pc.intersection << '/' << pc.union_count << ')'
                          << (pc.present ? "" : " [absent]") << '\n';
            }
            std::cout << "mean_all " << format_double(rep.mean_all) << '\n';
            std::cout << "mean_present " << format_double(rep.mean_present) << '\n';
            return kExitOk;
        }
    } catch (const CollinearInputError& e) {
        std::cerr << "degenerate input: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
