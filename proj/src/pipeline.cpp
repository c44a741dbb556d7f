#include "topofeat/pipeline.hpp"

#include "topofeat/complex.hpp"
#include "topofeat/signature.hpp"
#include "topofeat/vectorize.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace topofeat {

std::size_t TransformerConfig::feature_cols() const {
    return feature == FeatureKind::silhouette ? resolution : kSignatureFeatureLength;
}

FeatureRecord extract_image(const GrayImage& img, const std::string& id,
                            const TransformerConfig& cfg, const std::string& label) {
    FeatureRecord rec;
    rec.id = id;
    rec.label = label;
    rec.cols = cfg.feature_cols();

    PointCloud cloud = cfg.cloud_method == CloudMethod::resize
                           ? resize_pointcloud(img, cfg.grid)
                           : contour_pointcloud(img, cfg.fraction, cfg.min_area);

    PersistenceDiagram dg;
    bool ok = cloud.size() >= 3;
    if (ok) {
        try {
            dg = diagram(build_alpha(cloud));
        } catch (const CollinearInputError&) {
            ok = false;
        }
    }
    if (!ok) {
        rec.degenerate = true;
        rec.values.assign(rec.rows * rec.cols, 0.0);
        return rec;
    }

    if (cfg.feature == FeatureKind::silhouette) {
        rec.values.reserve(2 * cfg.resolution);
        for (int dim = 0; dim <= 1; ++dim) {
            const SilhouettePath sp = silhouette(dg, dim, WeightKind::constant, cfg.resolution);
            rec.values.insert(rec.values.end(), sp.values.begin(), sp.values.end());
        }
    } else {
        const auto feat = signature_feature(dg);
        rec.values.reserve(2 * kSignatureFeatureLength);
        rec.values.insert(rec.values.end(), feat[0].begin(), feat[0].end());
        rec.values.insert(rec.values.end(), feat[1].begin(), feat[1].end());
    }
    return rec;
}

FeatureRecord extract(const std::filesystem::path& img_path, const TransformerConfig& cfg) {
    return extract_image(load_gray(img_path), img_path.stem().string(), cfg);
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TOPOFEAT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

bool is_image_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" || ext == ".png";
}

struct BatchTask {
    std::filesystem::path path;
    std::string id;
    std::string label;
};

} // namespace

void write_features_csv(const std::vector<FeatureRecord>& records, std::size_t value_count,
                        std::ostream& out) {
    out << "id,label";
    for (std::size_t f = 0; f < value_count; ++f) out << ",f_" << f;
    out << '\n';
    for (const FeatureRecord& rec : records) {
        out << rec.id << ',' << rec.label;
        for (double v : rec.values) out << ',' << format_double(v);
        out << '\n';
    }
}

BatchResult extract_batch(const std::filesystem::path& dir, const TransformerConfig& cfg,
                          const std::filesystem::path& out_csv, unsigned workers) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir.string());

    std::vector<BatchTask> tasks;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            tasks.push_back({entry.path(), entry.path().stem().string(), ""});
        } else if (entry.is_directory()) {
            const std::string label = entry.path().filename().string();
            for (const auto& sub : std::filesystem::directory_iterator(entry.path()))
                if (sub.is_regular_file() && is_image_file(sub.path()))
                    tasks.push_back({sub.path(), sub.path().stem().string(), label});
        }
    }
    std::sort(tasks.begin(), tasks.end(), [](const BatchTask& a, const BatchTask& b) {
        if (a.id != b.id) return a.id < b.id;
        return a.label < b.label;
    });

    std::vector<FeatureRecord> results(tasks.size());
    std::vector<std::uint8_t> ok(tasks.size(), 0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failed{0};

    auto worker_fn = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = extract_image(load_gray(tasks[i].path), tasks[i].id, cfg,
                                           tasks[i].label);
                ok[i] = 1;
            } catch (const std::exception& e) {
                failed.fetch_add(1);
                std::cerr << "extract failed: " << tasks[i].path.string() << ": " << e.what()
                          << '\n';
            }
        }
    };

    const unsigned n_workers =
        std::max<unsigned>(1, std::min<std::size_t>(resolve_workers(workers),
                                                    std::max<std::size_t>(tasks.size(), 1)));
    if (n_workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    BatchResult res;
    std::vector<FeatureRecord> kept;
    kept.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!ok[i]) continue;
        if (results[i].degenerate) {
            ++res.degenerate;
            std::cerr << "degenerate input (zero feature row): " << tasks[i].path.string() << '\n';
        }
        kept.push_back(std::move(results[i]));
        ++res.processed;
    }
    res.failed = failed.load();

    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_csv.string());
    write_features_csv(kept, 2 * cfg.feature_cols(), out);
    return res;
}

PointCloud cloud_for_input(const std::filesystem::path& input, const TransformerConfig& cfg) {
    if (is_image_file(input)) {
        const GrayImage img = load_gray(input);
        return cfg.cloud_method == CloudMethod::resize
                   ? resize_pointcloud(img, cfg.grid)
                   : contour_pointcloud(img, cfg.fraction, cfg.min_area);
    }
    return load_pointcloud(input);
}

PersistenceDiagram diagram_for_cloud(const PointCloud& pc, const std::string& complex_kind,
                                     int max_dim, double max_value) {
    if (complex_kind == "rips") return diagram(build_rips(pc, max_dim, max_value));
    if (complex_kind == "cech") return diagram(build_cech(pc, std::min(max_dim, 2), max_value));
    if (complex_kind == "alpha") return diagram(build_alpha(pc));
    throw std::invalid_argument("unknown complex kind: " + complex_kind);
}

PersistenceDiagram squared_view(const PersistenceDiagram& dg) {
    PersistenceDiagram out = dg;
    for (auto& p : out.pairs) {
        p.birth = p.birth * p.birth;
        if (p.finite()) p.death = p.death * p.death;
    }
    for (auto& p : out.zero_audit) {
        p.birth = p.birth * p.birth;
        if (p.finite()) p.death = p.death * p.death;
    }
    out.max_filtration = dg.max_filtration * dg.max_filtration;
    return out;
}

} // namespace topofeat
