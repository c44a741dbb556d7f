#pragma once

#include "topofeat/image.hpp"
#include "topofeat/persistence.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace topofeat {

enum class CloudMethod { resize, contour };
enum class FeatureKind { silhouette, signature };

// Defaults reproduce the four named transformers
// (Resize|Contour)_(silhouette|signature).
struct TransformerConfig {
    CloudMethod cloud_method = CloudMethod::resize;
    FeatureKind feature = FeatureKind::silhouette;
    std::size_t grid = 64;        // resize target
    double fraction = 0.05;       // contour threshold fraction
    std::size_t resolution = 200; // silhouette samples per dimension
    std::size_t k_max = 5;        // landscapes feeding the signature
    int max_level = 3;
    std::size_t min_area = 1;
    std::uint64_t seed = 0;

    // values per homology dimension (x2 dimensions in a record)
    std::size_t feature_cols() const;
};

struct FeatureRecord {
    std::string id;
    std::string label; // empty when unlabeled
    std::vector<double> values;
    std::size_t rows = 2;
    std::size_t cols = 0;
    bool degenerate = false; // cloud too small/collinear; values are zeros
};

// image -> point cloud (per config) -> alpha diagram -> silhouette or
// signature feature. Degenerate clouds yield a zero record with the flag set.
FeatureRecord extract_image(const GrayImage& img, const std::string& id,
                            const TransformerConfig& cfg, const std::string& label = "");

FeatureRecord extract(const std::filesystem::path& img_path, const TransformerConfig& cfg);

struct BatchResult {
    std::size_t processed = 0;  // records written
    std::size_t degenerate = 0; // zero-feature records among them
    std::size_t failed = 0;     // unreadable inputs, skipped
};

// Scans dir (label = optional subdirectory name), extracts concurrently, and
// writes a CSV "id,label,f_0,..." with rows sorted by id. Output bytes do not
// depend on the worker count. workers == 0 picks TOPOFEAT_THREADS or the
// hardware concurrency.
BatchResult extract_batch(const std::filesystem::path& dir, const TransformerConfig& cfg,
                          const std::filesystem::path& out_csv, unsigned workers = 0);

void write_features_csv(const std::vector<FeatureRecord>& records, std::size_t value_count,
                        std::ostream& out);

unsigned resolve_workers(unsigned requested);

// Shared by the diagram subcommand: image inputs go through the configured
// point-cloud method, anything else parses as point-cloud text.
PointCloud cloud_for_input(const std::filesystem::path& input, const TransformerConfig& cfg);

PersistenceDiagram diagram_for_cloud(const PointCloud& pc, const std::string& complex_kind,
                                     int max_dim, double max_value);

// Squares finite birth/death values (radius -> squared-radius view).
PersistenceDiagram squared_view(const PersistenceDiagram& dg);

} // namespace topofeat
