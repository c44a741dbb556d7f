#pragma once

#include "topofeat/image.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace topofeat {

struct ScheduleState {
    double eta_max = 0.0;
    double eta_min = 0.0;
    std::size_t t_max = 1;
    std::size_t t_cur = 0;
};

// eta = eta_min + (eta_max - eta_min)/2 * (1 + cos(pi * t_cur/t_max))
double cosine_lr(const ScheduleState& s);

// -log softmax(logits)[label], stabilized by max subtraction.
double cross_entropy(std::span<const double> logits, std::size_t label);

// d(cross_entropy)/d(logits) = softmax(logits) - onehot(label)
std::vector<double> cross_entropy_grad(std::span<const double> logits, std::size_t label);

struct LabeledFeatures {
    std::size_t n_features = 0;
    std::vector<double> x; // rows x n_features, row-major
    std::vector<int> y;    // class index per row
    std::vector<std::string> class_names;

    std::size_t rows() const { return y.size(); }
    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * n_features, n_features};
    }
};

struct LogisticModel {
    std::vector<std::string> class_names;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> mean, stdev;  // standardization from the training split
    std::vector<double> weights;      // n_classes x (n_features + 1), bias last
    std::vector<double> loss_trace;   // mean training loss per epoch

    std::vector<double> logits(std::span<const double> raw_row) const;
    int predict(std::span<const double> raw_row) const; // argmax, lowest index wins ties
};

// Minibatch SGD on mean cross-entropy (no regularizer), cosine schedule per
// epoch, deterministic shuffling per seed. Weights start at zero.
LogisticModel train_logistic(const LabeledFeatures& data, std::size_t epochs, std::size_t batch,
                             double eta_max, double eta_min, std::uint64_t seed);

struct EvalResult {
    double accuracy = 0.0;
    std::size_t n_classes = 0;
    std::vector<std::size_t> confusion; // n_classes x n_classes, row = truth

    std::size_t at(std::size_t truth, std::size_t pred) const {
        return confusion[truth * n_classes + pred];
    }
};

EvalResult evaluate(const LogisticModel& model, const LabeledFeatures& data);

struct LabelMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data; // class index per pixel
};

struct IouReport {
    struct PerClass {
        std::uint64_t intersection = 0;
        std::uint64_t union_count = 0;
        bool present = false; // appears in pred or truth
        double iou = 1.0;     // absent classes score 1 (vacuous agreement)
    };
    std::vector<PerClass> per_class;
    double mean_all = 0.0;     // unweighted mean over all classes
    double mean_present = 0.0; // mean over classes present in either mask
};

IouReport iou_scores(const LabelMask& pred, const LabelMask& truth, std::size_t classes);

// Synthetic 3-class blob dataset (256x256 Gaussian blobs): class 0 many small
// dense blobs, class 1 sparse small blobs, class 2 few large blobs.
struct SynthClassSpec {
    std::string name;
    std::size_t min_blobs = 0;
    std::size_t max_blobs = 0;
    double sigma = 1.0;
};

const std::array<SynthClassSpec, 3>& synth_class_specs();
GrayImage synth_blob_image(std::size_t class_idx, std::size_t image_idx, std::uint64_t seed);

// Writes n_per_class images per class under out_dir/<class-name>/; returns
// the number of files written.
std::size_t synth_dataset(std::size_t n_per_class, std::uint64_t seed,
                          const std::filesystem::path& out_dir);

void write_pgm(const GrayImage& img, const std::filesystem::path& path, int bits = 16);

LabelMask load_label_mask(const std::filesystem::path& path, std::size_t classes);

// Seeded stratified shuffle split; test_fraction of each class goes to the
// second return value.
std::pair<LabeledFeatures, LabeledFeatures> stratified_split(const LabeledFeatures& data,
                                                             double test_fraction,
                                                             std::uint64_t seed);

// CSV with header "id,label,f_0,...": labels map to class indices sorted by name.
LabeledFeatures read_features_csv(const std::filesystem::path& path);

void save_model(const LogisticModel& model, const std::filesystem::path& path);
LogisticModel load_model(const std::filesystem::path& path);

} // namespace topofeat
