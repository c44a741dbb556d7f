#include "topofeat/eval.hpp"

#include "topofeat/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace topofeat {

double cosine_lr(const ScheduleState& s) {
    if (s.t_max == 0) throw std::invalid_argument("cosine_lr: t_max must be positive");
    if (s.eta_min > s.eta_max) throw std::invalid_argument("cosine_lr: eta_min > eta_max");
    if (s.t_cur > s.t_max) throw std::invalid_argument("cosine_lr: t_cur > t_max");
    const double phase = static_cast<double>(s.t_cur) / static_cast<double>(s.t_max);
    return s.eta_min + 0.5 * (s.eta_max - s.eta_min) * (1.0 + std::cos(phase * std::numbers::pi));
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
    if (label >= logits.size()) throw std::invalid_argument("cross_entropy: label out of range");
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - m);
    return std::log(sum) - (logits[label] - m);
}

std::vector<double> cross_entropy_grad(std::span<const double> logits, std::size_t label) {
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    double sum = 0.0;
    std::vector<double> g(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        g[i] = std::exp(logits[i] - m);
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    g[label] -= 1.0;
    return g;
}

std::vector<double> LogisticModel::logits(std::span<const double> raw_row) const {
    std::vector<double> z(n_classes, 0.0);
    const std::size_t stride = n_features + 1;
    for (std::size_t c = 0; c < n_classes; ++c) {
        double acc = weights[c * stride + n_features]; // bias
        for (std::size_t f = 0; f < n_features; ++f) {
            const double xs = (raw_row[f] - mean[f]) / stdev[f];
            acc += weights[c * stride + f] * xs;
        }
        z[c] = acc;
    }
    return z;
}

int LogisticModel::predict(std::span<const double> raw_row) const {
    const std::vector<double> z = logits(raw_row);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c)
        if (z[c] > z[best]) best = c;
    return static_cast<int>(best);
}

LogisticModel train_logistic(const LabeledFeatures& data, std::size_t epochs, std::size_t batch,
                             double eta_max, double eta_min, std::uint64_t seed) {
    if (data.rows() == 0) throw std::invalid_argument("train_logistic: empty dataset");
    if (data.class_names.size() < 2) throw std::invalid_argument("train_logistic: need >= 2 classes");
    if (batch == 0) throw std::invalid_argument("train_logistic: batch must be positive");

    const std::size_t n = data.rows();
    const std::size_t f_count = data.n_features;
    const std::size_t c_count = data.class_names.size();

    LogisticModel model;
    model.class_names = data.class_names;
    model.n_features = f_count;
    model.n_classes = c_count;
    model.mean.assign(f_count, 0.0);
    model.stdev.assign(f_count, 1.0);
    model.weights.assign(c_count * (f_count + 1), 0.0);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < f_count; ++f) model.mean[f] += data.x[i * f_count + f];
    for (double& m : model.mean) m /= static_cast<double>(n);
    std::vector<double> var(f_count, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < f_count; ++f) {
            const double d = data.x[i * f_count + f] - model.mean[f];
            var[f] += d * d;
        }
    for (std::size_t f = 0; f < f_count; ++f) {
        const double s = std::sqrt(var[f] / static_cast<double>(n));
        model.stdev[f] = s > 0.0 ? s : 1.0;
    }

    // standardized design matrix with bias column
    const std::size_t stride = f_count + 1;
    std::vector<double> xs(n * stride);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < f_count; ++f)
            xs[i * stride + f] = (data.x[i * f_count + f] - model.mean[f]) / model.stdev[f];
        xs[i * stride + f_count] = 1.0;
    }

    SeededRng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> z(c_count), grad(c_count * stride);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const double eta = cosine_lr({eta_max, eta_min, epochs, epoch});
        // Fisher-Yates with the seeded stream
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(start + batch, n);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = order[b];
                const double* xi = xs.data() + i * stride;
                for (std::size_t c = 0; c < c_count; ++c) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < stride; ++k)
                        acc += model.weights[c * stride + k] * xi[k];
                    z[c] = acc;
                }
                epoch_loss += cross_entropy(z, static_cast<std::size_t>(data.y[i]));
                const std::vector<double> g = cross_entropy_grad(z, static_cast<std::size_t>(data.y[i]));
                for (std::size_t c = 0; c < c_count; ++c)
                    for (std::size_t k = 0; k < stride; ++k)
                        grad[c * stride + k] += g[c] * xi[k];
            }
            const double scale = eta / static_cast<double>(stop - start);
            for (std::size_t k = 0; k < grad.size(); ++k) model.weights[k] -= scale * grad[k];
        }
        model.loss_trace.push_back(epoch_loss / static_cast<double>(n));
    }
    return model;
}

EvalResult evaluate(const LogisticModel& model, const LabeledFeatures& data) {
    if (data.n_features != model.n_features)
        throw std::invalid_argument("evaluate: feature dimension mismatch");
    EvalResult res;
    res.n_classes = model.n_classes;
    res.confusion.assign(model.n_classes * model.n_classes, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const int pred = model.predict(data.row(i));
        const int truth = data.y[i];
        if (truth < 0 || static_cast<std::size_t>(truth) >= model.n_classes)
            throw std::invalid_argument("evaluate: label out of range");
        res.confusion[static_cast<std::size_t>(truth) * model.n_classes +
                      static_cast<std::size_t>(pred)] += 1;
        if (pred == truth) ++correct;
    }
    res.accuracy = data.rows() ? static_cast<double>(correct) / static_cast<double>(data.rows()) : 0.0;
    return res;
}

IouReport iou_scores(const LabelMask& pred, const LabelMask& truth, std::size_t classes) {
    if (pred.width != truth.width || pred.height != truth.height)
        throw std::invalid_argument("iou_scores: mask dimensions differ");
    IouReport rep;
    rep.per_class.resize(classes);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const std::uint8_t p = pred.data[i];
        const std::uint8_t t = truth.data[i];
        if (p >= classes || t >= classes)
            throw std::invalid_argument("iou_scores: pixel class out of range");
        if (p == t) {
            rep.per_class[p].intersection += 1;
            rep.per_class[p].union_count += 1;
        } else {
            rep.per_class[p].union_count += 1;
            rep.per_class[t].union_count += 1;
        }
    }
    double sum_all = 0.0, sum_present = 0.0;
    std::size_t n_present = 0;
    for (auto& pc : rep.per_class) {
        pc.present = pc.union_count > 0;
        pc.iou = pc.present
                     ? static_cast<double>(pc.intersection) / static_cast<double>(pc.union_count)
                     : 1.0;
        sum_all += pc.iou;
        if (pc.present) {
            sum_present += pc.iou;
            ++n_present;
        }
    }
    rep.mean_all = classes ? sum_all / static_cast<double>(classes) : 0.0;
    rep.mean_present = n_present ? sum_present / static_cast<double>(n_present) : 1.0;
    return rep;
}

const std::array<SynthClassSpec, 3>& synth_class_specs() {
    static const std::array<SynthClassSpec, 3> specs{{
        {"dense", 80, 120, 2.0},
        {"sparse", 15, 30, 2.0},
        {"large", 5, 10, 8.0},
    }};
    return specs;
}

GrayImage synth_blob_image(std::size_t class_idx, std::size_t image_idx, std::uint64_t seed) {
    if (class_idx >= 3) throw std::invalid_argument("synth_blob_image: class_idx must be 0..2");
    const SynthClassSpec& spec = synth_class_specs()[class_idx];
    SeededRng rng = SeededRng(seed).split(class_idx * 0x10000000ULL + image_idx);

    constexpr std::size_t kSide = 256;
    GrayImage img;
    img.width = img.height = kSide;
    img.bit_depth_origin = 16;
    img.data.assign(kSide * kSide, 0.0);

    const std::size_t count =
        spec.min_blobs + rng.uniform_int(spec.max_blobs - spec.min_blobs + 1);
    const double two_sigma_sq = 2.0 * spec.sigma * spec.sigma;
    const double reach = 4.0 * spec.sigma;
    for (std::size_t b = 0; b < count; ++b) {
        const double cx = rng.uniform(0.0, static_cast<double>(kSide));
        const double cy = rng.uniform(0.0, static_cast<double>(kSide));
        const std::size_t r0 = static_cast<std::size_t>(std::max(0.0, std::floor(cy - reach)));
        const std::size_t r1 = static_cast<std::size_t>(
            std::min<double>(kSide, std::ceil(cy + reach) + 1));
        const std::size_t c0 = static_cast<std::size_t>(std::max(0.0, std::floor(cx - reach)));
        const std::size_t c1 = static_cast<std::size_t>(
            std::min<double>(kSide, std::ceil(cx + reach) + 1));
        for (std::size_t r = r0; r < r1; ++r) {
            for (std::size_t c = c0; c < c1; ++c) {
                const double dx = static_cast<double>(c) - cx;
                const double dy = static_cast<double>(r) - cy;
                img.at(r, c) += std::exp(-(dx * dx + dy * dy) / two_sigma_sq);
            }
        }
    }
    for (double& v : img.data) v = std::min(v, 1.0);
    return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path, int bits) {
    if (bits != 8 && bits != 16) throw std::invalid_argument("write_pgm: bits must be 8 or 16");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    const unsigned maxval = bits == 8 ? 255u : 65535u;
    out << "P5\n" << img.width << ' ' << img.height << "\n" << maxval << "\n";
    for (double v : img.data) {
        const unsigned q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
        if (bits == 8) {
            out.put(static_cast<char>(q));
        } else {
            out.put(static_cast<char>(q >> 8));
            out.put(static_cast<char>(q & 0xff));
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::size_t synth_dataset(std::size_t n_per_class, std::uint64_t seed,
                          const std::filesystem::path& out_dir) {
    if (n_per_class == 0) throw std::invalid_argument("synth_dataset: n_per_class must be >= 1");
    std::size_t written = 0;
    for (std::size_t cls = 0; cls < 3; ++cls) {
        const auto dir = out_dir / synth_class_specs()[cls].name;
        std::filesystem::create_directories(dir);
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const GrayImage img = synth_blob_image(cls, i, seed);
            std::ostringstream name;
            name << synth_class_specs()[cls].name << '_' << std::setw(4) << std::setfill('0') << i
                 << ".pgm";
            write_pgm(img, dir / name.str(), 16);
            ++written;
        }
    }
    return written;
}

LabelMask load_label_mask(const std::filesystem::path& path, std::size_t classes) {
    const GrayImage img = load_gray(path);
    const double maxval = img.bit_depth_origin == 8 ? 255.0 : 65535.0;
    LabelMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.data.resize(img.pixels());
    for (std::size_t i = 0; i < img.pixels(); ++i) {
        const long v = std::lround(img.data[i] * maxval);
        if (v < 0 || static_cast<std::size_t>(v) >= classes)
            throw std::runtime_error(path.string() + ": pixel value outside class range");
        mask.data[i] = static_cast<std::uint8_t>(v);
    }
    return mask;
}

std::pair<LabeledFeatures, LabeledFeatures> stratified_split(const LabeledFeatures& data,
                                                             double test_fraction,
                                                             std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("stratified_split: test_fraction must be in [0,1)");
    SeededRng rng(seed);
    LabeledFeatures train, test;
    train.n_features = test.n_features = data.n_features;
    train.class_names = test.class_names = data.class_names;

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < data.rows(); ++i) by_class[data.y[i]].push_back(i);

    std::vector<std::size_t> train_rows, test_rows;
    for (auto& [cls, rows] : by_class) {
        for (std::size_t i = rows.size(); i > 1; --i)
            std::swap(rows[i - 1], rows[rng.uniform_int(i)]);
        const std::size_t n_test =
            static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(rows.size())));
        for (std::size_t i = 0; i < rows.size(); ++i)
            (i < n_test ? test_rows : train_rows).push_back(rows[i]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    auto fill = [&](LabeledFeatures& dst, const std::vector<std::size_t>& rows) {
        dst.x.reserve(rows.size() * data.n_features);
        dst.y.reserve(rows.size());
        for (std::size_t i : rows) {
            const auto r = data.row(i);
            dst.x.insert(dst.x.end(), r.begin(), r.end());
            dst.y.push_back(data.y[i]);
        }
    };
    fill(train, train_rows);
    fill(test, test_rows);
    return {std::move(train), std::move(test)};
}

LabeledFeatures read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error(path.string() + ": empty CSV");

    std::size_t n_features = 0;
    {
        std::stringstream hs(header);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols[0] != "id" || cols[1] != "label")
            throw std::runtime_error(path.string() + ": expected header id,label,f_0,...");
        n_features = cols.size() - 2;
    }

    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string id, label, cell;
        if (!std::getline(ls, id, ',') || !std::getline(ls, label, ','))
            throw std::runtime_error(path.string() + ": malformed CSV row");
        std::vector<double> vals;
        vals.reserve(n_features);
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != n_features)
            throw std::runtime_error(path.string() + ": row width mismatch");
        labels.push_back(label);
        rows.push_back(std::move(vals));
    }

    std::set<std::string> unique(labels.begin(), labels.end());
    LabeledFeatures data;
    data.n_features = n_features;
    data.class_names.assign(unique.begin(), unique.end());
    auto class_index = [&](const std::string& name) {
        const auto it = std::lower_bound(data.class_names.begin(), data.class_names.end(), name);
        return static_cast<int>(it - data.class_names.begin());
    };
    data.x.reserve(rows.size() * n_features);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.x.insert(data.x.end(), rows[i].begin(), rows[i].end());
        data.y.push_back(class_index(labels[i]));
    }
    return data;
}

void save_model(const LogisticModel& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["class_names"] = model.class_names;
    j["n_features"] = model.n_features;
    j["n_classes"] = model.n_classes;
    j["mean"] = model.mean;
    j["stdev"] = model.stdev;
    j["weights"] = model.weights;
    j["loss_trace"] = model.loss_trace;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

LogisticModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json j;
    in >> j;
    LogisticModel model;
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.n_features = j.at("n_features").get<std::size_t>();
    model.n_classes = j.at("n_classes").get<std::size_t>();
    model.mean = j.at("mean").get<std::vector<double>>();
    model.stdev = j.at("stdev").get<std::vector<double>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("loss_trace")) model.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    if (model.mean.size() != model.n_features || model.stdev.size() != model.n_features ||
        model.weights.size() != model.n_classes * (model.n_features + 1))
        throw std::runtime_error(path.string() + ": inconsistent model file");
    return model;
}

} // namespace topofeat
