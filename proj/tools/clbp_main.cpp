// clbp: feature extraction, dominant-pattern learning and classification
// benchmarks for multi-channel decoded LBP descriptors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clbp/clbp.hpp"

namespace {

using namespace clbp;

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        const auto end = comma == std::string::npos ? csv.size() : comma;
        const std::string tok = csv.substr(pos, end - pos);
        if (!tok.empty()) out.push_back(detail::parse_double(tok, what));
        pos = end + 1;
        if (comma == std::string::npos) break;
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

std::pair<int, int> parse_grid(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= s.size())
        throw ConfigError("--grid expects RxC, got '" + s + "'");
    const int rows = static_cast<int>(detail::parse_long(s.substr(0, x), "grid rows"));
    const int cols = static_cast<int>(detail::parse_long(s.substr(x + 1), "grid cols"));
    if (rows < 1 || cols < 1) throw ConfigError("--grid must be at least 1x1");
    return {rows, cols};
}

std::vector<std::size_t> parse_sweep(const std::string& s) {
    // start:stop:step, inclusive of stop when it lands on the grid
    std::size_t a = 0, b = 0, c = 0;
    const auto p1 = s.find(':');
    const auto p2 = p1 == std::string::npos ? std::string::npos : s.find(':', p1 + 1);
    if (p2 == std::string::npos) throw ConfigError("--d-sweep expects start:stop:step");
    a = static_cast<std::size_t>(detail::parse_long(s.substr(0, p1), "sweep start"));
    b = static_cast<std::size_t>(detail::parse_long(s.substr(p1 + 1, p2 - p1 - 1), "sweep stop"));
    c = static_cast<std::size_t>(detail::parse_long(s.substr(p2 + 1), "sweep step"));
    if (a < 1 || c < 1 || b < a) throw ConfigError("--d-sweep expects 1 <= start <= stop, step >= 1");
    std::vector<std::size_t> out;
    for (std::size_t d = a; d <= b; d += c) out.push_back(d);
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + out_path);
    out << text;
    if (!out) throw DataError("write failed: " + out_path);
}

struct CliOptions {
    std::string root;
    std::string features;
    std::string table_path;
    std::string model_path;
    std::string out;
    std::string space = "rgb+rss";
    std::string grid = "1x1";
    std::string alphas;
    std::string noise_snr_list;
    std::string sweep = "100:2000:100";
    RunConfig cfg;
    bool text = false;
    bool space_given = false;
};

RunConfig make_config(const CliOptions& opt) {
    RunConfig cfg = opt.cfg;
    cfg.space = stack_kind_from_string(opt.space);
    const auto grid = parse_grid(opt.grid);
    cfg.grid_rows = grid.first;
    cfg.grid_cols = grid.second;
    cfg.validate();
    return cfg;
}

std::vector<StackKind> bench_spaces(const CliOptions& opt) {
    if (opt.space_given) return {stack_kind_from_string(opt.space)};
    return {StackKind::Rgb, StackKind::Rss, StackKind::RgbRss};
}

void add_extraction_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--space", opt.space, "channel stack: rgb, rss or rgb+rss")
        ->default_val("rgb+rss");
    cmd->add_option("--xi", opt.cfg.xi, "relative-similarity denominator guard")->default_val(1.0);
    cmd->add_option("--lbp-p", opt.cfg.neighbors, "LBP neighbor count P")->default_val(8);
    cmd->add_option("--lbp-r", opt.cfg.radius, "LBP radius R")->default_val(1);
    cmd->add_option("--grid", opt.grid, "sub-region grid RxC; tiles are concatenated")
        ->default_val("1x1");
}

void add_cv_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--d", opt.cfg.d, "dominant pattern count D")->default_val(900);
    cmd->add_option("--k", opt.cfg.folds, "cross-validation folds")->default_val(10);
    cmd->add_option("--seed", opt.cfg.seed, "run seed")->default_val(42);
    cmd->add_option("--lambda", opt.cfg.lambda, "hinge-loss regularization")->default_val(1e-4);
    cmd->add_option("--epochs", opt.cfg.epochs, "training epochs")->default_val(50);
}

int run(int argc, char** argv) {
    CLI::App app{"multi-channel decoded LBP descriptor toolkit"};
    app.require_subcommand(1);
    CliOptions opt;

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "extract feature vectors for a dataset");
    extract_cmd->add_option("root", opt.root, "dataset root (one directory per class)")->required();
    add_extraction_flags(extract_cmd, opt);
    extract_cmd->add_option("-o,--out", opt.out, "output feature batch file")->required();
    extract_cmd->add_flag("--text", opt.text, "write text records instead of binary");
    std::string manifest_csv;
    extract_cmd->add_option("--manifest-csv", manifest_csv, "also write the scanned manifest CSV");
    extract_cmd->callback([&] {
        const RunConfig cfg = make_config(opt);
        const DatasetManifest manifest = scan_dataset(opt.root);
        if (!manifest_csv.empty()) write_manifest_csv(manifest_csv, manifest);
        const auto records = extract_dataset(manifest, cfg);
        write_feature_batch(opt.out, records, opt.text);
        std::cerr << records.size() << " records, dim=" << records.front().vec.dim() << "\n";
    });

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "learn a dominant pattern table from features");
    learn_cmd->add_option("features", opt.features, "feature batch file")->required();
    learn_cmd->add_option("--d", opt.cfg.d, "dominant pattern count D")->default_val(900);
    learn_cmd->add_option("-o,--out", opt.out, "output table file")->required();
    learn_cmd->callback([&] {
        const auto records = read_feature_batch(opt.features);
        std::vector<FeatureVector> feats;
        feats.reserve(records.size());
        for (const auto& rec : records) feats.push_back(rec.vec);
        const CumulativeHistogram cum = accumulate(feats);
        const std::size_t base_dim = std::size_t{1}
                                     << (cum.desc.n + cum.desc.neighbors);
        if (cum.values.size() % base_dim != 0)
            throw DataError("feature dim is not a multiple of 2^n * 2^P");
        const int tiles = static_cast<int>(cum.values.size() / base_dim);
        write_table(opt.out, learn_table(cum, opt.cfg.d, tiles));
    });

    // select
    auto* select_cmd = app.add_subcommand("select", "reduce features with a pattern table");
    select_cmd->add_option("features", opt.features, "feature batch file")->required();
    select_cmd->add_option("--table", opt.table_path, "pattern table file")->required();
    select_cmd->add_option("-o,--out", opt.out, "output feature batch file")->required();
    select_cmd->add_flag("--text", opt.text, "write text records instead of binary");
    select_cmd->callback([&] {
        const auto records = read_feature_batch(opt.features);
        const PatternTable table = read_table(opt.table_path);
        std::vector<FeatureRecord> reduced;
        reduced.reserve(records.size());
        for (const auto& rec : records)
            reduced.push_back({{rec.vec.desc, select(rec.vec, table)}, rec.label});
        write_feature_batch(opt.out, reduced, opt.text);
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "train the linear classifier on features");
    train_cmd->add_option("features", opt.features, "feature batch file")->required();
    train_cmd->add_option("--lambda", opt.cfg.lambda, "hinge-loss regularization")->default_val(1e-4);
    train_cmd->add_option("--epochs", opt.cfg.epochs, "training epochs")->default_val(50);
    train_cmd->add_option("--seed", opt.cfg.seed, "shuffle seed")->default_val(42);
    train_cmd->add_option("-o,--out", opt.out, "output model file")->required();
    train_cmd->callback([&] {
        const auto records = read_feature_batch(opt.features);
        std::vector<std::string> classes;
        for (const auto& rec : records) classes.push_back(rec.label);
        std::sort(classes.begin(), classes.end());
        classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
        if (classes.size() < 2) throw DataError("training features need at least 2 classes");
        std::vector<LabeledFeature> data;
        data.reserve(records.size());
        for (const auto& rec : records) {
            const int label = static_cast<int>(
                std::lower_bound(classes.begin(), classes.end(), rec.label) - classes.begin());
            data.push_back({rec.vec.values, label, rec.label});
        }
        write_model(opt.out, train(data, classes, opt.cfg.lambda, opt.cfg.epochs, opt.cfg.seed));
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score labeled features against a model");
    eval_cmd->add_option("features", opt.features, "feature batch file")->required();
    eval_cmd->add_option("--model", opt.model_path, "model file")->required();
    eval_cmd->add_option("-o,--out", opt.out, "output CSV (stdout when omitted)");
    eval_cmd->callback([&] {
        const auto records = read_feature_batch(opt.features);
        const LinearModel model = read_model(opt.model_path);
        std::size_t correct = 0;
        for (const auto& rec : records) {
            const int pred = predict(model, rec.vec.values);
            if (model.classes[static_cast<std::size_t>(pred)] == rec.label) ++correct;
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf), "samples,%zu\ncorrect,%zu\naccuracy,%.6f\n",
                      records.size(), correct,
                      static_cast<double>(correct) / static_cast<double>(records.size()));
        emit(buf, opt.out);
    });

    // crossval
    auto* cv_cmd = app.add_subcommand("crossval", "k-fold cross-validation on a dataset");
    cv_cmd->add_option("root", opt.root, "dataset root")->required();
    add_extraction_flags(cv_cmd, opt);
    add_cv_flags(cv_cmd, opt);
    double cv_noise_snr = 0.0;
    auto* cv_snr_opt = cv_cmd->add_option("--noise-snr", cv_noise_snr,
                                          "corrupt test images with Gaussian noise at this SNR (dB)");
    cv_cmd->add_option("--noise-seed", opt.cfg.noise_seed, "noise seed")->default_val(0);
    cv_cmd->add_flag("--noise-on-train", opt.cfg.noise_on_train,
                     "corrupt training images too (ablation)");
    cv_cmd->add_option("-o,--out", opt.out, "output CSV (stdout when omitted)");
    cv_cmd->callback([&] {
        RunConfig cfg = make_config(opt);
        if (cv_snr_opt->count() > 0) cfg.noise_snr = cv_noise_snr;
        const DatasetManifest manifest = scan_dataset(opt.root);
        emit(crossval_csv(cross_validate(manifest, cfg), cfg), opt.out);
    });

    // noise-bench
    auto* nb_cmd = app.add_subcommand("noise-bench", "accuracy vs test-time noise SNR");
    nb_cmd->add_option("root", opt.root, "dataset root")->required();
    add_extraction_flags(nb_cmd, opt);
    add_cv_flags(nb_cmd, opt);
    nb_cmd->add_option("--noise-snr", opt.noise_snr_list, "comma-separated SNR list (dB)")
        ->default_val("20,15,10,5,0");
    nb_cmd->add_option("--noise-seed", opt.cfg.noise_seed, "noise seed")->default_val(0);
    nb_cmd->add_option("-o,--out", opt.out, "output CSV (stdout when omitted)");
    nb_cmd->callback([&] {
        opt.space_given = nb_cmd->get_option("--space")->count() > 0;
        const RunConfig cfg = make_config(opt);
        const DatasetManifest manifest = scan_dataset(opt.root);
        const auto rows = noise_bench(manifest, cfg, parse_double_list(opt.noise_snr_list, "snr"),
                                      bench_spaces(opt));
        emit(bench_csv(rows, "snr_db", "noise-bench", cfg), opt.out);
    });

    // illum-bench
    auto* ib_cmd = app.add_subcommand("illum-bench", "accuracy vs test-time illumination scale");
    ib_cmd->add_option("root", opt.root, "dataset root")->required();
    add_extraction_flags(ib_cmd, opt);
    add_cv_flags(ib_cmd, opt);
    ib_cmd->add_option("--alphas", opt.alphas, "comma-separated intensity scales")->required();
    ib_cmd->add_option("-o,--out", opt.out, "output CSV (stdout when omitted)");
    ib_cmd->callback([&] {
        opt.space_given = ib_cmd->get_option("--space")->count() > 0;
        const RunConfig cfg = make_config(opt);
        const DatasetManifest manifest = scan_dataset(opt.root);
        const auto rows =
            illum_bench(manifest, cfg, parse_double_list(opt.alphas, "alpha"), bench_spaces(opt));
        emit(bench_csv(rows, "alpha", "illum-bench", cfg), opt.out);
    });

    // d-sweep
    auto* ds_cmd = app.add_subcommand("d-sweep", "accuracy vs dominant pattern count D");
    ds_cmd->add_option("root", opt.root, "dataset root")->required();
    add_extraction_flags(ds_cmd, opt);
    add_cv_flags(ds_cmd, opt);
    ds_cmd->add_option("--d-sweep", opt.sweep, "D range start:stop:step")
        ->default_val("100:2000:100");
    ds_cmd->add_option("-o,--out", opt.out, "output CSV (stdout when omitted)");
    ds_cmd->callback([&] {
        opt.space_given = ds_cmd->get_option("--space")->count() > 0;
        const RunConfig cfg = make_config(opt);
        const DatasetManifest manifest = scan_dataset(opt.root);
        const auto rows = d_sweep(manifest, cfg, parse_sweep(opt.sweep), bench_spaces(opt));
        emit(bench_csv(rows, "D", "d-sweep", cfg), opt.out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const clbp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const clbp::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
