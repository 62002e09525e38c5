// grf: train small classifiers, craft gradient-refining FGSM-family
// adversarial batches, and measure transfer attack success rates.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "grf/attack.hpp"
#include "grf/dataio.hpp"
#include "grf/errors.hpp"
#include "grf/eval.hpp"
#include "grf/model.hpp"
#include "grf/parallel.hpp"

namespace {

using namespace grf;

float parse_epsilon(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const long a = std::stol(text.substr(0, slash));
        const long b = std::stol(text.substr(slash + 1));
        if (b <= 0 || a < 0) {
            throw std::invalid_argument("bad epsilon fraction '" + text + "'");
        }
        return static_cast<float>(a) / static_cast<float>(b);
    }
    return std::stof(text);
}

// "n=2000,classes=10,h=32,w=32,seed=7" -> SyntheticSpec; unknown keys rejected
SyntheticSpec parse_synthetic(const std::string& text, uint64_t default_seed) {
    SyntheticSpec spec;
    spec.seed = default_seed;
    bool have_n = false;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("synthetic spec entry '" + item + "' is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "n") {
            spec.n = std::stoi(value);
            have_n = true;
        } else if (key == "classes") {
            spec.classes = std::stoi(value);
        } else if (key == "h") {
            spec.h = std::stoi(value);
        } else if (key == "w") {
            spec.w = std::stoi(value);
        } else if (key == "seed") {
            spec.seed = std::stoull(value);
        } else {
            throw std::invalid_argument("unknown synthetic spec key '" + key + "'");
        }
    }
    if (!have_n) {
        throw std::invalid_argument("synthetic spec needs n=<count>");
    }
    return spec;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

struct LoadedModels {
    std::vector<Classifier> owned;
    std::vector<ModelRef> refs;
};

LoadedModels load_models(const std::vector<std::string>& paths) {
    LoadedModels out;
    out.owned.reserve(paths.size());
    for (const std::string& path : paths) {
        out.owned.push_back(load_classifier(path));
    }
    for (size_t i = 0; i < paths.size(); ++i) {
        out.refs.push_back({stem_of(paths[i]), &out.owned[i]});
    }
    return out;
}

std::vector<const Classifier*> bare(const LoadedModels& models) {
    std::vector<const Classifier*> out;
    for (const ModelRef& r : models.refs) {
        out.push_back(r.model);
    }
    return out;
}

// flags shared by attack and sweep
struct AttackFlags {
    std::string eps = "16/255";
    int iters = 8;
    float p = 0.7f;
    int n = 11;
    float mu = 1.0f;
    int kernel = 5;
    float sigma = 0.0f;  // 0 = kernel/4
    uint64_t seed = 0;

    AttackConfig to_config() const {
        AttackConfig cfg;
        cfg.epsilon = parse_epsilon(eps);
        cfg.iterations = iters;
        cfg.diversity_p = p;
        cfg.correction_n = n;
        cfg.momentum_mu = mu;
        cfg.kernel_size = kernel;
        cfg.kernel_sigma = sigma > 0.0f ? sigma : static_cast<float>(kernel) / 4.0f;
        cfg.seed = seed;
        cfg.validate();
        return cfg;
    }
};

void add_attack_flags(CLI::App* cmd, AttackFlags& flags) {
    cmd->add_option("--eps", flags.eps, "L-inf budget, fraction like 16/255 or decimal")
        ->capture_default_str();
    cmd->add_option("--iters", flags.iters, "attack iterations T")->capture_default_str();
    cmd->add_option("--p", flags.p, "diversity transform probability")->capture_default_str();
    cmd->add_option("--n", flags.n, "correction times (gradients averaged per iteration)")
        ->capture_default_str();
    cmd->add_option("--mu", flags.mu, "momentum decay factor")->capture_default_str();
    cmd->add_option("--kernel", flags.kernel, "Gaussian kernel size (odd)")
        ->capture_default_str();
    cmd->add_option("--sigma", flags.sigma, "Gaussian sigma (default kernel/4)");
    cmd->add_option("--seed", flags.seed, "attack stream seed")->capture_default_str();
}

void check_dataset_matches(const Classifier& model, const Dataset& ds) {
    const Shape s = ds.images.shape;
    if (s.c != model.in_c || s.h != model.in_h || s.w != model.in_w) {
        throw std::invalid_argument("dataset images " + s.str() + " do not match model input (" +
                                    std::to_string(model.in_c) + "," +
                                    std::to_string(model.in_h) + "," +
                                    std::to_string(model.in_w) + ")");
    }
    if (ds.class_count != model.num_classes) {
        throw std::invalid_argument("dataset classes " + std::to_string(ds.class_count) +
                                    " do not match model classes " +
                                    std::to_string(model.num_classes));
    }
}

int cmd_train(const std::string& arch_name_str, const std::string& dataset_path,
              const std::string& synthetic, const std::string& test_synthetic,
              const std::string& test_path, uint64_t seed, int epochs, int batch_size, float lr,
              const std::string& out_path, const std::string& save_dataset_path,
              const std::string& save_test_path) {
    const ArchId arch = parse_arch(arch_name_str);
    if (dataset_path.empty() == synthetic.empty()) {
        throw std::invalid_argument("train needs exactly one of --dataset or --synthetic");
    }
    Dataset ds = dataset_path.empty()
                     ? generate_synthetic(parse_synthetic(synthetic, seed))
                     : load_dataset(dataset_path);
    if (!save_dataset_path.empty()) {
        save_dataset(ds, save_dataset_path);
    }

    TrainSpec spec;
    spec.epochs = epochs;
    spec.batch_size = batch_size;
    spec.learning_rate = lr;
    spec.seed = seed;
    const Classifier model = train(arch, ds, spec);
    save_classifier(model, out_path);
    std::printf("trained %s on %d images (%d classes)\n", arch_name(arch).c_str(), ds.size(),
                ds.class_count);
    std::printf("train accuracy: %.4f\n", model.final_train_accuracy);

    if (!test_synthetic.empty() || !test_path.empty()) {
        Dataset test = test_path.empty()
                           ? generate_synthetic(parse_synthetic(test_synthetic, seed + 1))
                           : load_dataset(test_path);
        if (!save_test_path.empty()) {
            save_dataset(test, save_test_path);
        }
        std::printf("test accuracy: %.4f\n", accuracy(model, test.images, test.labels));
    }
    std::printf("weights written to %s\n", out_path.c_str());
    return 0;
}

int cmd_attack(const std::vector<std::string>& model_paths, const std::string& dataset_path,
               const std::string& variant_str, const AttackFlags& flags,
               const std::string& out_path) {
    const AttackVariant variant = parse_variant(variant_str);
    const LoadedModels models = load_models(model_paths);
    const Dataset ds = load_dataset(dataset_path);
    check_dataset_matches(*models.refs.front().model, ds);

    const AttackConfig cfg = variant_config(flags.to_config(), variant);
    const Tensor adv = run_attack(bare(models), ds.images, ds.labels, cfg);

    double max_linf = 0.0, mean_linf = 0.0;
    for (int i = 0; i < adv.shape.n; ++i) {
        double img_max = 0.0;
        const float* a = adv.image(i);
        const float* b = ds.images.image(i);
        for (size_t j = 0; j < adv.shape.image_numel(); ++j) {
            img_max = std::max(img_max, std::fabs(static_cast<double>(a[j]) - b[j]));
        }
        max_linf = std::max(max_linf, img_max);
        mean_linf += img_max;
    }
    mean_linf /= adv.shape.n;

    save_adversarial(adv, dataset_hash(ds), config_hash(cfg), out_path);
    std::printf("attacked %d images with %s (eps=%.6f, T=%d, n=%d)\n", adv.shape.n,
                variant_name(variant).c_str(), cfg.epsilon, cfg.iterations, cfg.correction_n);
    std::printf("linf max: %.6f, linf mean: %.6f\n", max_linf, mean_linf);
    std::printf("adversarial batch written to %s\n", out_path.c_str());
    return 0;
}

int cmd_eval(const std::string& adv_path, const std::string& dataset_path,
             const std::vector<std::string>& target_paths, const std::string& out_path,
             std::string attack_name, const std::string& sources_str, bool tolerant) {
    const AdversarialFile adv = load_adversarial(adv_path);
    const Dataset ds = load_dataset(dataset_path);
    verify_provenance(adv, dataset_hash(ds), tolerant ? Provenance::tolerant : Provenance::strict);
    if (adv.batch.shape != ds.images.shape) {
        throw std::invalid_argument("adversarial batch " + adv.batch.shape.str() +
                                    " does not match dataset " + ds.images.shape.str());
    }
    const LoadedModels targets = load_models(target_paths);
    for (const ModelRef& t : targets.refs) {
        check_dataset_matches(*t.model, ds);
    }
    if (attack_name.empty()) {
        attack_name = stem_of(adv_path);
    }
    const std::vector<std::string> sources =
        sources_str.empty() ? std::vector<std::string>{} : split_list(sources_str);

    AsrReport report;
    report.meta.config_hash_hex = to_hex(adv.cfg_hash);
    report.meta.seed = 0;
    report.meta.timestamp = utc_timestamp();
    {
        // reuse transfer_matrix's row shape: clean rows first, then attack rows
        for (const ModelRef& t : targets.refs) {
            const double clean = attack_success_rate(*t.model, ds.images, ds.labels);
            const int wrong = static_cast<int>(std::lround(clean * ds.size()));
            report.rows.push_back({"clean", {}, t.name, ds.size(), wrong, clean});
        }
        for (const ModelRef& t : targets.refs) {
            const double asr = attack_success_rate(*t.model, adv.batch, ds.labels);
            const int wrong = static_cast<int>(std::lround(asr * ds.size()));
            report.rows.push_back({attack_name, sources, t.name, ds.size(), wrong, asr});
            std::printf("%s -> %s: asr %.6f\n", attack_name.c_str(), t.name.c_str(), asr);
        }
    }
    write_report(report, out_path);
    std::printf("report written to %s\n", out_path.c_str());
    return 0;
}

int cmd_sweep(const std::vector<std::string>& model_paths,
              const std::vector<std::string>& target_paths, const std::string& dataset_path,
              const std::string& variant_str, const std::string& n_list,
              const AttackFlags& flags, const std::string& out_path) {
    const AttackVariant variant = parse_variant(variant_str);
    const LoadedModels sources = load_models(model_paths);
    const LoadedModels targets = load_models(target_paths);
    const Dataset ds = load_dataset(dataset_path);
    check_dataset_matches(*sources.refs.front().model, ds);
    for (const ModelRef& t : targets.refs) {
        check_dataset_matches(*t.model, ds);
    }
    std::vector<int> n_values;
    for (const std::string& item : split_list(n_list)) {
        n_values.push_back(std::stoi(item));
    }
    const SweepCurve curve = sweep_correction_times(n_values, variant, sources.refs,
                                                    targets.refs, ds, flags.to_config());
    for (const SweepPoint& point : curve.points) {
        for (const auto& [target, asr] : point.target_asr) {
            std::printf("n=%d %s: asr %.6f\n", point.correction_n, target.c_str(), asr);
        }
    }
    write_sweep(curve, out_path);
    std::printf("sweep written to %s\n", out_path.c_str());
    return 0;
}

int cmd_report(const std::string& in_path) {
    const AsrReport report = read_report(in_path);
    std::printf("%-12s %-18s %-12s %8s %9s %10s\n", "attack", "sources", "target", "images",
                "success", "asr");
    for (const AsrRow& row : report.rows) {
        std::string sources = "-";
        if (!row.sources.empty()) {
            sources = row.sources[0];
            for (size_t i = 1; i < row.sources.size(); ++i) {
                sources += "+" + row.sources[i];
            }
        }
        std::printf("%-12s %-18s %-12s %8d %9d %10.6f\n", row.attack.c_str(), sources.c_str(),
                    row.target.c_str(), row.n_images, row.n_success, row.asr);
    }
    // transfer means exclude clean rows and white-box pairs
    std::printf("\ntransfer means (white-box rows excluded):\n");
    std::vector<std::string> seen;
    for (const AsrRow& row : report.rows) {
        if (row.attack == "clean" ||
            std::find(seen.begin(), seen.end(), row.attack) != seen.end()) {
            continue;
        }
        seen.push_back(row.attack);
        double sum = 0.0;
        int count = 0;
        for (const AsrRow& r : report.rows) {
            if (r.attack != row.attack ||
                std::find(r.sources.begin(), r.sources.end(), r.target) != r.sources.end()) {
                continue;
            }
            sum += r.asr;
            ++count;
        }
        if (count > 0) {
            std::printf("  %-12s %.6f over %d target(s)\n", row.attack.c_str(), sum / count,
                        count);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradient-refining adversarial attack toolkit"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a classifier");
    std::string arch = "cnn_a", train_dataset, synthetic, test_synthetic, test_dataset;
    std::string train_out, save_ds, save_test_ds;
    uint64_t train_seed = 0;
    int epochs = 12, batch_size = 32;
    float lr = 0.08f;
    train_cmd->add_option("--arch", arch, "architecture: cnn_a, cnn_b or mlp")
        ->capture_default_str();
    train_cmd->add_option("--dataset", train_dataset, "training dataset (.grfd)");
    train_cmd->add_option("--synthetic", synthetic,
                          "synthetic training spec, e.g. n=2000,classes=10[,h=32][,w=32][,seed=S]"
                          " (seed defaults to --seed)");
    train_cmd->add_option("--test-synthetic", test_synthetic,
                          "synthetic held-out spec (seed defaults to --seed+1)");
    train_cmd->add_option("--test-dataset", test_dataset, "held-out dataset (.grfd)");
    train_cmd->add_option("--seed", train_seed, "training seed")->capture_default_str();
    train_cmd->add_option("--epochs", epochs, "SGD epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", batch_size, "mini-batch size")->capture_default_str();
    train_cmd->add_option("--lr", lr, "learning rate")->capture_default_str();
    train_cmd->add_option("--out", train_out, "output weight file (.grfw)")->required();
    train_cmd->add_option("--save-dataset", save_ds, "also write the training dataset here");
    train_cmd->add_option("--save-test-dataset", save_test_ds,
                          "also write the held-out dataset here");

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "craft an adversarial batch");
    std::string attack_models, attack_dataset, attack_variant = "r-dtmi", attack_out;
    AttackFlags attack_flags;
    int attack_threads = 0;
    attack_cmd->add_option("--models", attack_models, "comma list of source models (ensemble)")
        ->required();
    attack_cmd->add_option("--dataset", attack_dataset, "dataset to perturb (.grfd)")->required();
    attack_cmd
        ->add_option("--variant", attack_variant,
                     "ifgsm, di, dti, dtmi, r-di, r-dti or r-dtmi")
        ->capture_default_str();
    add_attack_flags(attack_cmd, attack_flags);
    attack_cmd->add_option("--threads", attack_threads, "worker count (0 = all cores)")
        ->capture_default_str();
    attack_cmd->add_option("--out", attack_out, "output adversarial file (.grfa)")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score an adversarial batch against models");
    std::string eval_adv, eval_dataset, eval_targets, eval_out, eval_name, eval_sources;
    bool tolerant = false;
    int eval_threads = 0;
    eval_cmd->add_option("--adv", eval_adv, "adversarial batch (.grfa)")->required();
    eval_cmd->add_option("--dataset", eval_dataset, "originating dataset (.grfd)")->required();
    eval_cmd->add_option("--targets", eval_targets, "comma list of target models")->required();
    eval_cmd->add_option("--out", eval_out, "output CSV report")->required();
    eval_cmd->add_option("--attack-name", eval_name, "row label (default: adv file stem)");
    eval_cmd->add_option("--sources", eval_sources, "comma list of source names for the rows");
    eval_cmd->add_flag("--tolerant-provenance", tolerant,
                       "warn instead of failing on dataset hash mismatch");
    eval_cmd->add_option("--threads", eval_threads, "worker count (0 = all cores)")
        ->capture_default_str();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "correction-times ablation");
    std::string sweep_models, sweep_targets, sweep_dataset, sweep_variant = "r-dti";
    std::string sweep_nlist = "1,3,5,7,9,11,13,15", sweep_out;
    AttackFlags sweep_flags;
    int sweep_threads = 0;
    sweep_cmd->add_option("--models", sweep_models, "comma list of source models")->required();
    sweep_cmd->add_option("--targets", sweep_targets, "comma list of target models")->required();
    sweep_cmd->add_option("--dataset", sweep_dataset, "dataset (.grfd)")->required();
    sweep_cmd->add_option("--variant", sweep_variant, "refined variant to sweep")
        ->capture_default_str();
    sweep_cmd->add_option("--n-list", sweep_nlist, "comma list of correction times")
        ->capture_default_str();
    add_attack_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--threads", sweep_threads, "worker count (0 = all cores)")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "output CSV")->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "pretty-print a CSV report");
    std::string report_in;
    report_cmd->add_option("--in", report_in, "CSV report to read")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(train_cmd)) {
            return cmd_train(arch, train_dataset, synthetic, test_synthetic, test_dataset,
                             train_seed, epochs, batch_size, lr, train_out, save_ds,
                             save_test_ds);
        }
        if (app.got_subcommand(attack_cmd)) {
            grf::set_thread_count(attack_threads);
            return cmd_attack(split_list(attack_models), attack_dataset, attack_variant,
                              attack_flags, attack_out);
        }
        if (app.got_subcommand(eval_cmd)) {
            grf::set_thread_count(eval_threads);
            return cmd_eval(eval_adv, eval_dataset, split_list(eval_targets), eval_out,
                            eval_name, eval_sources, tolerant);
        }
        if (app.got_subcommand(sweep_cmd)) {
            grf::set_thread_count(sweep_threads);
            return cmd_sweep(split_list(sweep_models), split_list(sweep_targets), sweep_dataset,
                             sweep_variant, sweep_nlist, sweep_flags, sweep_out);
        }
        if (app.got_subcommand(report_cmd)) {
            return cmd_report(report_in);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
