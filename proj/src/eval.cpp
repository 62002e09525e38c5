#include "grf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "grf/errors.hpp"

namespace grf {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

namespace {

std::string join_sources(const std::vector<std::string>& sources) {
    if (sources.empty()) {
        return "-";
    }
    std::string out = sources[0];
    for (size_t i = 1; i < sources.size(); ++i) {
        out += "+";
        out += sources[i];
    }
    return out;
}

std::vector<std::string> split_sources(const std::string& joined) {
    if (joined == "-") {
        return {};
    }
    std::vector<std::string> out;
    std::stringstream ss(joined);
    std::string part;
    while (std::getline(ss, part, '+')) {
        out.push_back(part);
    }
    return out;
}

std::string format_asr(double asr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", asr);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.push_back("");
    }
    return fields;
}

// Leading '#' metadata comments shared by both CSV flavors.
void write_meta(std::ofstream& out, const ReportMeta& meta) {
    out << "# config_hash=" << meta.config_hash_hex << "\n";
    out << "# seed=" << meta.seed << "\n";
    out << "# timestamp=" << meta.timestamp << "\n";
}

bool read_meta_line(const std::string& line, ReportMeta& meta) {
    if (line.empty() || line[0] != '#') {
        return false;
    }
    const auto eat = [&line](const char* key) -> const char* {
        const std::string prefix = std::string("# ") + key + "=";
        return line.rfind(prefix, 0) == 0 ? line.c_str() + prefix.size() : nullptr;
    };
    if (const char* v = eat("config_hash")) {
        meta.config_hash_hex = v;
    } else if (const char* v = eat("seed")) {
        meta.seed = std::strtoull(v, nullptr, 10);
    } else if (const char* v = eat("timestamp")) {
        meta.timestamp = v;
    }
    return true;
}

int count_successes(const Classifier& model, const Tensor& batch,
                    const std::vector<int>& labels) {
    const Tensor logits = forward(model, batch);
    int wrong = 0;
    for (int i = 0; i < batch.shape.n; ++i) {
        const float* z = logits.image(i);
        int best = 0;
        for (int j = 1; j < model.num_classes; ++j) {
            if (z[j] > z[best]) {
                best = j;
            }
        }
        wrong += (best != labels[i]) ? 1 : 0;
    }
    return wrong;
}

std::vector<const Classifier*> bare_models(const std::vector<ModelRef>& refs) {
    std::vector<const Classifier*> out;
    out.reserve(refs.size());
    for (const ModelRef& r : refs) {
        out.push_back(r.model);
    }
    return out;
}

std::vector<std::string> ref_names(const std::vector<ModelRef>& refs) {
    std::vector<std::string> out;
    out.reserve(refs.size());
    for (const ModelRef& r : refs) {
        out.push_back(r.name);
    }
    return out;
}

} // namespace

double attack_success_rate(const Classifier& model, const Tensor& adv_batch,
                           const std::vector<int>& labels) {
    if (adv_batch.shape.n < 1) {
        throw std::invalid_argument("attack_success_rate: empty batch");
    }
    if (labels.size() != static_cast<size_t>(adv_batch.shape.n)) {
        throw std::invalid_argument("attack_success_rate: batch/label count mismatch");
    }
    return static_cast<double>(count_successes(model, adv_batch, labels)) / adv_batch.shape.n;
}

AsrReport transfer_matrix(const std::vector<AttackVariantSpec>& variants,
                          const std::vector<ModelRef>& sources,
                          const std::vector<ModelRef>& targets, const Dataset& dataset,
                          const AttackConfig& cfg) {
    if (sources.empty() || targets.empty()) {
        throw std::invalid_argument("transfer_matrix: need sources and targets");
    }
    AsrReport report;
    report.meta.config_hash_hex = to_hex(config_hash(cfg));
    report.meta.seed = cfg.seed;
    report.meta.timestamp = utc_timestamp();

    const int n = dataset.size();
    const std::vector<std::string> source_names = ref_names(sources);
    const std::vector<const Classifier*> source_models = bare_models(sources);

    // clean rows give the unattacked misclassification rate for context
    for (const ModelRef& target : targets) {
        const int wrong = count_successes(*target.model, dataset.images, dataset.labels);
        report.rows.push_back({"clean", {}, target.name, n, wrong,
                               static_cast<double>(wrong) / n});
    }
    for (const AttackVariantSpec& variant : variants) {
        const AttackConfig vcfg = variant_config(cfg, variant.kind);
        const Tensor adv = run_attack(source_models, dataset.images, dataset.labels, vcfg);
        for (const ModelRef& target : targets) {
            const int wrong = count_successes(*target.model, adv, dataset.labels);
            report.rows.push_back({variant.name, source_names, target.name, n, wrong,
                                   static_cast<double>(wrong) / n});
        }
    }
    return report;
}

SweepCurve sweep_correction_times(const std::vector<int>& n_values, AttackVariant variant,
                                  const std::vector<ModelRef>& sources,
                                  const std::vector<ModelRef>& targets, const Dataset& dataset,
                                  const AttackConfig& cfg) {
    if (n_values.empty()) {
        throw std::invalid_argument("sweep_correction_times: empty n list");
    }
    for (size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < 1 || (i > 0 && n_values[i] <= n_values[i - 1])) {
            throw std::invalid_argument(
                "sweep_correction_times: n values must be strictly increasing and >= 1");
        }
    }
    SweepCurve curve;
    curve.meta.config_hash_hex = to_hex(config_hash(cfg));
    curve.meta.seed = cfg.seed;
    curve.meta.timestamp = utc_timestamp();
    const std::vector<const Classifier*> source_models = bare_models(sources);
    for (int n : n_values) {
        AttackConfig vcfg = variant_config(cfg, variant);
        vcfg.correction_n = n;
        const Tensor adv = run_attack(source_models, dataset.images, dataset.labels, vcfg);
        SweepPoint point;
        point.correction_n = n;
        for (const ModelRef& target : targets) {
            point.target_asr.emplace_back(
                target.name, attack_success_rate(*target.model, adv, dataset.labels));
        }
        curve.points.push_back(std::move(point));
    }
    return curve;
}

void write_report(const AsrReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw format_error("cannot open '" + path + "' for writing");
    }
    write_meta(out, report.meta);
    out << "attack,sources,target,n_images,n_success,asr\n";
    for (const AsrRow& row : report.rows) {
        out << row.attack << "," << join_sources(row.sources) << "," << row.target << ","
            << row.n_images << "," << row.n_success << "," << format_asr(row.asr) << "\n";
    }
    if (!out) {
        throw format_error("write failed for '" + path + "'");
    }
}

AsrReport read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open '" + path + "' for reading");
    }
    AsrReport report;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || read_meta_line(line, report.meta)) {
            continue;
        }
        if (!header_seen) {
            if (line != "attack,sources,target,n_images,n_success,asr") {
                throw format_error("bad report header: '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) {
            throw format_error("bad report row: '" + line + "'");
        }
        AsrRow row;
        row.attack = fields[0];
        row.sources = split_sources(fields[1]);
        row.target = fields[2];
        row.n_images = std::stoi(fields[3]);
        row.n_success = std::stoi(fields[4]);
        row.asr = std::stod(fields[5]);
        report.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw format_error("report file has no header row");
    }
    return report;
}

void write_sweep(const SweepCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw format_error("cannot open '" + path + "' for writing");
    }
    write_meta(out, curve.meta);
    out << "n,target,asr\n";
    for (const SweepPoint& point : curve.points) {
        for (const auto& [target, asr] : point.target_asr) {
            out << point.correction_n << "," << target << "," << format_asr(asr) << "\n";
        }
    }
    if (!out) {
        throw format_error("write failed for '" + path + "'");
    }
}

SweepCurve read_sweep(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open '" + path + "' for reading");
    }
    SweepCurve curve;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || read_meta_line(line, curve.meta)) {
            continue;
        }
        if (!header_seen) {
            if (line != "n,target,asr") {
                throw format_error("bad sweep header: '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw format_error("bad sweep row: '" + line + "'");
        }
        const int n = std::stoi(fields[0]);
        if (curve.points.empty() || curve.points.back().correction_n != n) {
            curve.points.push_back({n, {}});
        }
        curve.points.back().target_asr.emplace_back(fields[1], std::stod(fields[2]));
    }
    if (!header_seen) {
        throw format_error("sweep file has no header row");
    }
    return curve;
}

} // namespace grf
