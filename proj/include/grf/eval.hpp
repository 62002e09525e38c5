#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "grf/attack.hpp"
#include "grf/dataio.hpp"
#include "grf/model.hpp"

namespace grf {

struct AsrRow {
    std::string attack;
    std::vector<std::string> sources;  // "+"-joined in CSV; "-" when none
    std::string target;
    int n_images = 0;
    int n_success = 0;
    double asr = 0.0;  // n_success / n_images exactly
};

struct ReportMeta {
    std::string config_hash_hex;
    uint64_t seed = 0;
    std::string timestamp;  // UTC ISO-8601; excluded from determinism checks
};

struct AsrReport {
    std::vector<AsrRow> rows;
    ReportMeta meta;
};

struct SweepPoint {
    int correction_n = 0;
    std::vector<std::pair<std::string, double>> target_asr;
};

struct SweepCurve {
    std::vector<SweepPoint> points;  // correction_n strictly increasing
    ReportMeta meta;
};

struct ModelRef {
    std::string name;
    const Classifier* model = nullptr;
};

struct AttackVariantSpec {
    std::string name;
    AttackVariant kind;
};

/// Current UTC time as ISO-8601, used for report metadata.
std::string utc_timestamp();

/// Fraction of images the model misclassifies (argmax ties -> lowest class
/// index). Errors on an empty batch.
double attack_success_rate(const Classifier& model, const Tensor& adv_batch,
                           const std::vector<int>& labels);

/// Table 1 analog: per variant, craft one adversarial batch on the source
/// ensemble and score it against every target. Rows are ordered clean rows
/// first, then (variant, target). Deterministic given cfg.seed.
AsrReport transfer_matrix(const std::vector<AttackVariantSpec>& variants,
                          const std::vector<ModelRef>& sources,
                          const std::vector<ModelRef>& targets, const Dataset& dataset,
                          const AttackConfig& cfg);

/// Correction-times ablation: one attack run per n (shared base seed),
/// per-target ASR recorded per point.
SweepCurve sweep_correction_times(const std::vector<int>& n_values, AttackVariant variant,
                                  const std::vector<ModelRef>& sources,
                                  const std::vector<ModelRef>& targets, const Dataset& dataset,
                                  const AttackConfig& cfg);

// CSV, UTF-8, LF line endings. Leading '#' comment lines carry the config
// hash, seed and timestamp; then the mandatory header row
// "attack,sources,target,n_images,n_success,asr" and one row per record
// with asr in fixed 6-decimal form. Sweep files use "n,target,asr".
void write_report(const AsrReport& report, const std::string& path);
AsrReport read_report(const std::string& path);
void write_sweep(const SweepCurve& curve, const std::string& path);
SweepCurve read_sweep(const std::string& path);

} // namespace grf
