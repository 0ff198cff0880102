#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace shdr {

/// Sentinel for an unobserved sample. Stored as a quiet NaN; never imputed
/// by the data layer.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// N aligned response channels of common length T, column-major (one column
/// per channel) so each channel is contiguous.
class ResponseEnsemble {
public:
    ResponseEnsemble() = default;
    ResponseEnsemble(Eigen::MatrixXd values, std::vector<std::string> labels = {},
                     double sample_period = 1.0);

    Eigen::Index length() const { return values_.rows(); }
    Eigen::Index channels() const { return values_.cols(); }

    std::span<const double> channel(Eigen::Index k) const {
        return {values_.col(k).data(), static_cast<std::size_t>(values_.rows())};
    }

    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& labels() const { return labels_; }
    double sample_period() const { return sample_period_; }
    std::size_t missing_count() const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> labels_;
    double sample_period_ = 1.0;
};

enum class DriverMode { Continuous, Discrete };

std::string to_string(DriverMode mode);
DriverMode driver_mode_from_string(const std::string& s);

/// A reconstructed (or true) driver. Continuous signals may carry several
/// modes, one column each; discrete signals carry one label column.
struct DriverSignal {
    DriverMode mode = DriverMode::Continuous;
    Eigen::MatrixXd values;           // T_r x m (continuous)
    std::vector<int> labels;          // T_r (discrete), contiguous 0..K-1
    Eigen::Index time_offset = 0;     // raw index of row 0

    Eigen::Index size() const {
        return mode == DriverMode::Discrete ? static_cast<Eigen::Index>(labels.size())
                                            : values.rows();
    }
    std::vector<double> mode_values(Eigen::Index m = 0) const;

    static DriverSignal continuous(std::vector<double> v, Eigen::Index offset = 0);
    static DriverSignal continuous_modes(Eigen::MatrixXd modes, Eigen::Index offset = 0);
    static DriverSignal discrete(std::vector<int> labels, Eigen::Index offset = 0);
};

struct IngestOptions {
    bool header = false;
    char delimiter = ',';
    double sample_period = 1.0;
};

ResponseEnsemble load_csv(const std::filesystem::path& path, const IngestOptions& options = {});
ResponseEnsemble parse_csv(const std::string& text, const IngestOptions& options = {});

/// Writes with 17 significant digits; MISSING becomes an empty cell.
void save_csv(const ResponseEnsemble& ensemble, const std::filesystem::path& path,
              bool header = false);

/// Per-channel standardization over non-missing entries (population std).
/// Zero-variance channels map to all zeros.
ResponseEnsemble zscore(const ResponseEnsemble& ensemble);

/// Relabels so labels appear as 0,1,2,... in order of first occurrence.
std::vector<int> relabel_by_first_occurrence(std::span<const int> labels);

void save_driver_csv(const DriverSignal& signal, const std::filesystem::path& path);
DriverSignal load_driver_csv(const std::filesystem::path& path, DriverMode mode,
                             bool header = false);

/// Sidecar JSON: {mode, T_r, time_offset, parameters}.
nlohmann::json driver_sidecar(const DriverSignal& signal, const nlohmann::json& parameters);

}  // namespace shdr
