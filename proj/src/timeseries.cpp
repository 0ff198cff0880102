#include "shdr/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "shdr/error.hpp"

namespace shdr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ShortSeries: return "ShortSeries";
        case ErrorCode::DegenerateChannel: return "DegenerateChannel";
        case ErrorCode::EmbeddingTooLong: return "EmbeddingTooLong";
        case ErrorCode::NoUsablePairs: return "NoUsablePairs";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ArgumentRange: return "ArgumentRange";
        case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::ConstantSeries: return "ConstantSeries";
        case ErrorCode::DivergedTrajectory: return "DivergedTrajectory";
        case ErrorCode::NoOrbitsFound: return "NoOrbitsFound";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_input_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::EmptyInput:
        case ErrorCode::ShortSeries:
        case ErrorCode::DegenerateChannel:
        case ErrorCode::EmbeddingTooLong:
        case ErrorCode::ShapeMismatch:
        case ErrorCode::ArgumentRange:
        case ErrorCode::IoError:
            return true;
        default:
            return false;
    }
}

ResponseEnsemble::ResponseEnsemble(Eigen::MatrixXd values, std::vector<std::string> labels,
                                   double sample_period)
    : values_(std::move(values)), labels_(std::move(labels)), sample_period_(sample_period) {
    if (values_.cols() < 1) throw Error(ErrorCode::EmptyInput, "ensemble has no channels");
    if (values_.rows() < 2)
        throw Error(ErrorCode::ShortSeries,
                    "series length " + std::to_string(values_.rows()) + " < 2");
    if (!(sample_period_ > 0.0))
        throw Error(ErrorCode::ArgumentRange, "sample_period must be > 0");
    if (!labels_.empty() && static_cast<Eigen::Index>(labels_.size()) != values_.cols())
        throw Error(ErrorCode::ShapeMismatch, "label count does not match channel count");
}

std::size_t ResponseEnsemble::missing_count() const {
    return static_cast<std::size_t>(values_.array().isNaN().count());
}

std::string to_string(DriverMode mode) {
    return mode == DriverMode::Continuous ? "continuous" : "discrete";
}

DriverMode driver_mode_from_string(const std::string& s) {
    if (s == "continuous") return DriverMode::Continuous;
    if (s == "discrete") return DriverMode::Discrete;
    throw Error(ErrorCode::ArgumentRange, "unknown driver mode '" + s + "'");
}

std::vector<double> DriverSignal::mode_values(Eigen::Index m) const {
    if (mode == DriverMode::Discrete) return {labels.begin(), labels.end()};
    std::vector<double> out(static_cast<std::size_t>(values.rows()));
    for (Eigen::Index t = 0; t < values.rows(); ++t) out[static_cast<std::size_t>(t)] = values(t, m);
    return out;
}

DriverSignal DriverSignal::continuous(std::vector<double> v, Eigen::Index offset) {
    DriverSignal s;
    s.mode = DriverMode::Continuous;
    s.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    s.time_offset = offset;
    return s;
}

DriverSignal DriverSignal::continuous_modes(Eigen::MatrixXd modes, Eigen::Index offset) {
    DriverSignal s;
    s.mode = DriverMode::Continuous;
    s.values = std::move(modes);
    s.time_offset = offset;
    return s;
}

DriverSignal DriverSignal::discrete(std::vector<int> labels, Eigen::Index offset) {
    DriverSignal s;
    s.mode = DriverMode::Discrete;
    s.labels = std::move(labels);
    s.time_offset = offset;
    return s;
}

namespace {

std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string cell = trim(raw);
    if (cell.empty() || cell == "NaN" || cell == "nan" || cell == "NA") return kMissing;
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw Error(ErrorCode::ParseError, "non-numeric cell '" + cell + "' at row " +
                                               std::to_string(row) + ", column " +
                                               std::to_string(col));
    return v;
}

}  // namespace

ResponseEnsemble parse_csv(const std::string& text, const IngestOptions& options) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t row_index = 0;
    std::size_t line_no = 0;
    std::size_t blank_run = 0;  // blank lines are empty cells in single-column files
    bool header_pending = options.header;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            ++blank_run;
            continue;
        }
        if (width == 1 && !header_pending) {
            for (; blank_run > 0; --blank_run) rows.push_back({kMissing});
            row_index = rows.size();
        }
        blank_run = 0;
        auto cells = split_row(line, options.delimiter);
        if (header_pending) {
            for (auto& c : cells) labels.push_back(trim(c));
            width = cells.size();
            header_pending = false;
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw Error(ErrorCode::ParseError, "ragged row at line " + std::to_string(line_no) +
                                                   ": expected " + std::to_string(width) +
                                                   " cells, found " + std::to_string(cells.size()));
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) row[c] = parse_cell(cells[c], row_index, c);
        rows.push_back(std::move(row));
        ++row_index;
    }

    if (width == 0) throw Error(ErrorCode::EmptyInput, "no columns in input");
    if (rows.size() < 2)
        throw Error(ErrorCode::ShortSeries, "series length " + std::to_string(rows.size()) + " < 2");

    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t c = 0; c < width; ++c)
            values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t][c];
    return ResponseEnsemble(std::move(values), std::move(labels), options.sample_period);
}

ResponseEnsemble load_csv(const std::filesystem::path& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), options);
}

void save_csv(const ResponseEnsemble& ensemble, const std::filesystem::path& path, bool header) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << std::setprecision(17);
    const auto& v = ensemble.values();
    if (header) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            if (c) out << ',';
            out << (ensemble.labels().empty() ? "x" + std::to_string(c)
                                              : ensemble.labels()[static_cast<std::size_t>(c)]);
        }
        out << '\n';
    }
    for (Eigen::Index t = 0; t < v.rows(); ++t) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            if (c) out << ',';
            if (!is_missing(v(t, c))) out << v(t, c);
        }
        out << '\n';
    }
}

ResponseEnsemble zscore(const ResponseEnsemble& ensemble) {
    Eigen::MatrixXd out = ensemble.values();
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        double sum = 0.0;
        Eigen::Index n = 0;
        for (Eigen::Index t = 0; t < out.rows(); ++t)
            if (!is_missing(out(t, c))) { sum += out(t, c); ++n; }
        if (n < 2)
            throw Error(ErrorCode::DegenerateChannel,
                        "channel " + std::to_string(c) + " has fewer than 2 observed values");
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (Eigen::Index t = 0; t < out.rows(); ++t)
            if (!is_missing(out(t, c))) ss += (out(t, c) - mean) * (out(t, c) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        for (Eigen::Index t = 0; t < out.rows(); ++t) {
            if (is_missing(out(t, c))) continue;
            out(t, c) = sd > 0.0 ? (out(t, c) - mean) / sd : 0.0;
        }
    }
    return ResponseEnsemble(std::move(out), ensemble.labels(), ensemble.sample_period());
}

std::vector<int> relabel_by_first_occurrence(std::span<const int> labels) {
    std::unordered_map<int, int> remap;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
        out.push_back(it->second);
    }
    return out;
}

void save_driver_csv(const DriverSignal& signal, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << std::setprecision(17);
    if (signal.mode == DriverMode::Discrete) {
        for (int l : signal.labels) out << l << '\n';
        return;
    }
    for (Eigen::Index t = 0; t < signal.values.rows(); ++t) {
        for (Eigen::Index m = 0; m < signal.values.cols(); ++m) {
            if (m) out << ',';
            if (!is_missing(signal.values(t, m))) out << signal.values(t, m);
        }
        out << '\n';
    }
}

DriverSignal load_driver_csv(const std::filesystem::path& path, DriverMode mode, bool header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    // Single-row files are legal for drivers, so bypass the ensemble length check.
    std::istringstream lines(buf.str());
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    bool skip = header;
    while (std::getline(lines, line)) {
        if (trim(line).empty()) continue;
        if (skip) { skip = false; continue; }
        auto cells = split_row(line, ',');
        std::vector<double> r;
        for (std::size_t c = 0; c < cells.size(); ++c) r.push_back(parse_cell(cells[c], row, c));
        if (!rows.empty() && r.size() != rows.front().size())
            throw Error(ErrorCode::ParseError, "ragged row " + std::to_string(row));
        rows.push_back(std::move(r));
        ++row;
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "empty driver file " + path.string());

    DriverSignal s;
    s.mode = mode;
    if (mode == DriverMode::Discrete) {
        for (const auto& r : rows) s.labels.push_back(static_cast<int>(std::lround(r.front())));
    } else {
        s.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t t = 0; t < rows.size(); ++t)
            for (std::size_t m = 0; m < rows[t].size(); ++m)
                s.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) = rows[t][m];
    }
    return s;
}

nlohmann::json driver_sidecar(const DriverSignal& signal, const nlohmann::json& parameters) {
    return {{"mode", to_string(signal.mode)},
            {"T_r", signal.size()},
            {"time_offset", signal.time_offset},
            {"parameters", parameters}};
}

}  // namespace shdr
