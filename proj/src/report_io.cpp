#include "gepbench/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "gepbench/svg.hpp"

namespace gepbench {

using nlohmann::json;

namespace {

void write_double(std::ostream& out, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general,
                                   std::numeric_limits<double>::max_digits10);
    out.write(buf, res.ptr - buf);
}

json record_to_json(const EvaluationRecord& r) {
    return {{"condition", r.condition},
            {"method", r.method},
            {"target", r.target},
            {"seed", r.seed_index},
            {"true_accuracy", r.true_accuracy},
            {"predicted_accuracy", r.predicted_accuracy},
            {"abs_error", r.abs_error}};
}

json cell_to_json(const SummaryCell& c) {
    return {{"condition", c.condition}, {"method", c.method},
            {"target", c.target},       {"mae", c.mae},
            {"std", c.std_dev},         {"mean_gap", c.mean_gap},
            {"n", c.n}};
}

// Per-bench plot selection. Every plot is MAE (or gap) against an axis that
// makes sense for the bench; series carry per-seed std as error bars.
std::vector<std::pair<std::string, PlotSpec>> make_plots(
    const RunReport& report) {
    std::vector<std::pair<std::string, PlotSpec>> plots;
    const auto& cells = report.summary;

    auto methods_of = [&](const std::string& cond_prefix) {
        std::set<std::string> methods;
        for (const auto& c : cells)
            if (c.condition.rfind(cond_prefix, 0) == 0) methods.insert(c.method);
        return methods;
    };

    if (report.bench_name == "sweep-ensemble") {
        // MAE vs ensemble size, one series per target of interest
        PlotSpec spec;
        spec.title = "MA error vs ensemble size";
        spec.x_label = "ensemble size";
        spec.y_label = "MAE";
        for (const std::string target : {"shift:near", "shift:far"}) {
            PlotSeries series;
            series.label = target;
            std::map<std::size_t, const SummaryCell*> by_size;
            for (const auto& c : cells) {
                if (c.target != target) continue;
                if (c.condition.rfind("M=", 0) != 0) continue;
                by_size[std::stoul(c.condition.substr(2))] = &c;
            }
            for (const auto& [size, cell] : by_size) {
                series.x.push_back(static_cast<double>(size));
                series.y.push_back(cell->mae);
                series.yerr.push_back(cell->std_dev);
            }
            if (!series.x.empty()) spec.series.push_back(std::move(series));
        }
        if (!spec.series.empty())
            plots.emplace_back("mae_vs_ensemble_size.svg", std::move(spec));
        return plots;
    }

    if (report.bench_name == "bench-shift") {
        // corruption severity curves per method, additive_noise family
        PlotSpec spec;
        spec.title = "MAE vs corruption severity (additive_noise)";
        spec.x_label = "severity";
        spec.y_label = "MAE";
        for (const auto& method : methods_of("clean")) {
            PlotSeries series;
            series.label = method;
            for (int sev = 1; sev <= 5; ++sev) {
                const std::string target =
                    "corrupt:additive_noise:" + std::to_string(sev);
                for (const auto& c : cells)
                    if (c.method == method && c.target == target) {
                        series.x.push_back(sev);
                        series.y.push_back(c.mae);
                        series.yerr.push_back(c.std_dev);
                    }
            }
            if (!series.x.empty()) spec.series.push_back(std::move(series));
        }
        if (!spec.series.empty())
            plots.emplace_back("mae_vs_severity.svg", std::move(spec));
        return plots;
    }

    // generic: MAE per target index, one series per (condition, method)
    PlotSpec spec;
    spec.title = report.bench_name + " MAE by target";
    spec.x_label = "target index (canonical order)";
    spec.y_label = "MAE";
    std::set<std::string> targets;
    for (const auto& c : cells) targets.insert(c.target);
    std::map<std::string, double> target_index;
    double idx = 0;
    for (const auto& t : targets) target_index[t] = idx++;
    std::map<std::pair<std::string, std::string>, PlotSeries> by_series;
    for (const auto& c : cells) {
        auto& series = by_series[{c.condition, c.method}];
        series.label = c.condition + "/" + c.method;
        series.x.push_back(target_index[c.target]);
        series.y.push_back(c.mae);
        series.yerr.push_back(c.std_dev);
    }
    for (auto& [_, series] : by_series)
        spec.series.push_back(std::move(series));
    if (!spec.series.empty())
        plots.emplace_back("mae_by_target.svg", std::move(spec));
    return plots;
}

} // namespace

std::string report_to_json_text(const RunReport& report) {
    json j;
    j["bench"] = report.bench_name;
    j["config"] = json::parse(report.config_echo);
    json records = json::array();
    for (const auto& r : report.records) records.push_back(record_to_json(r));
    j["records"] = records;
    json summary = json::array();
    for (const auto& c : report.summary) summary.push_back(cell_to_json(c));
    j["summary"] = summary;
    return j.dump(2) + "\n";
}

RunReport report_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::schema, std::string("report: ") + e.what());
    }
    if (!j.contains("bench") || !j.contains("config") ||
        !j.contains("records") || !j.contains("summary"))
        fail(ErrorKind::schema, "report: missing required keys");

    RunReport report;
    report.bench_name = j["bench"].get<std::string>();
    report.config_echo = j["config"].dump(2) + "\n";
    try {
        for (const auto& r : j["records"]) {
            EvaluationRecord rec;
            rec.condition = r.at("condition").get<std::string>();
            rec.method = r.at("method").get<std::string>();
            rec.target = r.at("target").get<std::string>();
            rec.seed_index = r.at("seed").get<std::uint64_t>();
            rec.true_accuracy = r.at("true_accuracy").get<double>();
            rec.predicted_accuracy = r.at("predicted_accuracy").get<double>();
            rec.abs_error = r.at("abs_error").get<double>();
            report.records.push_back(std::move(rec));
        }
        for (const auto& c : j["summary"]) {
            SummaryCell cell;
            cell.condition = c.at("condition").get<std::string>();
            cell.method = c.at("method").get<std::string>();
            cell.target = c.at("target").get<std::string>();
            cell.mae = c.at("mae").get<double>();
            cell.std_dev = c.at("std").get<double>();
            cell.mean_gap = c.at("mean_gap").get<double>();
            cell.n = c.at("n").get<std::size_t>();
            report.summary.push_back(std::move(cell));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::schema, std::string("report: ") + e.what());
    }
    return report;
}

RunReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::missing_file, "cannot open: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return report_from_json_text(text);
}

std::vector<std::filesystem::path> emit_report(
    const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    {
        const auto path = dir / "report.json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot write " + path.string());
        out << report_to_json_text(report);
        written.push_back(path);
    }
    {
        const auto path = dir / "records.csv";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot write " + path.string());
        out << "condition,method,target,seed,true_accuracy,predicted_accuracy,"
               "abs_error\n";
        for (const auto& r : report.records) {
            out << r.condition << "," << r.method << "," << r.target << ","
                << r.seed_index << ",";
            write_double(out, r.true_accuracy);
            out << ",";
            write_double(out, r.predicted_accuracy);
            out << ",";
            write_double(out, r.abs_error);
            out << "\n";
        }
        written.push_back(path);
    }
    {
        const auto path = dir / "summary.csv";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot write " + path.string());
        out << "condition,method,target,mae,std,mean_gap,n\n";
        for (const auto& c : report.summary) {
            out << c.condition << "," << c.method << "," << c.target << ",";
            write_double(out, c.mae);
            out << ",";
            write_double(out, c.std_dev);
            out << ",";
            write_double(out, c.mean_gap);
            out << "," << c.n << "\n";
        }
        written.push_back(path);
    }
    for (const auto& [name, spec] : make_plots(report)) {
        const auto path = dir / name;
        emit_plot(spec, path);
        written.push_back(path);
    }
    return written;
}

} // namespace gepbench
